#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "handwash/engine.hpp"

namespace handwash {

inline constexpr std::string_view kReportFormat = "handwash-report/1";

nlohmann::json ledger_to_json(const DurationLedger& ledger);
nlohmann::json snapshot_to_json(const EngineSnapshot& s);
nlohmann::json report_to_json(const EpisodeReport& r, std::string_view episode_id);

/// Canonical report document (sorted keys, trailing newline). Identical
/// reports always serialize to identical bytes.
std::string serialize_report(const EpisodeReport& r, std::string_view episode_id);

/// Per-episode statistics CSV built from a frame-tick ledger.
std::string ledger_statistics_csv(std::string_view episode_id, const DurationLedger& ledger);

}  // namespace handwash
