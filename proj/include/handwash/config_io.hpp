#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "handwash/engine.hpp"

namespace handwash {

// Key-value configuration file:
//
//   # comment
//   total_duration_s = 40
//   required_movements = 2,3,4,5,6,7,10
//   min_s.2 = 5
//   poll_period_s = 0.5
//   gate.on_threshold = 0.02
//   gate.off_threshold = 0.01
//   gate.min_duration_s = 10
//   gate.max_gap_s = 2
//   smoothing_window = 15
//   classifier.kind = replay          # replay | constant | external
//   classifier.input_size = 224
//   classifier.noise_epsilon = 0
//   classifier.model_path = model.json
//   classifier.constant_code = 0
//   classifier.seed = 0
//
// Keys not present keep the value from `base`. Unknown keys are errors.

/// Throws ConfigError naming the offending line.
ComplianceConfig parse_config_text(std::string_view text, const ComplianceConfig& base = default_config());
ComplianceConfig load_config(const std::string& path, const ComplianceConfig& base = default_config());
/// Every key, canonical order; parse_config_text(format_config_text(c)) == c.
std::string format_config_text(const ComplianceConfig& cfg);

nlohmann::json config_to_json(const ComplianceConfig& cfg);
/// Applies the fields present in `j` over `base`. Throws ConfigError.
ComplianceConfig config_from_json(const nlohmann::json& j, const ComplianceConfig& base);

}  // namespace handwash
