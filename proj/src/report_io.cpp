#include "handwash/report_io.hpp"

#include <cstdio>
#include <sstream>

namespace handwash {

using nlohmann::json;

json ledger_to_json(const DurationLedger& ledger) {
  json seconds = json::object();
  for (Movement m : kAllMovements) seconds[std::to_string(code_of(m))] = ledger.seconds(m);
  return {{"seconds", seconds}, {"total_active_s", ledger.total_active_s()}};
}

json snapshot_to_json(const EngineSnapshot& s) {
  return {{"state", state_name(s.state)},
          {"washing", s.washing_on},
          {"movement", code_of(s.movement)},
          {"episode_elapsed_s", s.episode_elapsed_s},
          {"t", s.t},
          {"ledger", ledger_to_json(s.ledger)}};
}

json report_to_json(const EpisodeReport& r, std::string_view episode_id) {
  json missing = json::array();
  for (const Shortfall& s : r.missing) {
    missing.push_back({{"code", code_of(s.movement)},
                       {"required_s", s.required_s},
                       {"actual_s", s.actual_s},
                       {"short_by_s", s.short_by_s}});
  }
  json timeline = json::array();
  for (const Transition& t : r.timeline) {
    timeline.push_back({{"from", state_name(t.from)}, {"to", state_name(t.to)}, {"t", t.t}});
  }
  json durations = json::object();
  for (Movement m : kAllMovements) durations[std::to_string(code_of(m))] = r.ledger.seconds(m);
  return {{"format", kReportFormat},
          {"episode_id", episode_id},
          {"start_s", r.start_s},
          {"end_s", r.end_s},
          {"verdict", verdict_name(r.verdict)},
          {"durations_s", durations},
          {"missing", missing},
          {"total_active_s", r.total_active_s},
          {"total_required_s", r.total_required_s},
          {"total_short_by_s", r.total_short_by_s},
          {"timeline", timeline}};
}

std::string serialize_report(const EpisodeReport& r, std::string_view episode_id) {
  return report_to_json(r, episode_id).dump(2) + "\n";
}

std::string ledger_statistics_csv(std::string_view episode_id, const DurationLedger& ledger) {
  std::ostringstream out;
  out << "episode_id,movement_code,frames,seconds\n";
  for (Movement m : kAllMovements) {
    const std::int64_t ticks = ledger.ticks_of(m);
    if (ticks == 0) continue;
    char seconds[64];
    std::snprintf(seconds, sizeof(seconds), "%.6f", ledger.seconds(m));
    out << episode_id << "," << code_of(m) << "," << ticks << "," << seconds << "\n";
  }
  return out.str();
}

}  // namespace handwash
