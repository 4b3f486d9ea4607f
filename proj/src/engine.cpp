#include "handwash/engine.hpp"

#include <cmath>
#include <string>

#include "handwash/errors.hpp"

namespace handwash {

void ComplianceConfig::validate() const {
  if (!(total_duration_s > 0.0)) throw ConfigError("total_duration_s must be > 0");
  for (Movement m : required_movements) {
    if (m == Movement::Idle) throw ConfigError("idle (code 0) cannot be a required movement");
    auto it = per_movement_min_s.find(m);
    if (it == per_movement_min_s.end()) {
      throw ConfigError("missing per-movement minimum for required movement " +
                        std::to_string(code_of(m)));
    }
  }
  for (const auto& [m, seconds] : per_movement_min_s) {
    if (!(seconds >= 0.0)) {
      throw ConfigError("per-movement minimum for " + std::to_string(code_of(m)) + " must be >= 0");
    }
  }
  if (!(poll_period_s > 0.0)) throw ConfigError("poll_period_s must be > 0");
  if (smoothing_window < 1) throw ConfigError("smoothing_window must be >= 1");
  gate.validate();
  classifier.validate();
}

ComplianceConfig default_config() {
  ComplianceConfig cfg;
  for (Movement m : kWashingMovements) {
    cfg.required_movements.insert(m);
    cfg.per_movement_min_s[m] = (m == Movement::FaucetWithTowel) ? 1.0 : 5.0;
  }
  return cfg;
}

std::int64_t Timebase::to_ticks(double seconds) const {
  return std::llround(seconds * static_cast<double>(tps_.num()) / static_cast<double>(tps_.den()));
}

std::int64_t Timebase::threshold_ticks(double seconds) const {
  if (seconds <= 0.0) return 0;
  std::int64_t k = to_ticks(seconds);
  while (to_seconds(k) < seconds) ++k;
  while (k > 0 && to_seconds(k - 1) >= seconds) --k;
  return k;
}

std::int64_t DurationLedger::total_active_ticks() const {
  std::int64_t total = 0;
  for (Movement m : kAllMovements) {
    if (counts_toward_total(m)) total += ticks_of(m);
  }
  return total;
}

std::int64_t DurationLedger::all_ticks() const {
  std::int64_t total = 0;
  for (std::int64_t t : ticks) total += t;
  return total;
}

std::string_view state_name(EngineState s) {
  switch (s) {
    case EngineState::Waiting: return "waiting";
    case EngineState::InProgress: return "in_progress";
    case EngineState::Ok: return "ok";
    case EngineState::Failed: return "failed";
  }
  return "waiting";
}

std::string_view verdict_name(Verdict v) { return v == Verdict::Ok ? "ok" : "failed"; }

std::vector<Shortfall> shortfalls(const DurationLedger& ledger, const ComplianceConfig& cfg) {
  std::vector<Shortfall> out;
  for (Movement m : cfg.required_movements) {
    const double required = cfg.per_movement_min_s.at(m);
    if (ledger.ticks_of(m) >= ledger.timebase.threshold_ticks(required)) continue;
    const double actual = ledger.seconds(m);
    out.push_back({m, required, actual, required - actual});
  }
  return out;
}

Engine::Engine(ComplianceConfig cfg, Timebase timebase) : timebase_(timebase) {
  reconfigure(std::move(cfg));
}

void Engine::reconfigure(ComplianceConfig cfg) {
  if (state_ != EngineState::Waiting) {
    throw ConfigError("configuration can only change between episodes");
  }
  cfg.validate();
  cfg_ = std::move(cfg);
  min_ticks_.clear();
  for (Movement m : cfg_.required_movements) {
    min_ticks_[m] = timebase_.threshold_ticks(cfg_.per_movement_min_s.at(m));
  }
  total_ticks_ = timebase_.threshold_ticks(cfg_.total_duration_s);
  ledger_ = DurationLedger{timebase_, {}};
  publish();
}

bool Engine::predicate_met() const {
  if (ledger_.total_active_ticks() < total_ticks_) return false;
  for (const auto& [m, needed] : min_ticks_) {
    if (ledger_.ticks_of(m) < needed) return false;
  }
  return true;
}

EpisodeReport Engine::close_episode(double t, std::vector<EngineEvent>& events) {
  EpisodeReport report;
  report.start_s = episode_start_;
  report.end_s = last_on_t_;
  report.ledger = ledger_;
  report.total_active_s = ledger_.total_active_s();
  report.total_required_s = cfg_.total_duration_s;
  report.total_short_by_s = std::max(0.0, cfg_.total_duration_s - report.total_active_s);
  if (ledger_.total_active_ticks() >= total_ticks_) report.total_short_by_s = 0.0;
  report.missing = shortfalls(ledger_, cfg_);

  if (state_ == EngineState::Ok) {
    report.verdict = Verdict::Ok;
    timeline_.push_back({EngineState::Ok, EngineState::Waiting, t});
    report.timeline = timeline_;
    events.push_back({timeline_.back(), report});
  } else {
    report.verdict = Verdict::Failed;
    timeline_.push_back({EngineState::InProgress, EngineState::Failed, t});
    timeline_.push_back({EngineState::Failed, EngineState::Waiting, t});
    report.timeline = timeline_;
    events.push_back({timeline_[timeline_.size() - 2], report});
    events.push_back({timeline_.back(), std::nullopt});
  }

  state_ = EngineState::Waiting;
  movement_ = Movement::Idle;
  ledger_ = DurationLedger{timebase_, {}};
  timeline_.clear();
  return report;
}

std::vector<EngineEvent> Engine::tick(const Observation& obs) {
  if (last_t_ && !(obs.t > *last_t_)) {
    throw TimeOrderError("engine ticks must move forward in time: " + std::to_string(obs.t) +
                         " after " + std::to_string(*last_t_));
  }
  std::vector<EngineEvent> events;
  const std::optional<double> prev_t = last_t_;
  last_t_ = obs.t;

  switch (state_) {
    case EngineState::Waiting:
      if (obs.washing_on) {
        state_ = EngineState::InProgress;
        episode_start_ = obs.t;
        last_on_t_ = obs.t;
        movement_ = obs.movement;
        timeline_.push_back({EngineState::Waiting, EngineState::InProgress, obs.t});
        events.push_back({timeline_.back(), std::nullopt});
      }
      break;

    case EngineState::InProgress:
    case EngineState::Ok:
      if (obs.washing_on) {
        ledger_.ticks[index_of(obs.movement)] += timebase_.to_ticks(obs.t) - timebase_.to_ticks(*prev_t);
        last_on_t_ = obs.t;
        movement_ = obs.movement;
        if (state_ == EngineState::InProgress && predicate_met()) {
          state_ = EngineState::Ok;
          timeline_.push_back({EngineState::InProgress, EngineState::Ok, obs.t});
          events.push_back({timeline_.back(), std::nullopt});
        }
      } else {
        close_episode(obs.t, events);
      }
      break;

    case EngineState::Failed:  // transient; never observed between ticks
      break;
  }
  publish();
  return events;
}

std::optional<EpisodeReport> Engine::finalize(double t) {
  if (state_ != EngineState::InProgress && state_ != EngineState::Ok) return std::nullopt;
  if (last_t_ && t < *last_t_) {
    throw TimeOrderError("finalize time precedes the last tick");
  }
  std::vector<EngineEvent> events;
  EpisodeReport report = close_episode(t, events);
  last_t_ = t;
  publish();
  return report;
}

void Engine::publish() {
  EngineSnapshot s;
  s.state = state_;
  s.washing_on = state_ == EngineState::InProgress || state_ == EngineState::Ok;
  s.movement = s.washing_on ? movement_ : Movement::Idle;
  s.ledger = ledger_;
  s.episode_elapsed_s = s.washing_on ? last_on_t_ - episode_start_ : 0.0;
  s.t = last_t_.value_or(0.0);
  std::lock_guard lock(snapshot_mutex_);
  published_ = std::move(s);
}

EngineSnapshot Engine::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return published_;
}

PollResult Engine::poll() const {
  std::lock_guard lock(snapshot_mutex_);
  return {published_.washing_on, code_of(published_.movement)};
}

ReferenceResult reference_verdict(std::span<const TimedLabel> labels, const ComplianceConfig& cfg,
                                  Timebase timebase) {
  cfg.validate();
  ReferenceResult result;
  result.ledger.timebase = timebase;
  for (const TimedLabel& l : labels) {
    result.ledger.ticks[index_of(l.movement)] += timebase.to_ticks(l.duration_s);
  }
  if (labels.empty()) return result;

  std::int64_t washing_total = 0;
  for (const TimedLabel& l : labels) {
    if (l.movement != Movement::Idle && l.movement != Movement::FaucetWithTowel) {
      washing_total += timebase.to_ticks(l.duration_s);
    }
  }
  bool ok = washing_total >= timebase.threshold_ticks(cfg.total_duration_s);
  for (Movement m : cfg.required_movements) {
    ok = ok && result.ledger.ticks[index_of(m)] >= timebase.threshold_ticks(cfg.per_movement_min_s.at(m));
  }
  result.verdict = ok ? Verdict::Ok : Verdict::Failed;
  return result;
}

}  // namespace handwash
