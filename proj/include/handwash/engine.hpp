#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "handwash/classifier.hpp"
#include "handwash/motion_gate.hpp"
#include "handwash/movement.hpp"
#include "handwash/rational.hpp"

namespace handwash {

struct ComplianceConfig {
  double total_duration_s = 40.0;
  std::set<Movement> required_movements;
  std::map<Movement, double> per_movement_min_s;
  double poll_period_s = 0.5;
  GateParams gate;
  std::size_t smoothing_window = 15;
  ClassifierSpec classifier;

  /// Throws ConfigError.
  void validate() const;
  friend bool operator==(const ComplianceConfig&, const ComplianceConfig&) = default;
};

/// 40 s total; movements 2-7 at 5 s each and 10 (faucet) at 1 s all required.
ComplianceConfig default_config();

/// Integer clock used for duration bookkeeping. Timestamps are rounded to
/// the nearest tick once, so per-movement sums are exact and independent of
/// the order in which intervals are added.
class Timebase {
 public:
  Timebase() = default;
  explicit Timebase(Rational ticks_per_second) : tps_(ticks_per_second) {}

  static Timebase microseconds() { return Timebase(Rational(1'000'000, 1)); }
  /// One tick per frame.
  static Timebase frames(Rational fps) { return Timebase(fps); }

  Rational ticks_per_second() const { return tps_; }
  std::int64_t to_ticks(double seconds) const;
  double to_seconds(std::int64_t ticks) const { return tps_.periods_to_seconds(ticks); }
  /// Smallest tick count whose duration is >= `seconds`.
  std::int64_t threshold_ticks(double seconds) const;

  friend bool operator==(const Timebase&, const Timebase&) = default;

 private:
  Rational tps_{1'000'000, 1};
};

struct DurationLedger {
  Timebase timebase;
  std::array<std::int64_t, kMovementCount> ticks{};

  std::int64_t ticks_of(Movement m) const { return ticks[index_of(m)]; }
  double seconds(Movement m) const { return timebase.to_seconds(ticks_of(m)); }
  /// Sum over movements that count toward the washing total (2-7).
  std::int64_t total_active_ticks() const;
  double total_active_s() const { return timebase.to_seconds(total_active_ticks()); }
  std::int64_t all_ticks() const;

  friend bool operator==(const DurationLedger&, const DurationLedger&) = default;
};

enum class EngineState { Waiting, InProgress, Ok, Failed };
enum class Verdict { Ok, Failed };

std::string_view state_name(EngineState s);
std::string_view verdict_name(Verdict v);

struct Shortfall {
  Movement movement = Movement::Idle;
  double required_s = 0.0;
  double actual_s = 0.0;
  double short_by_s = 0.0;

  friend bool operator==(const Shortfall&, const Shortfall&) = default;
};

struct Transition {
  EngineState from = EngineState::Waiting;
  EngineState to = EngineState::Waiting;
  double t = 0.0;

  friend bool operator==(const Transition&, const Transition&) = default;
};

struct EpisodeReport {
  double start_s = 0.0;
  double end_s = 0.0;
  Verdict verdict = Verdict::Failed;
  DurationLedger ledger;
  std::vector<Shortfall> missing;
  double total_active_s = 0.0;
  double total_required_s = 0.0;
  double total_short_by_s = 0.0;
  std::vector<Transition> timeline;

  friend bool operator==(const EpisodeReport&, const EpisodeReport&) = default;
};

struct EngineSnapshot {
  EngineState state = EngineState::Waiting;
  bool washing_on = false;
  Movement movement = Movement::Idle;
  DurationLedger ledger;
  double episode_elapsed_s = 0.0;
  double t = 0.0;

  friend bool operator==(const EngineSnapshot&, const EngineSnapshot&) = default;
};

/// The two polled variables.
struct PollResult {
  bool washing = false;
  int movement = 0;

  friend bool operator==(const PollResult&, const PollResult&) = default;
};

struct Observation {
  bool washing_on = false;
  Movement movement = Movement::Idle;
  double t = 0.0;
};

struct EngineEvent {
  Transition transition;
  std::optional<EpisodeReport> report;  // set on the transition that ends an episode
};

/// Washing-quality state machine.
///
///   Waiting --washing on--> InProgress --predicate met--> Ok
///   InProgress --washing off--> Failed --> Waiting (report)
///   Ok --washing off--> Waiting (report)
///
/// The interval between consecutive ticks is credited to the movement seen
/// at the later tick; the first tick of an episode credits nothing. Ok is
/// kept until washing stops. Single writer: tick/finalize/reconfigure must
/// not race each other. snapshot() and poll() may be called from any thread.
class Engine {
 public:
  explicit Engine(ComplianceConfig cfg, Timebase timebase = Timebase::microseconds());

  /// Throws TimeOrderError unless t is later than the previous tick.
  std::vector<EngineEvent> tick(const Observation& obs);

  /// Closes an open episode as if washing stopped at t; nullopt if none.
  std::optional<EpisodeReport> finalize(double t);

  /// Swaps the configuration. Only allowed in Waiting; throws ConfigError
  /// otherwise.
  void reconfigure(ComplianceConfig cfg);

  EngineSnapshot snapshot() const;
  PollResult poll() const;
  const ComplianceConfig& config() const { return cfg_; }
  const Timebase& timebase() const { return timebase_; }
  EngineState state() const { return state_; }

 private:
  bool predicate_met() const;
  EpisodeReport close_episode(double t, std::vector<EngineEvent>& events);
  void publish();

  ComplianceConfig cfg_;
  Timebase timebase_;
  std::map<Movement, std::int64_t> min_ticks_;
  std::int64_t total_ticks_ = 0;

  EngineState state_ = EngineState::Waiting;
  DurationLedger ledger_;
  Movement movement_ = Movement::Idle;
  std::optional<double> last_t_;
  double episode_start_ = 0.0;
  double last_on_t_ = 0.0;
  std::vector<Transition> timeline_;

  mutable std::mutex snapshot_mutex_;
  EngineSnapshot published_;
};

/// Builds the report fields that depend only on a final ledger.
std::vector<Shortfall> shortfalls(const DurationLedger& ledger, const ComplianceConfig& cfg);

struct TimedLabel {
  Movement movement = Movement::Idle;
  double duration_s = 0.0;
};

struct ReferenceResult {
  Verdict verdict = Verdict::Failed;
  DurationLedger ledger;
};

/// Brute-force oracle: sums each label's duration directly and checks the
/// completion predicate once at the end. Empty input is Failed.
ReferenceResult reference_verdict(std::span<const TimedLabel> labels, const ComplianceConfig& cfg,
                                  Timebase timebase = Timebase::microseconds());

}  // namespace handwash
