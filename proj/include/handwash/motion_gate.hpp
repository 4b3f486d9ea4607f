#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "handwash/frame.hpp"
#include "handwash/kernels.hpp"

namespace handwash {

/// Mean absolute difference of 8x8 block-averaged luma, divided by 255.
/// Symmetric, 0 for identical frames, in [0, 1]. Throws ValidationError on
/// mismatched geometry.
double motion_score(const Frame& prev, const Frame& cur);
double motion_score(const Frame& prev, const Frame& cur, const kernels::KernelTable& k);

struct GateParams {
  double on_threshold = 0.02;
  double off_threshold = 0.01;
  double min_duration_s = 10.0;
  double max_gap_s = 2.0;

  void validate() const;
  friend bool operator==(const GateParams&, const GateParams&) = default;
};

enum class GatePhase { Quiet, MotionPending, Recording };

struct GateState {
  GatePhase phase = GatePhase::Quiet;
  std::optional<double> motion_start;
  std::optional<double> last_motion;
  std::optional<double> last_time;

  friend bool operator==(const GateState&, const GateState&) = default;
};

struct EpisodeSpan {
  double start = 0.0;
  double end = 0.0;

  double duration() const { return end - start; }
  friend bool operator==(const EpisodeSpan&, const EpisodeSpan&) = default;
};

enum class GateEventKind { None, EpisodeStarted, EpisodeEnded };

struct GateEvent {
  GateEventKind kind = GateEventKind::None;
  EpisodeSpan span;  // set for EpisodeEnded; start only for EpisodeStarted

  friend bool operator==(const GateEvent&, const GateEvent&) = default;
};

/// One step of the motion gate.
///
/// Quiet -> MotionPending when score >= on_threshold. While pending or
/// recording, a score >= off_threshold counts as continued motion and quiet
/// stretches up to max_gap_s are tolerated. Pending becomes Recording (event
/// EpisodeStarted) once motion has lasted longer than min_duration_s, and
/// Recording returns to Quiet (event EpisodeEnded, span = first to last
/// motion sample) after more than max_gap_s without motion.
///
/// Throws TimeOrderError unless t is greater than every earlier timestamp.
std::pair<GateState, GateEvent> update_gate(const GateState& g, double score, double t,
                                            const GateParams& params);

/// End-of-stream: closes an open recording.
std::pair<GateState, GateEvent> flush_gate(const GateState& g);

struct TimedScore {
  double t = 0.0;
  double score = 0.0;
};

/// Batch form: folds update_gate over `scores`, then flushes.
std::vector<EpisodeSpan> segment_episodes(std::span<const TimedScore> scores, const GateParams& params);

}  // namespace handwash
