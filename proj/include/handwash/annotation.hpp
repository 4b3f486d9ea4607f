#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "handwash/movement.hpp"
#include "handwash/rational.hpp"

namespace handwash {

/// Per-person flags. They describe the washer, not a gesture, so they are
/// stored once per episode.
struct Attributes {
  bool ring = false;
  bool watch = false;
  bool lacquered_nails = false;

  friend bool operator==(const Attributes&, const Attributes&) = default;
};

/// One annotator's labeling of one episode. `labels` is dense: element i is
/// the label of frame i, and unlabeled frames hold Movement::Idle.
struct EpisodeAnnotation {
  std::string episode_id;
  Rational fps{30, 1};
  std::string annotator_id;
  Attributes attributes;
  std::vector<Movement> labels;

  std::int64_t frame_count() const { return static_cast<std::int64_t>(labels.size()); }

  friend bool operator==(const EpisodeAnnotation&, const EpisodeAnnotation&) = default;
};

/// Half-open run [start, end) of identical labels.
struct LabelRun {
  std::int64_t start = 0;
  std::int64_t end = 0;
  Movement code = Movement::Idle;

  friend bool operator==(const LabelRun&, const LabelRun&) = default;
};

/// Maximal runs of the dense track, in frame order.
std::vector<LabelRun> to_runs(const std::vector<Movement>& labels);

inline constexpr std::string_view kAnnotationFormat = "handwash-annotation/1";

/// Parses the run-length encoded annotation document. Throws ParseError for
/// malformed JSON (with line/column) and ValidationError for unknown codes,
/// gaps, overlaps or bad header fields.
EpisodeAnnotation parse_annotation(std::string_view text);

/// Canonical form: keys sorted, runs sorted by start and maximally merged,
/// two-space indentation, trailing newline.
std::string serialize_annotation(const EpisodeAnnotation& a);

EpisodeAnnotation load_annotation(const std::string& path);
void save_annotation(const EpisodeAnnotation& a, const std::string& path);

/// Frame counts per class; seconds are derived from the frame rate.
struct MovementDurations {
  Rational fps{30, 1};
  std::array<std::int64_t, kMovementCount> frames{};

  std::int64_t frames_of(Movement m) const { return frames[index_of(m)]; }
  double seconds(Movement m) const { return fps.periods_to_seconds(frames_of(m)); }
  std::int64_t total_frames() const;
  double total_seconds() const { return fps.periods_to_seconds(total_frames()); }
};

MovementDurations movement_durations(const EpisodeAnnotation& a);

enum class MergePolicy { Intersect, PreferFirst };

/// Combines two annotations of the same episode. Intersect keeps agreeing
/// frames and sets disagreements to idle. Attributes are OR-ed.
EpisodeAnnotation merge_annotations(const EpisodeAnnotation& a, const EpisodeAnnotation& b,
                                    MergePolicy policy);

struct Agreement {
  double percent = 0.0;
  double kappa = 0.0;
};

/// Frame-level percent agreement and Cohen's kappa. Kappa is 1 when both
/// tracks use the same single label throughout (chance agreement is 1).
Agreement agreement(const EpisodeAnnotation& a, const EpisodeAnnotation& b);

inline constexpr std::string_view kStatisticsHeader = "episode_id,movement_code,frames,seconds";

/// Per-episode statistics CSV: one row per movement present, code order.
std::string statistics_csv(std::string_view episode_id, const MovementDurations& d);

}  // namespace handwash
