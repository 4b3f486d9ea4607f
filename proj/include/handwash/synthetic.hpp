#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "handwash/annotation.hpp"
#include "handwash/frame.hpp"

namespace handwash {

struct Segment {
  Movement movement = Movement::Idle;
  double duration_s = 0.0;
};

struct SyntheticEpisodeSpec {
  std::string episode_id = "synthetic";
  std::vector<Segment> segments;
  Rational fps{30, 1};
  std::uint64_t seed = 0;
  bool render_frames = false;
  int width = 160;
  int height = 120;

  /// Throws ValidationError on non-positive durations or frame size.
  void validate() const;
};

/// Parses "2:1.0,0:0.5,3:1" into segments.
std::vector<Segment> parse_segments(std::string_view text);

/// Crude renderer: static noise background; during washing frames a
/// striped patch whose stripes scroll half a period per frame, so block
/// luma changes every washing frame and never during idle ones.
class SyntheticRenderer {
 public:
  SyntheticRenderer(int width, int height, Rational fps, std::uint64_t seed);
  Frame render(std::int64_t frame_index, Movement label) const;

 private:
  int width_;
  int height_;
  Rational fps_;
  Frame background_;
};

struct SyntheticEpisode {
  EpisodeAnnotation annotation;
  std::optional<SyntheticRenderer> renderer;

  /// Frame `i` of the rendered stream; requires a renderer.
  Frame frame(std::int64_t i) const;
};

/// Segment boundaries fall at round(cumulative_seconds * fps), so
/// rounding never accumulates across segments.
SyntheticEpisode generate_synthetic_episode(const SyntheticEpisodeSpec& spec);

}  // namespace handwash
