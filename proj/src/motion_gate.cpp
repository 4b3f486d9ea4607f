#include <tuple>
#include "handwash/motion_gate.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "handwash/errors.hpp"

namespace handwash {

namespace {

constexpr int kBlock = 8;

std::vector<std::uint8_t> luma_plane(const Frame& f, const kernels::KernelTable& k) {
  if (f.channels == 1) return f.data;
  std::vector<std::uint8_t> y(f.pixel_count());
  k.luma_rgb(f.data.data(), y.data(), f.pixel_count());
  return y;
}

std::vector<std::uint32_t> block_sums(const std::vector<std::uint8_t>& luma, int width, int height,
                                      const kernels::KernelTable& k) {
  const int bw = (width + kBlock - 1) / kBlock;
  const int bh = (height + kBlock - 1) / kBlock;
  std::vector<std::uint32_t> sums(static_cast<std::size_t>(bw) * bh, 0);
  for (int y = 0; y < height; ++y) {
    k.accumulate_block_sums(luma.data() + static_cast<std::size_t>(y) * width,
                            sums.data() + static_cast<std::size_t>(y / kBlock) * bw,
                            static_cast<std::size_t>(width));
  }
  return sums;
}

}  // namespace

double motion_score(const Frame& prev, const Frame& cur) {
  return motion_score(prev, cur, kernels::active_kernels());
}

double motion_score(const Frame& prev, const Frame& cur, const kernels::KernelTable& k) {
  prev.validate();
  cur.validate();
  if (prev.width != cur.width || prev.height != cur.height || prev.channels != cur.channels) {
    throw ValidationError("motion_score: frame geometry mismatch");
  }
  if (cur.empty()) return 0.0;

  const int width = cur.width;
  const int height = cur.height;
  const auto sums_prev = block_sums(luma_plane(prev, k), width, height, k);
  const auto sums_cur = block_sums(luma_plane(cur, k), width, height, k);

  const int bw = (width + kBlock - 1) / kBlock;
  const int bh = (height + kBlock - 1) / kBlock;
  double total = 0.0;
  for (int by = 0; by < bh; ++by) {
    const int rows = std::min(kBlock, height - by * kBlock);
    for (int bx = 0; bx < bw; ++bx) {
      const int cols = std::min(kBlock, width - bx * kBlock);
      const std::size_t i = static_cast<std::size_t>(by) * bw + bx;
      const double diff = std::abs(static_cast<double>(sums_prev[i]) - static_cast<double>(sums_cur[i]));
      total += diff / (rows * cols);
    }
  }
  const double score = total / (static_cast<double>(bw) * bh) / 255.0;
  return std::min(1.0, std::max(0.0, score));
}

void GateParams::validate() const {
  if (!(on_threshold >= off_threshold)) {
    throw ConfigError("gate on_threshold must be >= off_threshold");
  }
  if (off_threshold < 0.0 || on_threshold > 1.0) throw ConfigError("gate thresholds must lie in [0, 1]");
  if (!(min_duration_s >= 0.0)) throw ConfigError("gate min_duration_s must be >= 0");
  if (!(max_gap_s >= 0.0)) throw ConfigError("gate max_gap_s must be >= 0");
}

std::pair<GateState, GateEvent> update_gate(const GateState& g, double score, double t,
                                            const GateParams& params) {
  if (g.last_time && !(t > *g.last_time)) {
    throw TimeOrderError("gate timestamps must increase: " + std::to_string(t) + " after " +
                         std::to_string(*g.last_time));
  }
  GateState next = g;
  next.last_time = t;
  GateEvent event;

  switch (g.phase) {
    case GatePhase::Quiet:
      if (score >= params.on_threshold) {
        next.phase = GatePhase::MotionPending;
        next.motion_start = t;
        next.last_motion = t;
      }
      break;

    case GatePhase::MotionPending:
      if (score >= params.off_threshold) {
        next.last_motion = t;
        if (t - *next.motion_start > params.min_duration_s) {
          next.phase = GatePhase::Recording;
          event.kind = GateEventKind::EpisodeStarted;
          event.span = {*next.motion_start, t};
        }
      } else if (t - *g.last_motion > params.max_gap_s) {
        next.phase = GatePhase::Quiet;
        next.motion_start.reset();
        next.last_motion.reset();
      }
      break;

    case GatePhase::Recording:
      if (score >= params.off_threshold) {
        next.last_motion = t;
      } else if (t - *g.last_motion > params.max_gap_s) {
        event.kind = GateEventKind::EpisodeEnded;
        event.span = {*g.motion_start, *g.last_motion};
        next.phase = GatePhase::Quiet;
        next.motion_start.reset();
        next.last_motion.reset();
      }
      break;
  }
  return {next, event};
}

std::pair<GateState, GateEvent> flush_gate(const GateState& g) {
  GateState next = g;
  GateEvent event;
  if (g.phase == GatePhase::Recording) {
    event.kind = GateEventKind::EpisodeEnded;
    event.span = {*g.motion_start, *g.last_motion};
  }
  next.phase = GatePhase::Quiet;
  next.motion_start.reset();
  next.last_motion.reset();
  return {next, event};
}

std::vector<EpisodeSpan> segment_episodes(std::span<const TimedScore> scores, const GateParams& params) {
  std::vector<EpisodeSpan> spans;
  GateState state;
  for (const TimedScore& s : scores) {
    GateEvent event;
    std::tie(state, event) = update_gate(state, s.score, s.t, params);
    if (event.kind == GateEventKind::EpisodeEnded) spans.push_back(event.span);
  }
  const auto [final_state, event] = flush_gate(state);
  if (event.kind == GateEventKind::EpisodeEnded) spans.push_back(event.span);
  return spans;
}

}  // namespace handwash
