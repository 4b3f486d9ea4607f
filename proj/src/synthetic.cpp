#include "handwash/synthetic.hpp"

#include <charconv>
#include <cmath>

#include "handwash/errors.hpp"
#include "handwash/random.hpp"

namespace handwash {

void SyntheticEpisodeSpec::validate() const {
  for (const Segment& s : segments) {
    if (!(s.duration_s > 0.0)) throw ValidationError("segment durations must be > 0");
  }
  if (width < 8 || height < 8) throw ValidationError("synthetic frames must be at least 8x8");
}

std::vector<Segment> parse_segments(std::string_view text) {
  auto trim = [](std::string_view v) {
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
    while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
    return v;
  };
  std::vector<Segment> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    const std::string_view item = trim(text.substr(pos, comma - pos));
    pos = comma + 1;
    const auto colon = item.find(':');
    int code = 0;
    double seconds = 0.0;
    bool parsed = colon != std::string_view::npos;
    if (parsed) {
      const auto code_part = trim(item.substr(0, colon));
      const auto secs_part = trim(item.substr(colon + 1));
      const auto r1 = std::from_chars(code_part.data(), code_part.data() + code_part.size(), code);
      const auto r2 = std::from_chars(secs_part.data(), secs_part.data() + secs_part.size(), seconds);
      parsed = r1.ec == std::errc() && r1.ptr == code_part.data() + code_part.size() && r2.ec == std::errc() &&
               r2.ptr == secs_part.data() + secs_part.size();
    }
    if (!parsed) throw ValidationError("segment '" + std::string(item) + "' must look like code:seconds");
    if (!(seconds > 0.0)) throw ValidationError("segment '" + std::string(item) + "' must last > 0 s");
    out.push_back({movement_from_code_checked(code), seconds});
  }
  return out;
}

SyntheticRenderer::SyntheticRenderer(int width, int height, Rational fps, std::uint64_t seed)
    : width_(width), height_(height), fps_(fps), background_(width, height, 3) {
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (auto& px : background_.data) px = static_cast<std::uint8_t>(90 + uniform_below(rng, 40));
}

Frame SyntheticRenderer::render(std::int64_t frame_index, Movement label) const {
  Frame f = background_;
  f.timestamp = fps_.periods_to_seconds(frame_index);
  if (label == Movement::Idle) return f;

  constexpr int kPeriod = 16;
  const int pw = width_ / 2;
  const int ph = height_ / 2;
  // Patch drifts slowly; stripes scroll by half a period every frame.
  const int span_x = width_ - pw;
  const int drift = static_cast<int>(frame_index % (2 * std::max(1, span_x)));
  const int x0 = drift <= span_x ? drift : 2 * span_x - drift;
  const int y0 = (height_ - ph) / 2;
  const int phase = static_cast<int>((frame_index % 2) * (kPeriod / 2));
  const int code = code_of(label);
  const std::uint8_t light[3] = {static_cast<std::uint8_t>(200 + code * 5), 170,
                                 static_cast<std::uint8_t>(120 + code * 10)};
  const std::uint8_t dark[3] = {40, static_cast<std::uint8_t>(20 + code * 8), 30};
  for (int y = y0; y < y0 + ph; ++y) {
    for (int x = x0; x < x0 + pw; ++x) {
      const bool on = ((x + phase) / (kPeriod / 2)) % 2 == 0;
      for (int c = 0; c < 3; ++c) f.at(x, y, c) = on ? light[c] : dark[c];
    }
  }
  return f;
}

Frame SyntheticEpisode::frame(std::int64_t i) const {
  if (!renderer) throw ValidationError("synthetic episode was generated without frames");
  return renderer->render(i, annotation.labels.at(static_cast<std::size_t>(i)));
}

SyntheticEpisode generate_synthetic_episode(const SyntheticEpisodeSpec& spec) {
  spec.validate();
  SyntheticEpisode ep;
  ep.annotation.episode_id = spec.episode_id;
  ep.annotation.fps = spec.fps;
  ep.annotation.annotator_id = "synthetic";
  double elapsed = 0.0;
  std::int64_t emitted = 0;
  for (const Segment& s : spec.segments) {
    elapsed += s.duration_s;
    const std::int64_t end = std::llround(elapsed * spec.fps.value());
    if (end > emitted) ep.annotation.labels.insert(ep.annotation.labels.end(), end - emitted, s.movement);
    emitted = std::max(emitted, end);
  }
  if (spec.render_frames) ep.renderer.emplace(spec.width, spec.height, spec.fps, spec.seed);
  return ep;
}

}  // namespace handwash
