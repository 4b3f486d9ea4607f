#include "handwash/annotation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "handwash/errors.hpp"
#include "handwash/json_util.hpp"

namespace handwash {

using nlohmann::json;

std::vector<LabelRun> to_runs(const std::vector<Movement>& labels) {
  std::vector<LabelRun> runs;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!runs.empty() && runs.back().code == labels[i]) {
      runs.back().end = static_cast<std::int64_t>(i) + 1;
    } else {
      runs.push_back({static_cast<std::int64_t>(i), static_cast<std::int64_t>(i) + 1, labels[i]});
    }
  }
  return runs;
}

namespace {

Rational parse_fps(const json& j) {
  if (!j.is_object()) throw ValidationError("fps must be an object {num, den}");
  const auto num = json_util::require_int(j, "num", "fps");
  const auto den = json_util::require_int(j, "den", "fps");
  if (num <= 0 || den <= 0) throw ValidationError("fps must be positive");
  return Rational(num, den);
}

Attributes parse_attributes(const json& j) {
  if (!j.is_object()) throw ValidationError("attributes must be an object");
  Attributes attrs;
  attrs.ring = json_util::require_bool(j, "ring", "attributes");
  attrs.watch = json_util::require_bool(j, "watch", "attributes");
  attrs.lacquered_nails = json_util::require_bool(j, "lacquered_nails", "attributes");
  return attrs;
}

}  // namespace

EpisodeAnnotation parse_annotation(std::string_view text) {
  const json doc = json_util::parse_document(text);
  if (!doc.is_object()) throw ValidationError("annotation document must be an object");

  const std::string format = json_util::require_string(doc, "format", "annotation");
  if (format != kAnnotationFormat) {
    throw ValidationError("unsupported annotation format '" + format + "'");
  }

  EpisodeAnnotation a;
  a.episode_id = json_util::require_string(doc, "episode_id", "annotation");
  a.annotator_id = json_util::require_string(doc, "annotator_id", "annotation");
  a.fps = parse_fps(json_util::require(doc, "fps", "annotation"));
  a.attributes = parse_attributes(json_util::require(doc, "attributes", "annotation"));
  const std::int64_t frame_count = json_util::require_int(doc, "frame_count", "annotation");
  if (frame_count < 0) throw ValidationError("frame_count must be >= 0");

  const json& runs_json = json_util::require(doc, "runs", "annotation");
  if (!runs_json.is_array()) throw ValidationError("runs must be an array");

  std::vector<LabelRun> runs;
  runs.reserve(runs_json.size());
  for (const json& r : runs_json) {
    if (!r.is_object()) throw ValidationError("each run must be an object");
    LabelRun run;
    run.start = json_util::require_int(r, "start_frame", "run");
    run.end = json_util::require_int(r, "end_frame_exclusive", "run");
    run.code = movement_from_code_checked(static_cast<int>(json_util::require_int(r, "code", "run")));
    if (run.start < 0 || run.end <= run.start) {
      throw ValidationError("invalid run [" + std::to_string(run.start) + ", " +
                            std::to_string(run.end) + ")");
    }
    runs.push_back(run);
  }
  std::sort(runs.begin(), runs.end(),
            [](const LabelRun& x, const LabelRun& y) { return x.start < y.start; });

  std::int64_t covered = 0;
  for (const LabelRun& run : runs) {
    if (run.start > covered) {
      throw ValidationError("frame gap at frames [" + std::to_string(covered) + ", " +
                            std::to_string(run.start) + ")");
    }
    if (run.start < covered) {
      throw ValidationError("overlapping runs at frame " + std::to_string(run.start));
    }
    covered = run.end;
  }
  if (covered != frame_count) {
    if (covered < frame_count) {
      throw ValidationError("frame gap at frames [" + std::to_string(covered) + ", " +
                            std::to_string(frame_count) + ")");
    }
    throw ValidationError("runs extend past frame_count " + std::to_string(frame_count));
  }

  a.labels.reserve(static_cast<std::size_t>(frame_count));
  for (const LabelRun& run : runs) {
    a.labels.insert(a.labels.end(), static_cast<std::size_t>(run.end - run.start), run.code);
  }
  return a;
}

std::string serialize_annotation(const EpisodeAnnotation& a) {
  json runs = json::array();
  for (const LabelRun& run : to_runs(a.labels)) {
    runs.push_back({{"start_frame", run.start},
                    {"end_frame_exclusive", run.end},
                    {"code", code_of(run.code)}});
  }
  const json doc = {
      {"format", kAnnotationFormat},
      {"episode_id", a.episode_id},
      {"annotator_id", a.annotator_id},
      {"fps", {{"num", a.fps.num()}, {"den", a.fps.den()}}},
      {"frame_count", a.frame_count()},
      {"attributes",
       {{"ring", a.attributes.ring},
        {"watch", a.attributes.watch},
        {"lacquered_nails", a.attributes.lacquered_nails}}},
      {"runs", std::move(runs)},
  };
  return doc.dump(2) + "\n";
}

EpisodeAnnotation load_annotation(const std::string& path) {
  return parse_annotation(json_util::read_file(path));
}

void save_annotation(const EpisodeAnnotation& a, const std::string& path) {
  json_util::write_file(path, serialize_annotation(a));
}

std::int64_t MovementDurations::total_frames() const {
  std::int64_t total = 0;
  for (std::int64_t f : frames) total += f;
  return total;
}

MovementDurations movement_durations(const EpisodeAnnotation& a) {
  MovementDurations d;
  d.fps = a.fps;
  for (Movement m : a.labels) ++d.frames[index_of(m)];
  return d;
}

namespace {

void require_compatible(const EpisodeAnnotation& a, const EpisodeAnnotation& b) {
  if (a.episode_id != b.episode_id) {
    throw IncompatibleAnnotationsError("episode ids differ: '" + a.episode_id + "' vs '" +
                                       b.episode_id + "'");
  }
  if (a.frame_count() != b.frame_count()) {
    throw IncompatibleAnnotationsError("frame counts differ: " + std::to_string(a.frame_count()) +
                                       " vs " + std::to_string(b.frame_count()));
  }
  if (a.fps != b.fps) throw IncompatibleAnnotationsError("frame rates differ");
}

}  // namespace

EpisodeAnnotation merge_annotations(const EpisodeAnnotation& a, const EpisodeAnnotation& b,
                                    MergePolicy policy) {
  require_compatible(a, b);
  EpisodeAnnotation out = a;
  out.attributes.ring = a.attributes.ring || b.attributes.ring;
  out.attributes.watch = a.attributes.watch || b.attributes.watch;
  out.attributes.lacquered_nails = a.attributes.lacquered_nails || b.attributes.lacquered_nails;
  if (policy == MergePolicy::Intersect) {
    for (std::size_t i = 0; i < out.labels.size(); ++i) {
      if (a.labels[i] != b.labels[i]) out.labels[i] = Movement::Idle;
    }
    if (a.annotator_id != b.annotator_id) out.annotator_id = a.annotator_id + "+" + b.annotator_id;
  }
  return out;
}

Agreement agreement(const EpisodeAnnotation& a, const EpisodeAnnotation& b) {
  require_compatible(a, b);
  const std::int64_t n = a.frame_count();
  if (n == 0) throw ValidationError("agreement is undefined for an empty episode");

  std::int64_t matches = 0;
  std::array<std::int64_t, kMovementCount> count_a{};
  std::array<std::int64_t, kMovementCount> count_b{};
  for (std::int64_t i = 0; i < n; ++i) {
    if (a.labels[i] == b.labels[i]) ++matches;
    ++count_a[index_of(a.labels[i])];
    ++count_b[index_of(b.labels[i])];
  }
  // Products are commutative, so the expected agreement is bit-identical
  // whichever argument comes first.
  long double chance_numerator = 0;
  for (std::size_t k = 0; k < kMovementCount; ++k) {
    chance_numerator += static_cast<long double>(count_a[k]) * count_b[k];
  }
  const long double nn = static_cast<long double>(n) * n;
  const long double p_o = static_cast<long double>(matches) / n;
  const long double p_e = chance_numerator / nn;

  Agreement result;
  result.percent = static_cast<double>(p_o);
  result.kappa = (p_e >= 1.0L) ? 1.0 : static_cast<double>((p_o - p_e) / (1.0L - p_e));
  return result;
}

std::string statistics_csv(std::string_view episode_id, const MovementDurations& d) {
  std::ostringstream out;
  out << kStatisticsHeader << "\n";
  for (Movement m : kAllMovements) {
    const std::int64_t frames = d.frames_of(m);
    if (frames == 0) continue;
    char seconds[64];
    std::snprintf(seconds, sizeof(seconds), "%.6f", d.seconds(m));
    out << episode_id << "," << code_of(m) << "," << frames << "," << seconds << "\n";
  }
  return out.str();
}

}  // namespace handwash
