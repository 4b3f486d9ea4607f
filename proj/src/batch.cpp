#include "handwash/batch.hpp"

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "handwash/annotation.hpp"
#include "handwash/errors.hpp"
#include "handwash/y4m.hpp"

namespace handwash {

namespace {

std::string resolve(const std::string& base, const std::string& path) {
  if (base.empty() || path == "-" || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(base) / path).string();
}

}  // namespace

BatchResult batch_evaluate(const DatasetManifest& manifest, const ClassifierSpec& spec,
                           const BatchOptions& options) {
  std::vector<EpisodeAnnotation> truths;
  truths.reserve(manifest.entries.size());
  std::vector<std::int64_t> frame_counts;
  for (const ManifestEntry& e : manifest.entries) {
    if (e.annotation_paths.empty()) throw ValidationError("manifest entry '" + e.episode_id + "' has no annotation");
    const std::string path = resolve(options.base_dir, e.annotation_paths.front());
    if (!std::filesystem::exists(path)) throw IoError("missing annotation file '" + path + "'");
    EpisodeAnnotation a = load_annotation(path);
    if (a.frame_count() != e.frame_count) {
      throw ValidationError("annotation for '" + e.episode_id + "' has " + std::to_string(a.frame_count()) +
                            " frames, manifest says " + std::to_string(e.frame_count));
    }
    frame_counts.push_back(a.frame_count());
    truths.push_back(std::move(a));
  }

  std::int64_t total = 0;
  for (std::int64_t n : frame_counts) total += n;

  std::vector<std::int64_t> selected;
  if (options.split == EvalSplit::All) {
    selected.resize(static_cast<std::size_t>(total));
    for (std::int64_t i = 0; i < total; ++i) selected[static_cast<std::size_t>(i)] = i;
  } else if (options.episode_level) {
    selected = split_by_group(frame_counts, options.ratios, options.split_seed).test;
  } else {
    selected = split_dataset(total, options.ratios, options.split_seed).test;
  }

  auto classifier = make_classifier(spec);
  BatchResult result;
  std::size_t cursor = 0;  // into `selected`, which is sorted
  std::int64_t offset = 0;
  for (std::size_t e = 0; e < truths.size(); ++e) {
    const EpisodeAnnotation& truth = truths[e];
    const std::int64_t end = offset + truth.frame_count();
    if (cursor >= selected.size() || selected[cursor] >= end) {
      offset = end;
      continue;
    }
    EpisodeEvaluation eval;
    eval.episode_id = truth.episode_id;

    std::unique_ptr<Y4mReader> video;
    if (classifier->needs_pixels()) video = Y4mReader::open(resolve(options.base_dir, manifest.entries[e].video_path));
    std::int64_t video_pos = 0;
    Frame frame;

    for (; cursor < selected.size() && selected[cursor] < end; ++cursor) {
      const std::int64_t local = selected[cursor] - offset;
      if (video) {
        std::optional<Frame> f;
        while (video_pos <= local) {
          f = video->next();
          if (!f) throw ValidationError("video for '" + truth.episode_id + "' is shorter than its annotation");
          ++video_pos;
        }
        frame = std::move(*f);
      }
      const Movement predicted = classifier->classify(frame, FrameContext{local, &truth}).argmax();
      const Movement actual = truth.labels[static_cast<std::size_t>(local)];
      result.confusion.add(actual, predicted);
      ++eval.frames;
      if (predicted == actual) ++eval.correct;
    }
    result.episodes.push_back(std::move(eval));
    offset = end;
  }
  return result;
}

std::string episode_evaluations_csv(const BatchResult& r) {
  std::ostringstream out;
  out << "episode_id,frames,correct,accuracy\n";
  for (const EpisodeEvaluation& e : r.episodes) {
    char acc[32];
    std::snprintf(acc, sizeof(acc), "%.6f", e.accuracy());
    out << e.episode_id << "," << e.frames << "," << e.correct << "," << acc << "\n";
  }
  return out.str();
}

}  // namespace handwash
