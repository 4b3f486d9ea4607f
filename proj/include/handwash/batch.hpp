#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "handwash/classifier.hpp"
#include "handwash/dataset.hpp"
#include "handwash/evaluation.hpp"

namespace handwash {

enum class EvalSplit { Test, All };

struct BatchOptions {
  EvalSplit split = EvalSplit::Test;
  SplitRatios ratios;
  std::uint64_t split_seed = 0;
  /// Split whole episodes instead of individual frames.
  bool episode_level = false;
  /// Relative manifest paths are resolved against this directory.
  std::string base_dir;
};

struct EpisodeEvaluation {
  std::string episode_id;
  std::int64_t frames = 0;
  std::uint64_t correct = 0;

  double accuracy() const { return frames == 0 ? 0.0 : static_cast<double>(correct) / frames; }
};

struct BatchResult {
  ConfusionMatrix confusion;
  std::vector<EpisodeEvaluation> episodes;  // only episodes with evaluated frames
};

/// Per-frame classification of the chosen split against the first
/// annotation of every manifest entry. Throws IoError for missing files and
/// ValidationError when an annotation disagrees with its manifest entry.
BatchResult batch_evaluate(const DatasetManifest& manifest, const ClassifierSpec& classifier,
                           const BatchOptions& options = {});

/// "episode_id,frames,correct,accuracy" rows.
std::string episode_evaluations_csv(const BatchResult& r);

}  // namespace handwash
