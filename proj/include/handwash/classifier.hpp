#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "handwash/annotation.hpp"
#include "handwash/frame.hpp"
#include "handwash/movement.hpp"
#include "handwash/random.hpp"

namespace handwash {

/// Per-class confidences in canonical movement order (kAllMovements).
struct ClassScores {
  std::array<double, kMovementCount> p{};

  double of(Movement m) const { return p[index_of(m)]; }
  double sum() const;
  /// Highest score; ties go to the earliest class in canonical order.
  Movement argmax() const;

  static ClassScores one_hot(Movement m);
  /// Softmax over raw logits.
  static ClassScores from_logits(const std::array<double, kMovementCount>& logits);
};

enum class ClassifierKind { Replay, Constant, External };

std::string_view classifier_kind_name(ClassifierKind k);
ClassifierKind classifier_kind_from_name(std::string_view name);

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::Replay;
  int input_size = 224;
  double noise_epsilon = 0.0;       // replay only
  std::string model_path;           // external only
  Movement constant_code = Movement::Idle;
  std::uint64_t seed = 0;

  /// Throws ConfigError.
  void validate() const;
  friend bool operator==(const ClassifierSpec&, const ClassifierSpec&) = default;
};

/// What a classifier may know about the frame besides its pixels.
struct FrameContext {
  std::int64_t frame_index = 0;
  const EpisodeAnnotation* truth = nullptr;
};

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual ClassScores classify(const Frame& f, const FrameContext& ctx) = 0;
  /// False when the frame's pixel data is ignored (label-only replay works).
  virtual bool needs_pixels() const = 0;
};

/// Ground-truth oracle: the true label with probability 1 - epsilon,
/// otherwise a uniformly drawn wrong label. Owns its RNG, so one instance
/// serves one stream.
class ReplayClassifier final : public Classifier {
 public:
  ReplayClassifier(double epsilon, std::uint64_t seed);
  ClassScores classify(const Frame& f, const FrameContext& ctx) override;
  bool needs_pixels() const override { return false; }

 private:
  double epsilon_;
  Rng rng_;
};

class ConstantClassifier final : public Classifier {
 public:
  explicit ConstantClassifier(Movement code) : code_(code) {}
  ClassScores classify(const Frame&, const FrameContext&) override { return ClassScores::one_hot(code_); }
  bool needs_pixels() const override { return false; }

 private:
  Movement code_;
};

/// Serialized single-input single-output model: the preprocessed image is
/// average-pooled onto a grid x grid x 3 feature vector scaled to [0, 1],
/// followed by a linear layer and softmax.
struct LinearSoftmaxModel {
  int input_size = 224;
  int grid = 4;
  std::vector<std::array<double, kMovementCount>> weights;  // one row per feature
  std::array<double, kMovementCount> bias{};

  std::size_t feature_count() const { return static_cast<std::size_t>(grid) * grid * 3; }
  std::vector<double> features(const Frame& preprocessed) const;
  ClassScores infer(const Frame& preprocessed) const;
};

inline constexpr std::string_view kModelFormat = "handwash-linear-softmax/1";

/// Throws ClassifierError on unreadable files, wrong format or shapes.
LinearSoftmaxModel parse_model(std::string_view text);
LinearSoftmaxModel load_model(const std::string& path);
std::string serialize_model(const LinearSoftmaxModel& m);

class ExternalClassifier final : public Classifier {
 public:
  /// Throws ClassifierError if the model's input size differs from `input_size`.
  ExternalClassifier(LinearSoftmaxModel model, int input_size);
  ClassScores classify(const Frame& f, const FrameContext& ctx) override;
  bool needs_pixels() const override { return true; }

 private:
  LinearSoftmaxModel model_;
  int input_size_;
};

std::unique_ptr<Classifier> make_classifier(const ClassifierSpec& spec);

}  // namespace handwash
