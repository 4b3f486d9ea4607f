#include "handwash/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "handwash/errors.hpp"
#include "handwash/image_ops.hpp"
#include "handwash/json_util.hpp"

namespace handwash {

double ClassScores::sum() const {
  double s = 0.0;
  for (double v : p) s += v;
  return s;
}

Movement ClassScores::argmax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < kMovementCount; ++i) {
    if (p[i] > p[best]) best = i;
  }
  return movement_at(best);
}

ClassScores ClassScores::one_hot(Movement m) {
  ClassScores s;
  s.p[index_of(m)] = 1.0;
  return s;
}

ClassScores ClassScores::from_logits(const std::array<double, kMovementCount>& logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  ClassScores s;
  double total = 0.0;
  for (std::size_t i = 0; i < kMovementCount; ++i) {
    s.p[i] = std::exp(logits[i] - top);
    total += s.p[i];
  }
  for (double& v : s.p) v /= total;
  return s;
}

std::string_view classifier_kind_name(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::Replay: return "replay";
    case ClassifierKind::Constant: return "constant";
    case ClassifierKind::External: return "external";
  }
  return "replay";
}

ClassifierKind classifier_kind_from_name(std::string_view name) {
  if (name == "replay") return ClassifierKind::Replay;
  if (name == "constant") return ClassifierKind::Constant;
  if (name == "external") return ClassifierKind::External;
  throw ConfigError("unknown classifier kind '" + std::string(name) + "'");
}

void ClassifierSpec::validate() const {
  if (input_size < 1) throw ConfigError("classifier input_size must be >= 1");
  if (!(noise_epsilon >= 0.0 && noise_epsilon <= 1.0)) {
    throw ConfigError("classifier noise_epsilon must lie in [0, 1]");
  }
  if (kind == ClassifierKind::External && model_path.empty()) {
    throw ConfigError("external classifier requires a model path");
  }
}

ReplayClassifier::ReplayClassifier(double epsilon, std::uint64_t seed) : epsilon_(epsilon), rng_(seed) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("replay epsilon must lie in [0, 1]");
}

ClassScores ReplayClassifier::classify(const Frame&, const FrameContext& ctx) {
  if (ctx.truth == nullptr) throw ClassifierError("replay classifier needs a ground-truth annotation");
  if (ctx.frame_index < 0 || ctx.frame_index >= ctx.truth->frame_count()) {
    throw ClassifierError("replay frame index " + std::to_string(ctx.frame_index) + " out of range [0, " +
                          std::to_string(ctx.truth->frame_count()) + ")");
  }
  const Movement truth = ctx.truth->labels[static_cast<std::size_t>(ctx.frame_index)];
  // Always draw, so the stream position does not depend on epsilon.
  const bool corrupt = uniform01(rng_) < epsilon_;
  const std::uint64_t pick = uniform_below(rng_, kMovementCount - 1);
  if (!corrupt) return ClassScores::one_hot(truth);
  std::size_t wrong = static_cast<std::size_t>(pick);
  if (wrong >= index_of(truth)) ++wrong;
  return ClassScores::one_hot(movement_at(wrong));
}

std::vector<double> LinearSoftmaxModel::features(const Frame& img) const {
  std::vector<double> out(feature_count(), 0.0);
  std::vector<int> counts(static_cast<std::size_t>(grid) * grid, 0);
  for (int y = 0; y < img.height; ++y) {
    const int gy = y * grid / img.height;
    for (int x = 0; x < img.width; ++x) {
      const int gx = x * grid / img.width;
      const std::size_t cell = static_cast<std::size_t>(gy) * grid + gx;
      ++counts[cell];
      for (int c = 0; c < 3; ++c) out[cell * 3 + c] += img.at(x, y, c);
    }
  }
  for (std::size_t cell = 0; cell < counts.size(); ++cell) {
    for (int c = 0; c < 3; ++c) {
      out[cell * 3 + c] = counts[cell] ? out[cell * 3 + c] / (255.0 * counts[cell]) : 0.0;
    }
  }
  return out;
}

ClassScores LinearSoftmaxModel::infer(const Frame& img) const {
  const std::vector<double> f = features(img);
  std::array<double, kMovementCount> logits = bias;
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t k = 0; k < kMovementCount; ++k) logits[k] += weights[i][k] * f[i];
  }
  return ClassScores::from_logits(logits);
}

LinearSoftmaxModel parse_model(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = json_util::parse_document(text);
    if (!doc.is_object()) throw ValidationError("model document must be an object");
    if (json_util::require_string(doc, "format", "model") != kModelFormat) {
      throw ValidationError("unsupported model format");
    }
    LinearSoftmaxModel m;
    m.input_size = static_cast<int>(json_util::require_int(doc, "input_size", "model"));
    m.grid = static_cast<int>(json_util::require_int(doc, "grid", "model"));
    if (m.input_size < 1 || m.grid < 1 || m.grid > m.input_size) {
      throw ValidationError("model input_size/grid out of range");
    }
    const auto& weights = json_util::require(doc, "weights", "model");
    const auto& bias = json_util::require(doc, "bias", "model");
    if (!weights.is_array() || weights.size() != m.feature_count()) {
      throw ValidationError("model weights must have " + std::to_string(m.feature_count()) + " rows");
    }
    if (!bias.is_array() || bias.size() != kMovementCount) {
      throw ValidationError("model bias must have 8 entries");
    }
    for (const auto& row : weights) {
      if (!row.is_array() || row.size() != kMovementCount) {
        throw ValidationError("model weight rows must have 8 entries");
      }
      std::array<double, kMovementCount> r{};
      for (std::size_t k = 0; k < kMovementCount; ++k) r[k] = row[k].get<double>();
      m.weights.push_back(r);
    }
    for (std::size_t k = 0; k < kMovementCount; ++k) m.bias[k] = bias[k].get<double>();
    return m;
  } catch (const ClassifierError&) {
    throw;
  } catch (const Error& e) {
    throw ClassifierError(std::string("cannot load model: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ClassifierError(std::string("cannot load model: ") + e.what());
  }
}

LinearSoftmaxModel load_model(const std::string& path) {
  std::string text;
  try {
    text = json_util::read_file(path);
  } catch (const IoError& e) {
    throw ClassifierError(std::string("cannot load model: ") + e.what());
  }
  return parse_model(text);
}

std::string serialize_model(const LinearSoftmaxModel& m) {
  nlohmann::json weights = nlohmann::json::array();
  for (const auto& row : m.weights) weights.push_back(row);
  const nlohmann::json doc = {{"format", kModelFormat}, {"input_size", m.input_size}, {"grid", m.grid},
                              {"weights", weights},     {"bias", m.bias}};
  return doc.dump() + "\n";
}

ExternalClassifier::ExternalClassifier(LinearSoftmaxModel model, int input_size)
    : model_(std::move(model)), input_size_(input_size) {
  if (model_.input_size != input_size_) {
    throw ClassifierError("model expects " + std::to_string(model_.input_size) + "x" +
                          std::to_string(model_.input_size) + " input, configured " +
                          std::to_string(input_size_));
  }
  if (model_.weights.size() != model_.feature_count()) throw ClassifierError("model weight shape mismatch");
}

ClassScores ExternalClassifier::classify(const Frame& f, const FrameContext&) {
  if (f.empty()) throw ClassifierError("external classifier needs pixel data");
  return model_.infer(preprocess(f, input_size_));
}

std::unique_ptr<Classifier> make_classifier(const ClassifierSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case ClassifierKind::Replay:
      return std::make_unique<ReplayClassifier>(spec.noise_epsilon, spec.seed);
    case ClassifierKind::Constant:
      return std::make_unique<ConstantClassifier>(spec.constant_code);
    case ClassifierKind::External:
      return std::make_unique<ExternalClassifier>(load_model(spec.model_path), spec.input_size);
  }
  throw ConfigError("unknown classifier kind");
}

}  // namespace handwash
