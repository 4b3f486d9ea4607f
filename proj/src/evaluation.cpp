#include "handwash/evaluation.hpp"

#include <sstream>

#include "handwash/errors.hpp"

namespace handwash {

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  for (std::size_t i = 0; i < kMovementCount; ++i) {
    for (std::size_t j = 0; j < kMovementCount; ++j) counts_[i][j] += other.counts_[i][j];
  }
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (const auto& row : counts_) {
    for (std::uint64_t c : row) t += c;
  }
  return t;
}

std::uint64_t ConfusionMatrix::correct() const {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < kMovementCount; ++i) t += counts_[i][i];
  return t;
}

double ConfusionMatrix::accuracy() const {
  const std::uint64_t n = total();
  return n == 0 ? 0.0 : static_cast<double>(correct()) / static_cast<double>(n);
}

std::string ConfusionMatrix::to_csv() const {
  std::ostringstream out;
  out << "truth\\pred";
  for (Movement m : kAllMovements) out << "," << code_of(m);
  out << "\n";
  for (std::size_t i = 0; i < kMovementCount; ++i) {
    out << code_of(movement_at(i));
    for (std::size_t j = 0; j < kMovementCount; ++j) out << "," << counts_[i][j];
    out << "\n";
  }
  return out.str();
}

ConfusionMatrix evaluate(std::span<const Movement> predictions, std::span<const Movement> truth) {
  if (predictions.size() != truth.size()) {
    throw ValidationError("evaluate: " + std::to_string(predictions.size()) + " predictions for " +
                          std::to_string(truth.size()) + " ground-truth labels");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predictions[i]);
  return cm;
}

}  // namespace handwash
