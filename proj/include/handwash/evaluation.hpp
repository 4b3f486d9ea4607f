#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "handwash/movement.hpp"

namespace handwash {

/// Rows are ground truth, columns predictions, both in canonical class order.
class ConfusionMatrix {
 public:
  void add(Movement truth, Movement predicted, std::uint64_t count = 1) {
    counts_[index_of(truth)][index_of(predicted)] += count;
  }
  void merge(const ConfusionMatrix& other);

  std::uint64_t at(Movement truth, Movement predicted) const {
    return counts_[index_of(truth)][index_of(predicted)];
  }
  std::uint64_t total() const;
  std::uint64_t correct() const;
  /// trace / total; 0 for an empty matrix.
  double accuracy() const;

  /// Header row "truth\\pred,0,2,...,10" then one row per true class.
  std::string to_csv() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::array<std::array<std::uint64_t, kMovementCount>, kMovementCount> counts_{};
};

/// Throws ValidationError when the sequences differ in length.
ConfusionMatrix evaluate(std::span<const Movement> predictions, std::span<const Movement> truth);

}  // namespace handwash
