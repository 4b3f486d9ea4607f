#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "handwash/errors.hpp"

namespace handwash {

/// Positive rational, always stored in lowest terms. Used for frame rates
/// (30000/1001 and friends) and engine time bases.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (num <= 0 || den <= 0) {
      throw ValidationError("rational must be positive, got " + std::to_string(num) + "/" +
                            std::to_string(den));
    }
    const std::int64_t g = std::gcd(num_, den_);
    num_ /= g;
    den_ /= g;
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// Seconds spanned by `count` periods of this rate (count / rate).
  double periods_to_seconds(std::int64_t count) const {
    return static_cast<double>(count) * static_cast<double>(den_) / static_cast<double>(num_);
  }

  friend bool operator==(const Rational&, const Rational&) = default;

 private:
  std::int64_t num_ = 1;
  std::int64_t den_ = 1;
};

}  // namespace handwash
