#pragma once

#include <cstddef>
#include <deque>
#include <span>

#include "handwash/movement.hpp"

namespace handwash {

/// Majority vote over `window` (oldest first). Ties go to whichever tied
/// label occurred most recently. Throws ValidationError on an empty window.
Movement smooth(std::span<const Movement> window);

inline constexpr std::size_t kDefaultSmoothingWindow = 15;

/// Streaming form: keeps the last W labels and votes on every push.
class MajoritySmoother {
 public:
  explicit MajoritySmoother(std::size_t window = kDefaultSmoothingWindow);

  Movement push(Movement label);
  void reset() { history_.clear(); }
  std::size_t window() const { return window_; }

 private:
  std::size_t window_;
  std::deque<Movement> history_;
};

}  // namespace handwash
