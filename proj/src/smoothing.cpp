#include "handwash/smoothing.hpp"

#include <array>
#include <vector>

#include "handwash/errors.hpp"

namespace handwash {

Movement smooth(std::span<const Movement> window) {
  if (window.empty()) throw ValidationError("smoothing window is empty");
  std::array<std::size_t, kMovementCount> votes{};
  std::array<std::size_t, kMovementCount> last_seen{};
  for (std::size_t i = 0; i < window.size(); ++i) {
    const std::size_t k = index_of(window[i]);
    ++votes[k];
    last_seen[k] = i;
  }
  std::size_t best = index_of(window.back());
  for (std::size_t k = 0; k < kMovementCount; ++k) {
    if (votes[k] > votes[best] || (votes[k] == votes[best] && votes[k] > 0 && last_seen[k] > last_seen[best])) {
      best = k;
    }
  }
  return movement_at(best);
}

MajoritySmoother::MajoritySmoother(std::size_t window) : window_(window) {
  if (window_ == 0) throw ValidationError("smoothing window must be >= 1");
}

Movement MajoritySmoother::push(Movement label) {
  history_.push_back(label);
  if (history_.size() > window_) history_.pop_front();
  const std::vector<Movement> snapshot(history_.begin(), history_.end());
  return smooth(snapshot);
}

}  // namespace handwash
