#include "handwash/movement.hpp"

#include <string>

#include "handwash/errors.hpp"

namespace handwash {

namespace {

constexpr std::array<std::string_view, kMovementCount> kNames = {
    "idle",           "palm_to_palm", "palm_over_dorsum",   "fingers_interlaced",
    "back_of_fingers", "thumb_rub",   "fingertips_to_palm", "faucet_with_towel"};

}  // namespace

std::optional<Movement> movement_from_code(int code) {
  for (Movement m : kAllMovements) {
    if (code_of(m) == code) return m;
  }
  return std::nullopt;
}

Movement movement_from_code_checked(int code) {
  if (auto m = movement_from_code(code)) return *m;
  throw ValidationError("unknown movement code " + std::to_string(code));
}

std::string_view movement_name(Movement m) { return kNames[index_of(m)]; }

std::optional<Movement> movement_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kMovementCount; ++i) {
    if (kNames[i] == name) return kAllMovements[i];
  }
  return std::nullopt;
}

}  // namespace handwash
