#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace handwash {

/// Closed label alphabet. Values are the WHO guideline step numbers; 0 is
/// idle/other (no washing movement, or a frame nobody labeled).
enum class Movement : std::uint8_t {
  Idle = 0,
  PalmToPalm = 2,
  PalmOverDorsum = 3,
  FingersInterlaced = 4,
  BackOfFingers = 5,
  ThumbRub = 6,
  FingertipsToPalm = 7,
  FaucetWithTowel = 10,
};

inline constexpr std::size_t kMovementCount = 8;

/// Canonical order used by every per-class vector (scores, confusion rows).
inline constexpr std::array<Movement, kMovementCount> kAllMovements = {
    Movement::Idle,          Movement::PalmToPalm,    Movement::PalmOverDorsum,
    Movement::FingersInterlaced, Movement::BackOfFingers, Movement::ThumbRub,
    Movement::FingertipsToPalm,  Movement::FaucetWithTowel};

inline constexpr std::array<Movement, 7> kWashingMovements = {
    Movement::PalmToPalm,       Movement::PalmOverDorsum, Movement::FingersInterlaced,
    Movement::BackOfFingers,    Movement::ThumbRub,       Movement::FingertipsToPalm,
    Movement::FaucetWithTowel};

constexpr int code_of(Movement m) { return static_cast<int>(m); }

/// Position of `m` in kAllMovements.
constexpr std::size_t index_of(Movement m) {
  switch (m) {
    case Movement::Idle: return 0;
    case Movement::PalmToPalm: return 1;
    case Movement::PalmOverDorsum: return 2;
    case Movement::FingersInterlaced: return 3;
    case Movement::BackOfFingers: return 4;
    case Movement::ThumbRub: return 5;
    case Movement::FingertipsToPalm: return 6;
    case Movement::FaucetWithTowel: return 7;
  }
  return 0;
}

constexpr Movement movement_at(std::size_t index) { return kAllMovements.at(index); }

constexpr bool is_washing(Movement m) { return m != Movement::Idle; }

/// Rubbing movements 2-7 count toward the total washing time; turning off the
/// faucet (10) happens after washing and does not.
constexpr bool counts_toward_total(Movement m) {
  return m != Movement::Idle && m != Movement::FaucetWithTowel;
}

std::optional<Movement> movement_from_code(int code);
/// Throws ValidationError("unknown movement code N").
Movement movement_from_code_checked(int code);

std::string_view movement_name(Movement m);
std::optional<Movement> movement_from_name(std::string_view name);

}  // namespace handwash
