#pragma once

#include <cstdint>

#include "handwash/frame.hpp"
#include "handwash/kernels.hpp"

namespace handwash {

/// Bilinear resize with half-pixel centers and round-half-up quantization.
/// Keeps the channel count; the whole frame is mapped (aspect may change).
Frame resize_bilinear(const Frame& f, int out_width, int out_height);
Frame resize_bilinear(const Frame& f, int out_width, int out_height, const kernels::KernelTable& k);

/// Classifier input: size x size, 3 channels (gray input is replicated).
/// Throws ValidationError for an empty frame or size < 1.
Frame preprocess(const Frame& f, int size);

struct AugmentParams {
  bool flip = false;
  double angle_deg = 0.0;
};

inline constexpr double kMaxRotationDeg = 20.0;

/// Flip with probability 1/2, angle uniform in [-20, 20] degrees.
AugmentParams draw_augment_params(std::uint64_t seed);

/// Horizontal flip (if requested), then rotation about the image center with
/// bilinear sampling and edge replication at the border.
Frame apply_augment(const Frame& f, const AugmentParams& p);

inline Frame augment(const Frame& f, std::uint64_t seed) {
  return apply_augment(f, draw_augment_params(seed));
}

}  // namespace handwash
