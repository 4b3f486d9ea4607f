#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace handwash::kernels {

// Inner loops of motion scoring and resizing. Every variant must match the
// scalar reference bit for bit; tests/kernels_test.cpp checks this.
struct KernelTable {
  const char* name;

  /// y[i] = (77*r + 150*g + 29*b + 128) >> 8 over interleaved RGB.
  void (*luma_rgb)(const std::uint8_t* rgb, std::uint8_t* y, std::size_t pixels);

  /// sums[b] += row[8b] + ... + row[8b+7]; the last block may be partial.
  void (*accumulate_block_sums)(const std::uint8_t* row, std::uint32_t* sums, std::size_t width);

  void (*u8_to_f32)(const std::uint8_t* in, float* out, std::size_t n);

  /// out[j] = src[i0[j]] * w0[j] + src[i1[j]] * w1[j]
  void (*gather_lerp)(const float* src, const std::int32_t* i0, const std::int32_t* i1,
                      const float* w0, const float* w1, float* out, std::size_t n);

  /// out[j] = a[j] * wa + b[j] * wb
  void (*lerp_rows)(const float* a, const float* b, float wa, float wb, float* out, std::size_t n);

  /// out[j] = clamp(floor(in[j] + 0.5), 0, 255)
  void (*quantize_u8)(const float* in, std::uint8_t* out, std::size_t n);
};

const KernelTable& scalar_kernels();

/// nullptr when not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// Best variant for this CPU. Setting HANDWASH_FORCE_SCALAR=1 in the
/// environment pins the scalar reference.
const KernelTable& active_kernels();

/// Every variant usable on this machine, scalar first.
std::vector<const KernelTable*> available_kernels();

}  // namespace handwash::kernels
