#include <cmath>

#include "handwash/kernels.hpp"

namespace handwash::kernels {

namespace {

void luma_rgb(const std::uint8_t* rgb, std::uint8_t* y, std::size_t pixels) {
  for (std::size_t i = 0; i < pixels; ++i) {
    const unsigned r = rgb[3 * i];
    const unsigned g = rgb[3 * i + 1];
    const unsigned b = rgb[3 * i + 2];
    y[i] = static_cast<std::uint8_t>((77 * r + 150 * g + 29 * b + 128) >> 8);
  }
}

void accumulate_block_sums(const std::uint8_t* row, std::uint32_t* sums, std::size_t width) {
  for (std::size_t x = 0; x < width; ++x) sums[x >> 3] += row[x];
}

void u8_to_f32(const std::uint8_t* in, float* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>(in[i]);
}

void gather_lerp(const float* src, const std::int32_t* i0, const std::int32_t* i1, const float* w0,
                 const float* w1, float* out, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const float left = src[i0[j]] * w0[j];
    const float right = src[i1[j]] * w1[j];
    out[j] = left + right;
  }
}

void lerp_rows(const float* a, const float* b, float wa, float wb, float* out, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const float top = a[j] * wa;
    const float bottom = b[j] * wb;
    out[j] = top + bottom;
  }
}

void quantize_u8(const float* in, std::uint8_t* out, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    float v = std::floor(in[j] + 0.5f);
    v = v < 0.0f ? 0.0f : (v > 255.0f ? 255.0f : v);
    out[j] = static_cast<std::uint8_t>(v);
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar",  luma_rgb,  accumulate_block_sums, u8_to_f32,
                                 gather_lerp, lerp_rows, quantize_u8};
  return table;
}

}  // namespace handwash::kernels
