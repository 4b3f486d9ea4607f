#include <immintrin.h>

#include <cmath>

#include "handwash/kernels.hpp"

namespace handwash::kernels {

namespace {

// Deinterleave 16 RGB pixels held in three 16-byte registers.
inline void split_rgb16(const std::uint8_t* p, __m128i& r, __m128i& g, __m128i& b) {
  const __m128i a0 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(p));
  const __m128i a1 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(p + 16));
  const __m128i a2 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(p + 32));

  const __m128i r0 = _mm_setr_epi8(0, 3, 6, 9, 12, 15, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1);
  const __m128i r1 = _mm_setr_epi8(-1, -1, -1, -1, -1, -1, 2, 5, 8, 11, 14, -1, -1, -1, -1, -1);
  const __m128i r2 = _mm_setr_epi8(-1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, 1, 4, 7, 10, 13);
  const __m128i g0 = _mm_setr_epi8(1, 4, 7, 10, 13, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1);
  const __m128i g1 = _mm_setr_epi8(-1, -1, -1, -1, -1, 0, 3, 6, 9, 12, 15, -1, -1, -1, -1, -1);
  const __m128i g2 = _mm_setr_epi8(-1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, 2, 5, 8, 11, 14);
  const __m128i b0 = _mm_setr_epi8(2, 5, 8, 11, 14, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1);
  const __m128i b1 = _mm_setr_epi8(-1, -1, -1, -1, -1, 1, 4, 7, 10, 13, -1, -1, -1, -1, -1, -1);
  const __m128i b2 = _mm_setr_epi8(-1, -1, -1, -1, -1, -1, -1, -1, -1, -1, 0, 3, 6, 9, 12, 15);

  r = _mm_or_si128(_mm_or_si128(_mm_shuffle_epi8(a0, r0), _mm_shuffle_epi8(a1, r1)),
                   _mm_shuffle_epi8(a2, r2));
  g = _mm_or_si128(_mm_or_si128(_mm_shuffle_epi8(a0, g0), _mm_shuffle_epi8(a1, g1)),
                   _mm_shuffle_epi8(a2, g2));
  b = _mm_or_si128(_mm_or_si128(_mm_shuffle_epi8(a0, b0), _mm_shuffle_epi8(a1, b1)),
                   _mm_shuffle_epi8(a2, b2));
}

void luma_rgb(const std::uint8_t* rgb, std::uint8_t* y, std::size_t pixels) {
  const __m256i wr = _mm256_set1_epi16(77);
  const __m256i wg = _mm256_set1_epi16(150);
  const __m256i wb = _mm256_set1_epi16(29);
  const __m256i bias = _mm256_set1_epi16(128);
  std::size_t i = 0;
  for (; i + 16 <= pixels; i += 16) {
    __m128i r8, g8, b8;
    split_rgb16(rgb + 3 * i, r8, g8, b8);
    // Max 77*255 + 150*255 + 29*255 + 128 = 65408 fits unsigned 16-bit.
    __m256i acc = _mm256_mullo_epi16(_mm256_cvtepu8_epi16(r8), wr);
    acc = _mm256_add_epi16(acc, _mm256_mullo_epi16(_mm256_cvtepu8_epi16(g8), wg));
    acc = _mm256_add_epi16(acc, _mm256_mullo_epi16(_mm256_cvtepu8_epi16(b8), wb));
    acc = _mm256_srli_epi16(_mm256_add_epi16(acc, bias), 8);
    const __m128i packed =
        _mm_packus_epi16(_mm256_castsi256_si128(acc), _mm256_extracti128_si256(acc, 1));
    _mm_storeu_si128(reinterpret_cast<__m128i*>(y + i), packed);
  }
  for (; i < pixels; ++i) {
    const unsigned r = rgb[3 * i];
    const unsigned g = rgb[3 * i + 1];
    const unsigned b = rgb[3 * i + 2];
    y[i] = static_cast<std::uint8_t>((77 * r + 150 * g + 29 * b + 128) >> 8);
  }
}

void accumulate_block_sums(const std::uint8_t* row, std::uint32_t* sums, std::size_t width) {
  const __m256i zero = _mm256_setzero_si256();
  std::size_t x = 0;
  for (; x + 32 <= width; x += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(row + x));
    // Sum of absolute differences against zero: four horizontal 8-byte sums.
    const __m256i s = _mm256_sad_epu8(v, zero);
    alignas(32) std::uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), s);
    std::uint32_t* dst = sums + (x >> 3);
    dst[0] += static_cast<std::uint32_t>(lanes[0]);
    dst[1] += static_cast<std::uint32_t>(lanes[1]);
    dst[2] += static_cast<std::uint32_t>(lanes[2]);
    dst[3] += static_cast<std::uint32_t>(lanes[3]);
  }
  for (; x < width; ++x) sums[x >> 3] += row[x];
}

void u8_to_f32(const std::uint8_t* in, float* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m128i bytes = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(in + i));
    _mm256_storeu_ps(out + i, _mm256_cvtepi32_ps(_mm256_cvtepu8_epi32(bytes)));
  }
  for (; i < n; ++i) out[i] = static_cast<float>(in[i]);
}

void gather_lerp(const float* src, const std::int32_t* i0, const std::int32_t* i1, const float* w0,
                 const float* w1, float* out, std::size_t n) {
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    const __m256i idx0 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(i0 + j));
    const __m256i idx1 = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(i1 + j));
    const __m256 left = _mm256_mul_ps(_mm256_i32gather_ps(src, idx0, 4), _mm256_loadu_ps(w0 + j));
    const __m256 right = _mm256_mul_ps(_mm256_i32gather_ps(src, idx1, 4), _mm256_loadu_ps(w1 + j));
    _mm256_storeu_ps(out + j, _mm256_add_ps(left, right));
  }
  for (; j < n; ++j) {
    const float left = src[i0[j]] * w0[j];
    const float right = src[i1[j]] * w1[j];
    out[j] = left + right;
  }
}

void lerp_rows(const float* a, const float* b, float wa, float wb, float* out, std::size_t n) {
  const __m256 va = _mm256_set1_ps(wa);
  const __m256 vb = _mm256_set1_ps(wb);
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    const __m256 top = _mm256_mul_ps(_mm256_loadu_ps(a + j), va);
    const __m256 bottom = _mm256_mul_ps(_mm256_loadu_ps(b + j), vb);
    _mm256_storeu_ps(out + j, _mm256_add_ps(top, bottom));
  }
  for (; j < n; ++j) {
    const float top = a[j] * wa;
    const float bottom = b[j] * wb;
    out[j] = top + bottom;
  }
}

void quantize_u8(const float* in, std::uint8_t* out, std::size_t n) {
  const __m256 half = _mm256_set1_ps(0.5f);
  const __m256 lo = _mm256_setzero_ps();
  const __m256 hi = _mm256_set1_ps(255.0f);
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    __m256 v = _mm256_floor_ps(_mm256_add_ps(_mm256_loadu_ps(in + j), half));
    v = _mm256_min_ps(_mm256_max_ps(v, lo), hi);
    const __m256i i32 = _mm256_cvttps_epi32(v);
    const __m128i u16 =
        _mm_packus_epi32(_mm256_castsi256_si128(i32), _mm256_extracti128_si256(i32, 1));
    _mm_storel_epi64(reinterpret_cast<__m128i*>(out + j), _mm_packus_epi16(u16, u16));
  }
  for (; j < n; ++j) {
    float v = std::floor(in[j] + 0.5f);
    v = v < 0.0f ? 0.0f : (v > 255.0f ? 255.0f : v);
    out[j] = static_cast<std::uint8_t>(v);
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2",    luma_rgb,  accumulate_block_sums, u8_to_f32,
                                 gather_lerp, lerp_rows, quantize_u8};
  return table;
}

}  // namespace handwash::kernels
