#include "handwash/image_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "handwash/random.hpp"

namespace handwash {

namespace {

struct AxisTaps {
  std::vector<int> lo;
  std::vector<int> hi;
  std::vector<float> w_lo;
  std::vector<float> w_hi;
};

// Half-pixel-center mapping from output to source coordinates, clamped to
// the valid sample range.
AxisTaps axis_taps(int src, int dst) {
  AxisTaps taps;
  taps.lo.resize(dst);
  taps.hi.resize(dst);
  taps.w_lo.resize(dst);
  taps.w_hi.resize(dst);
  const double scale = static_cast<double>(src) / dst;
  for (int i = 0; i < dst; ++i) {
    double s = (i + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src - 1));
    const int lo = static_cast<int>(std::floor(s));
    const int hi = std::min(lo + 1, src - 1);
    const float frac = static_cast<float>(s - lo);
    taps.lo[i] = lo;
    taps.hi[i] = hi;
    taps.w_lo[i] = 1.0f - frac;
    taps.w_hi[i] = frac;
  }
  return taps;
}

}  // namespace

Frame resize_bilinear(const Frame& f, int out_width, int out_height) {
  return resize_bilinear(f, out_width, out_height, kernels::active_kernels());
}

Frame resize_bilinear(const Frame& f, int out_width, int out_height, const kernels::KernelTable& k) {
  f.validate();
  if (f.empty()) throw ValidationError("cannot resize an empty frame");
  if (out_width < 1 || out_height < 1) throw ValidationError("resize target must be at least 1x1");

  const int ch = f.channels;
  const AxisTaps xs = axis_taps(f.width, out_width);
  const AxisTaps ys = axis_taps(f.height, out_height);

  // Per output sample (x, c) gather indices into a float copy of a source row.
  const std::size_t out_row = static_cast<std::size_t>(out_width) * ch;
  std::vector<std::int32_t> i0(out_row), i1(out_row);
  std::vector<float> w0(out_row), w1(out_row);
  for (int x = 0; x < out_width; ++x) {
    for (int c = 0; c < ch; ++c) {
      const std::size_t j = static_cast<std::size_t>(x) * ch + c;
      i0[j] = xs.lo[x] * ch + c;
      i1[j] = xs.hi[x] * ch + c;
      w0[j] = xs.w_lo[x];
      w1[j] = xs.w_hi[x];
    }
  }

  Frame out(out_width, out_height, ch, 0, f.timestamp);
  std::vector<float> src_row(f.row_stride());
  std::vector<float> top(out_row), bottom(out_row), blended(out_row);
  int cached_top = -1;
  int cached_bottom = -1;
  auto horizontal = [&](int sy, std::vector<float>& dst) {
    k.u8_to_f32(f.row(sy), src_row.data(), src_row.size());
    k.gather_lerp(src_row.data(), i0.data(), i1.data(), w0.data(), w1.data(), dst.data(), out_row);
  };

  for (int y = 0; y < out_height; ++y) {
    const int y0 = ys.lo[y];
    const int y1 = ys.hi[y];
    if (y0 != cached_top) {
      if (y0 == cached_bottom) {
        top = bottom;
      } else {
        horizontal(y0, top);
      }
      cached_top = y0;
    }
    if (y1 != cached_bottom) {
      horizontal(y1, bottom);
      cached_bottom = y1;
    }
    k.lerp_rows(top.data(), bottom.data(), ys.w_lo[y], ys.w_hi[y], blended.data(), out_row);
    k.quantize_u8(blended.data(), out.row(y), out_row);
  }
  return out;
}

Frame preprocess(const Frame& f, int size) {
  if (size < 1) throw ValidationError("preprocess size must be >= 1");
  f.validate();
  if (f.empty()) throw ValidationError("cannot preprocess an empty frame");
  Frame resized = resize_bilinear(f, size, size);
  if (resized.channels == 3) return resized;

  Frame rgb(size, size, 3, 0, f.timestamp);
  for (std::size_t i = 0; i < resized.pixel_count(); ++i) {
    rgb.data[3 * i] = rgb.data[3 * i + 1] = rgb.data[3 * i + 2] = resized.data[i];
  }
  return rgb;
}

AugmentParams draw_augment_params(std::uint64_t seed) {
  Rng rng(seed);
  AugmentParams p;
  p.flip = uniform01(rng) < 0.5;
  p.angle_deg = -kMaxRotationDeg + 2.0 * kMaxRotationDeg * uniform01(rng);
  return p;
}

namespace {

Frame flip_horizontal(const Frame& f) {
  Frame out = f;
  const int ch = f.channels;
  for (int y = 0; y < f.height; ++y) {
    const std::uint8_t* src = f.row(y);
    std::uint8_t* dst = out.row(y);
    for (int x = 0; x < f.width; ++x) {
      const int mx = f.width - 1 - x;
      for (int c = 0; c < ch; ++c) dst[x * ch + c] = src[mx * ch + c];
    }
  }
  return out;
}

Frame rotate(const Frame& f, double angle_deg) {
  Frame out(f.width, f.height, f.channels, 0, f.timestamp);
  const double theta = angle_deg * std::numbers::pi / 180.0;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double cx = (f.width - 1) / 2.0;
  const double cy = (f.height - 1) / 2.0;
  const double max_x = f.width - 1;
  const double max_y = f.height - 1;
  const int ch = f.channels;

  for (int y = 0; y < f.height; ++y) {
    for (int x = 0; x < f.width; ++x) {
      // Inverse map: rotate the output position back by -theta.
      const double dx = x - cx;
      const double dy = y - cy;
      const double sx = std::clamp(cos_t * dx + sin_t * dy + cx, 0.0, max_x);
      const double sy = std::clamp(-sin_t * dx + cos_t * dy + cy, 0.0, max_y);
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      const int x1 = std::min(x0 + 1, f.width - 1);
      const int y1 = std::min(y0 + 1, f.height - 1);
      const double fx = sx - x0;
      const double fy = sy - y0;
      for (int c = 0; c < ch; ++c) {
        const double top = f.at(x0, y0, c) * (1.0 - fx) + f.at(x1, y0, c) * fx;
        const double bottom = f.at(x0, y1, c) * (1.0 - fx) + f.at(x1, y1, c) * fx;
        const double v = std::floor(top * (1.0 - fy) + bottom * fy + 0.5);
        out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
      }
    }
  }
  return out;
}

}  // namespace

Frame apply_augment(const Frame& f, const AugmentParams& p) {
  f.validate();
  if (f.empty()) return f;
  Frame out = p.flip ? flip_horizontal(f) : f;
  if (p.angle_deg != 0.0) out = rotate(out, p.angle_deg);
  return out;
}

}  // namespace handwash
