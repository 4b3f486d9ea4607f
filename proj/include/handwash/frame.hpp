#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "handwash/errors.hpp"

namespace handwash {

/// Interleaved 8-bit image, 1 (gray) or 3 (RGB) channels.
struct Frame {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<std::uint8_t> data;
  double timestamp = 0.0;

  Frame() = default;
  Frame(int w, int h, int c, std::uint8_t fill = 0, double t = 0.0)
      : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, fill), timestamp(t) {
    validate();
  }

  bool empty() const { return width == 0 || height == 0; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
  std::size_t row_stride() const { return static_cast<std::size_t>(width) * channels; }

  std::uint8_t* row(int y) { return data.data() + static_cast<std::size_t>(y) * row_stride(); }
  const std::uint8_t* row(int y) const { return data.data() + static_cast<std::size_t>(y) * row_stride(); }

  std::uint8_t& at(int x, int y, int c) { return row(y)[static_cast<std::size_t>(x) * channels + c]; }
  std::uint8_t at(int x, int y, int c) const { return row(y)[static_cast<std::size_t>(x) * channels + c]; }

  void validate() const {
    if (width < 0 || height < 0) throw ValidationError("frame dimensions must be non-negative");
    if (channels != 1 && channels != 3) throw ValidationError("frame must have 1 or 3 channels");
    if (data.size() != static_cast<std::size_t>(width) * height * channels) {
      throw ValidationError("frame buffer size does not match width*height*channels");
    }
  }

  friend bool operator==(const Frame& a, const Frame& b) {
    return a.width == b.width && a.height == b.height && a.channels == b.channels && a.data == b.data;
  }
};

}  // namespace handwash
