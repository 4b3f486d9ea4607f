#include "handwash/y4m.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "handwash/errors.hpp"

namespace handwash {

namespace {

std::uint8_t clamp_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

bool read_line(std::istream& in, std::string& line) {
  line.clear();
  char c = 0;
  while (in.get(c)) {
    if (c == '\n') return true;
    line.push_back(c);
    if (line.size() > 4096) throw ParseError("Y4M header line too long", 1, line.size());
  }
  return !line.empty();
}

}  // namespace

Y4mReader::Y4mReader(std::istream& in) : in_(&in) {
  std::string header;
  if (!read_line(*in_, header) || !header.starts_with("YUV4MPEG2")) {
    throw ParseError("not a YUV4MPEG2 stream", 1, 1);
  }
  std::istringstream tokens(header.substr(9));
  std::string tok;
  std::size_t column = 10;
  while (tokens >> tok) {
    const char tag = tok[0];
    const std::string value = tok.substr(1);
    try {
      if (tag == 'W') {
        width_ = std::stoi(value);
      } else if (tag == 'H') {
        height_ = std::stoi(value);
      } else if (tag == 'F') {
        const auto colon = value.find(':');
        if (colon == std::string::npos) throw ParseError("bad Y4M frame rate", 1, column);
        fps_ = Rational(std::stoll(value.substr(0, colon)), std::stoll(value.substr(colon + 1)));
      } else if (tag == 'C') {
        if (value.starts_with("420")) {
          chroma_ = Chroma::C420;
        } else if (value.starts_with("444") && value.find("alpha") == std::string::npos) {
          chroma_ = Chroma::C444;
        } else if (value == "mono") {
          chroma_ = Chroma::Mono;
        } else {
          throw ParseError("unsupported Y4M colorspace C" + value, 1, column);
        }
      }
    } catch (const std::logic_error&) {
      throw ParseError("bad Y4M header token '" + tok + "'", 1, column);
    } catch (const ValidationError&) {
      throw ParseError("bad Y4M frame rate", 1, column);
    }
    column += tok.size() + 1;
  }
  if (width_ <= 0 || height_ <= 0) throw ParseError("Y4M header lacks positive W/H", 1, 1);
}

std::unique_ptr<Y4mReader> Y4mReader::open(const std::string& path) {
  if (path == "-") return std::make_unique<Y4mReader>(std::cin);
  auto file = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*file) throw IoError("cannot open video '" + path + "'");
  auto reader = std::make_unique<Y4mReader>(*file);
  reader->owned_ = std::move(file);
  return reader;
}

std::optional<Frame> Y4mReader::next() {
  std::string line;
  if (!read_line(*in_, line)) return std::nullopt;
  if (!line.starts_with("FRAME")) {
    throw ParseError("expected FRAME marker", static_cast<std::size_t>(index_ + 2), 1);
  }
  const std::size_t luma = static_cast<std::size_t>(width_) * height_;
  const int cw = chroma_ == Chroma::C420 ? (width_ + 1) / 2 : width_;
  const int chh = chroma_ == Chroma::C420 ? (height_ + 1) / 2 : height_;
  const std::size_t chroma = chroma_ == Chroma::Mono ? 0 : static_cast<std::size_t>(cw) * chh;

  std::vector<std::uint8_t> planes(luma + 2 * chroma);
  in_->read(reinterpret_cast<char*>(planes.data()), static_cast<std::streamsize>(planes.size()));
  if (static_cast<std::size_t>(in_->gcount()) != planes.size()) {
    throw ParseError("truncated Y4M frame", static_cast<std::size_t>(index_ + 2), 1);
  }

  const double t = fps_.periods_to_seconds(index_);
  ++index_;
  if (chroma_ == Chroma::Mono) {
    Frame f(width_, height_, 1, 0, t);
    std::copy(planes.begin(), planes.end(), f.data.begin());
    return f;
  }
  Frame f(width_, height_, 3, 0, t);
  const std::uint8_t* yp = planes.data();
  const std::uint8_t* up = yp + luma;
  const std::uint8_t* vp = up + chroma;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      const std::size_t ci = chroma_ == Chroma::C420 ? static_cast<std::size_t>(y / 2) * cw + x / 2
                                                     : static_cast<std::size_t>(y) * cw + x;
      const double Y = yp[static_cast<std::size_t>(y) * width_ + x];
      const double Cb = up[ci] - 128.0;
      const double Cr = vp[ci] - 128.0;
      f.at(x, y, 0) = clamp_u8(Y + 1.402 * Cr);
      f.at(x, y, 1) = clamp_u8(Y - 0.344136 * Cb - 0.714136 * Cr);
      f.at(x, y, 2) = clamp_u8(Y + 1.772 * Cb);
    }
  }
  return f;
}

Y4mWriter::Y4mWriter(std::ostream& out, int width, int height, int channels, Rational fps)
    : out_(out), width_(width), height_(height), channels_(channels) {
  out_ << "YUV4MPEG2 W" << width << " H" << height << " F" << fps.num() << ":" << fps.den()
       << " Ip A1:1 " << (channels == 1 ? "Cmono" : "C444") << "\n";
}

void Y4mWriter::write(const Frame& f) {
  if (f.width != width_ || f.height != height_ || f.channels != channels_) {
    throw ValidationError("Y4M writer: frame geometry differs from stream header");
  }
  out_ << "FRAME\n";
  if (channels_ == 1) {
    out_.write(reinterpret_cast<const char*>(f.data.data()), static_cast<std::streamsize>(f.data.size()));
    return;
  }
  const std::size_t n = f.pixel_count();
  std::vector<std::uint8_t> planes(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = f.data[3 * i];
    const double g = f.data[3 * i + 1];
    const double b = f.data[3 * i + 2];
    planes[i] = clamp_u8(0.299 * r + 0.587 * g + 0.114 * b);
    planes[n + i] = clamp_u8(128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b);
    planes[2 * n + i] = clamp_u8(128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b);
  }
  out_.write(reinterpret_cast<const char*>(planes.data()), static_cast<std::streamsize>(planes.size()));
}

}  // namespace handwash
