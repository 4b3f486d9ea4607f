#pragma once

#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include "handwash/frame.hpp"
#include "handwash/rational.hpp"

namespace handwash {

/// YUV4MPEG2 stream reader. Supports 4:2:0 (all siting variants), 4:4:4
/// and mono; frames come out as RGB (full-range BT.601) or gray for mono.
class Y4mReader {
 public:
  /// Reads the stream header. Throws ParseError on a malformed header.
  explicit Y4mReader(std::istream& in);

  /// Opens a file, or standard input when path is "-". Throws IoError.
  static std::unique_ptr<Y4mReader> open(const std::string& path);

  int width() const { return width_; }
  int height() const { return height_; }
  Rational fps() const { return fps_; }

  /// Next frame with timestamp index / fps; nullopt at end of stream.
  /// Throws ParseError on a truncated frame.
  std::optional<Frame> next();

 private:
  enum class Chroma { C420, C444, Mono };

  std::unique_ptr<std::istream> owned_;
  std::istream* in_;
  int width_ = 0;
  int height_ = 0;
  Rational fps_{30, 1};
  Chroma chroma_ = Chroma::C420;
  std::int64_t index_ = 0;
};

/// Writes 4:4:4 for RGB frames and mono for gray frames.
class Y4mWriter {
 public:
  Y4mWriter(std::ostream& out, int width, int height, int channels, Rational fps);
  void write(const Frame& f);

 private:
  std::ostream& out_;
  int width_;
  int height_;
  int channels_;
};

}  // namespace handwash
