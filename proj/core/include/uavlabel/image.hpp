#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace uavlabel {

/// Single-channel 8-bit frame, row-major.
struct FrameImage {
  int width = 0;
  int height = 0;
  int frame_index = 0;
  std::vector<std::uint8_t> pixels;

  FrameImage() = default;
  FrameImage(int w, int h, int index, std::uint8_t fill = 0)
      : width(w), height(h), frame_index(index),
        pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  std::uint8_t at(int row, int col) const {
    return pixels[static_cast<std::size_t>(row) * width + col];
  }
  std::uint8_t& at(int row, int col) {
    return pixels[static_cast<std::size_t>(row) * width + col];
  }

  /// Black-hot to white-hot (and back).
  FrameImage inverted() const;

  friend bool operator==(const FrameImage&, const FrameImage&) = default;
};

/// Binary image; 1 marks foreground.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  BinaryMask() = default;
  BinaryMask(int w, int h)
      : width(w), height(h), bits(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0) {}

  bool at(int row, int col) const { return bits[static_cast<std::size_t>(row) * width + col] != 0; }
  void set(int row, int col, bool v = true) {
    bits[static_cast<std::size_t>(row) * width + col] = v ? 1 : 0;
  }
  std::size_t foreground_count() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

// PNG codec (8-bit grayscale). Any decodable PNG is converted to gray on read.
struct PngInfo {
  int width = 0;
  int height = 0;
  bool gray8 = false;  // single channel, 8 bits, no alpha
};
PngInfo probe_png(std::span<const std::uint8_t> bytes);
FrameImage decode_png(std::span<const std::uint8_t> bytes, int frame_index = 0);
FrameImage read_png_file(const std::string& path, int frame_index = 0);
std::vector<std::uint8_t> encode_png(const FrameImage& image);
void write_png_file(const std::string& path, const FrameImage& image);

}  // namespace uavlabel
