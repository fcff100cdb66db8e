#include "uavlabel/image.hpp"

#include <png.h>

#include <algorithm>
#include <fstream>
#include <iterator>

#include "uavlabel/error.hpp"

namespace uavlabel {

FrameImage FrameImage::inverted() const {
  FrameImage out = *this;
  for (auto& p : out.pixels) p = static_cast<std::uint8_t>(255 - p);
  return out;
}

std::size_t BinaryMask::foreground_count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

namespace {

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "read_failed", "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

PngInfo probe_png(std::span<const std::uint8_t> bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    fail(ErrorKind::Validation, "bad_png", std::string("PNG decode failed: ") + image.message);
  }
  PngInfo info{static_cast<int>(image.width), static_cast<int>(image.height),
               image.format == PNG_FORMAT_GRAY};
  png_image_free(&image);
  return info;
}

FrameImage decode_png(std::span<const std::uint8_t> bytes, int frame_index) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    fail(ErrorKind::Validation, "bad_png", std::string("PNG decode failed: ") + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  FrameImage frame(static_cast<int>(image.width), static_cast<int>(image.height), frame_index);
  if (!png_image_finish_read(&image, nullptr, frame.pixels.data(), 0, nullptr)) {
    png_image_free(&image);
    fail(ErrorKind::Validation, "bad_png", std::string("PNG decode failed: ") + image.message);
  }
  return frame;
}

FrameImage read_png_file(const std::string& path, int frame_index) {
  const auto bytes = read_file(path);
  return decode_png(bytes, frame_index);
}

std::vector<std::uint8_t> encode_png(const FrameImage& frame) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(frame.width);
  image.height = static_cast<png_uint_32>(frame.height);
  image.format = PNG_FORMAT_GRAY;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, frame.pixels.data(), 0, nullptr)) {
    fail(ErrorKind::Io, "png_encode", std::string("PNG encode failed: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, frame.pixels.data(), 0, nullptr)) {
    fail(ErrorKind::Io, "png_encode", std::string("PNG encode failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

void write_png_file(const std::string& path, const FrameImage& image) {
  const auto bytes = encode_png(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "write_failed", "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace uavlabel
