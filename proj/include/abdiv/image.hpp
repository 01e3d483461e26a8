#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace abdiv {

using Rgb = std::array<std::uint8_t, 3>;

/// 8-bit RGB raster, row-major.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(std::size_t width, std::size_t height, Rgb fill = {0, 0, 0});

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return pixels_.size(); }

  /// Row i, column j.
  const Rgb& at(std::size_t row, std::size_t col) const { return pixels_[row * width_ + col]; }
  Rgb& at(std::size_t row, std::size_t col) { return pixels_[row * width_ + col]; }

  const std::vector<Rgb>& pixels() const noexcept { return pixels_; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<Rgb> pixels_;
};

/// Decoding failure; `offset()` is the byte position where it was detected.
class ImageFormatError : public std::runtime_error {
 public:
  ImageFormatError(std::size_t offset, const std::string& what) : std::runtime_error(what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Binary PPM (P6, maxval 255). Header comments and arbitrary whitespace are
/// accepted; exactly one whitespace byte must follow maxval.
RgbImage decode_ppm(std::string_view bytes);
/// Canonical encoding "P6\n<w> <h>\n255\n" followed by raw RGB bytes.
std::string encode_ppm(const RgbImage& image);

/// Reads PPM; other formats are rejected with ImageFormatError.
RgbImage load_image(const std::filesystem::path& path);
void write_image(const RgbImage& image, const std::filesystem::path& path);

}  // namespace abdiv
