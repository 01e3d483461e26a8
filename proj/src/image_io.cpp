#include "abdiv/image.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>

namespace abdiv {

RgbImage::RgbImage(std::size_t width, std::size_t height, Rgb fill)
    : width_(width), height_(height), pixels_(width * height, fill) {}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

class HeaderReader {
 public:
  HeaderReader(std::string_view bytes, std::size_t start) : bytes_(bytes), pos_(start) {}

  std::size_t pos() const noexcept { return pos_; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t read_uint(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    std::size_t v = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      v = v * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
      if (v > 1'000'000'000) throw ImageFormatError(start, std::string("PPM ") + what + " is too large");
      ++pos_;
    }
    if (pos_ == start) {
      std::ostringstream os;
      os << "malformed PPM header: expected " << what << " at byte " << start;
      throw ImageFormatError(start, os.str());
    }
    return v;
  }

 private:
  std::string_view bytes_;
  std::size_t pos_;
};

}  // namespace

RgbImage decode_ppm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
    throw ImageFormatError(0, "malformed PPM header: missing P6 magic");
  }
  HeaderReader hr(bytes, 2);
  const std::size_t width = hr.read_uint("width");
  const std::size_t height = hr.read_uint("height");
  const std::size_t maxval = hr.read_uint("maxval");
  std::size_t pos = hr.pos();
  if (width == 0 || height == 0) throw ImageFormatError(pos, "PPM image has a zero dimension");
  if (maxval != 255) {
    std::ostringstream os;
    os << "unsupported PPM bit depth: maxval " << maxval << " (only 255 is supported)";
    throw ImageFormatError(pos, os.str());
  }
  if (pos >= bytes.size() || !is_space(bytes[pos])) {
    throw ImageFormatError(pos, "malformed PPM header: expected a single whitespace byte after maxval");
  }
  ++pos;
  const std::size_t needed = width * height * 3;
  if (bytes.size() - pos < needed) {
    std::ostringstream os;
    os << "truncated PPM pixel data at byte " << bytes.size() << ": expected " << needed << " bytes from offset "
       << pos << ", got " << (bytes.size() - pos);
    throw ImageFormatError(bytes.size(), os.str());
  }
  RgbImage img(width, height);
  for (std::size_t i = 0; i < height; ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      Rgb& px = img.at(i, j);
      for (std::size_t c = 0; c < 3; ++c) px[c] = static_cast<std::uint8_t>(bytes[pos++]);
    }
  }
  return img;
}

std::string encode_ppm(const RgbImage& image) {
  std::ostringstream os;
  os << "P6\n" << image.width() << ' ' << image.height() << "\n255\n";
  std::string out = os.str();
  out.reserve(out.size() + image.pixel_count() * 3);
  for (const Rgb& px : image.pixels()) {
    for (std::uint8_t c : px) out.push_back(static_cast<char>(c));
  }
  return out;
}

RgbImage load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open image " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() >= 8 && static_cast<unsigned char>(bytes[0]) == 0x89 && bytes.substr(1, 3) == "PNG") {
    throw ImageFormatError(0, "PNG input is not supported in this build; convert to binary PPM (P6)");
  }
  return decode_ppm(bytes);
}

void write_image(const RgbImage& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write image " + path.string());
  const std::string bytes = encode_ppm(image);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing image " + path.string());
}

}  // namespace abdiv
