#include "abdiv/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace abdiv {

double SegmentationConfig::effective_epsilon() const noexcept {
  if (epsilon) return *epsilon;
  return normalization == Normalization::Raw255 ? 1.0 : 1e-3;
}

void SegmentationConfig::validate() const {
  if (!(k > 0.0)) throw std::invalid_argument("segmentation threshold k must be positive");
  const double eps = effective_epsilon();
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("segmentation epsilon must be positive");
}

namespace {

double channel_value(std::uint8_t v, Normalization norm, double eps) {
  if (norm == Normalization::Raw255) return static_cast<double>(v) + eps;
  return std::max(static_cast<double>(v) / 255.0, eps);
}

}  // namespace

double pixel_divergence(const DivergenceSpec& spec, const Rgb& p1, const Rgb& p2, const SegmentationConfig& config) {
  const double eps = config.effective_epsilon();
  std::array<double, 3> terms{};
  for (std::size_t c = 0; c < 3; ++c) {
    terms[c] = scalar_divergence(spec, channel_value(p1[c], config.normalization, eps),
                                 channel_value(p2[c], config.normalization, eps));
  }
  std::sort(terms.begin(), terms.end());
  return terms[0] + terms[1] + terms[2];
}

std::vector<double> divergence_map(const RgbImage& image, const SegmentationConfig& config) {
  config.validate();
  if (image.width() < 2 || image.height() < 2) {
    std::ostringstream os;
    os << "segmentation needs an image of at least 2x2 pixels (got " << image.width() << "x" << image.height() << ")";
    throw std::invalid_argument(os.str());
  }
  const std::size_t w = image.width();
  std::vector<double> map(image.pixel_count(), 0.0);
  for (std::size_t i = 1; i < image.height(); ++i) {
    for (std::size_t j = 1; j < w; ++j) {
      const Rgb& left = image.at(i, j - 1);
      const Rgb& top = image.at(i - 1, j);
      double d;
      if (config.neighbor_mode == NeighborMode::Literal) {
        d = pixel_divergence(config.spec, left, top, config);
      } else {
        const Rgb& here = image.at(i, j);
        d = std::max(pixel_divergence(config.spec, here, left, config),
                     pixel_divergence(config.spec, here, top, config));
      }
      map[i * w + j] = d;
    }
  }
  return map;
}

namespace {

RgbImage threshold(const RgbImage& image, const std::vector<double>& map, double k, const SegmentationConfig& config) {
  RgbImage out(image.width(), image.height(), config.background);
  const std::size_t w = image.width();
  for (std::size_t i = 1; i < image.height(); ++i) {
    for (std::size_t j = 1; j < w; ++j) {
      if (map[i * w + j] < k) out.at(i, j) = config.foreground;
    }
  }
  return out;
}

}  // namespace

RgbImage segment(const RgbImage& image, const SegmentationConfig& config) {
  return threshold(image, divergence_map(image, config), config.k, config);
}

std::vector<RgbImage> threshold_sweep(const RgbImage& image, std::span<const double> ks,
                                      const SegmentationConfig& config) {
  if (ks.empty()) throw std::invalid_argument("threshold sweep needs at least one threshold");
  for (double k : ks) {
    if (!(k > 0.0)) throw std::invalid_argument("segmentation threshold k must be positive");
  }
  const auto map = divergence_map(image, config);
  std::vector<RgbImage> out;
  out.reserve(ks.size());
  for (double k : ks) out.push_back(threshold(image, map, k, config));
  return out;
}

}  // namespace abdiv
