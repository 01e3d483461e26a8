#pragma once

#include <optional>
#include <span>
#include <vector>

#include "abdiv/divergence.hpp"
#include "abdiv/image.hpp"

namespace abdiv {

enum class Normalization {
  Raw255,        // channel value + epsilon
  UnitInterval,  // max(channel / 255, epsilon)
};

enum class NeighborMode {
  Literal,            // compare left neighbour X[i][j-1] with top neighbour X[i-1][j]
  CurrentVsNeighbors, // max(d(X[i][j], left), d(X[i][j], top))
};

struct SegmentationConfig {
  DivergenceSpec spec = DivergenceSpec::abs(1.0, 1.0);
  double k = 1.0;
  Normalization normalization = Normalization::Raw255;
  /// Channel floor; defaults to 1 on the raw scale and 1e-3 on the unit scale.
  std::optional<double> epsilon;
  NeighborMode neighbor_mode = NeighborMode::Literal;
  Rgb foreground{255, 255, 255};
  Rgb background{0, 0, 0};

  double effective_epsilon() const noexcept;
  /// Throws std::invalid_argument unless k > 0 and epsilon > 0.
  void validate() const;
};

/// Sum over the three channels of the scalar divergence between the
/// normalized channel values. The channel terms are summed in ascending order,
/// so the result does not depend on channel order.
double pixel_divergence(const DivergenceSpec& spec, const Rgb& p1, const Rgb& p2, const SegmentationConfig& config);

/// Per-pixel neighbour divergence map; row 0 and column 0 are zero.
std::vector<double> divergence_map(const RgbImage& image, const SegmentationConfig& config);

/// Thresholding: interior pixel (i, j), i, j >= 1, becomes foreground when its
/// neighbour divergence is below k, background otherwise. Row 0 and column 0
/// stay background.
RgbImage segment(const RgbImage& image, const SegmentationConfig& config);

/// One segmentation per threshold, sharing a single divergence map.
std::vector<RgbImage> threshold_sweep(const RgbImage& image, std::span<const double> ks,
                                      const SegmentationConfig& config);

}  // namespace abdiv
