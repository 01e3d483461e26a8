#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "abdiv/measure.hpp"
#include "abdiv/svm.hpp"

namespace abdiv {

/// Structured load failure. `row` is the 1-based line number (0 when not
/// tied to a line), `column` the 1-based field index (0 when not applicable).
class DataError : public std::runtime_error {
 public:
  DataError(std::size_t row, std::size_t column, const std::string& what)
      : std::runtime_error(what), row_(row), column_(column) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

struct RawDataset {
  Eigen::MatrixXd features;  // n x d
  std::optional<std::vector<int>> labels;
  std::vector<std::string> column_names;  // feature columns only

  Eigen::Index rows() const noexcept { return features.rows(); }
  Eigen::Index cols() const noexcept { return features.cols(); }
};

/// Comma-separated text with a header row. Every column other than the label
/// column must be numeric ('.' decimal). `positive_label` maps to +1, every
/// other label value to -1. Double quotes around a field are stripped.
RawDataset parse_csv_dataset(std::string_view text, std::optional<std::string_view> label_column = std::nullopt,
                             std::string_view positive_label = "");
RawDataset load_csv_dataset(const std::filesystem::path& path,
                            std::optional<std::string_view> label_column = std::nullopt,
                            std::string_view positive_label = "");

enum class DensityMode {
  Simplex,      // floor at epsilon, then divide by the row sum
  RawPositive,  // floor at epsilon, keep the scale (finite positive measure)
};

std::vector<DiscreteDensity> to_densities(const RawDataset& data, DensityMode mode, double epsilon = 1e-9);

/// Labeled densities; throws DataError when the dataset has no labels.
LabeledDataset to_labeled(const RawDataset& data, DensityMode mode, double epsilon = 1e-9);

struct SynthConfig {
  std::size_t n_per_class = 100;
  std::vector<double> concentration_a{5, 5, 1, 1, 1, 1, 1, 1};
  std::vector<double> concentration_b{1, 1, 1, 1, 1, 1, 5, 5};

  std::size_t atoms() const noexcept { return concentration_a.size(); }
};

/// Reads {"n_per_class": n, "concentration_a": [...], "concentration_b": [...]};
/// missing keys keep their defaults.
SynthConfig load_synth_config(const std::filesystem::path& path);

/// Class +1 rows are normalized i.i.d. Gamma(concentration_a[j], 1) vectors,
/// class -1 rows use concentration_b. Positives come first.
LabeledDataset synth_two_class(std::size_t n_per_class, std::span<const double> concentration_a,
                               std::span<const double> concentration_b, std::uint64_t seed);
LabeledDataset synth_two_class(const SynthConfig& config, std::uint64_t seed);

/// Directory holding bundled data: $ABDIV_DATA_DIR if set, else the source tree's data/.
std::filesystem::path data_directory();

}  // namespace abdiv
