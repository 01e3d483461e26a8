#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "abdiv/datasets.hpp"
#include "abdiv/divergence.hpp"
#include "abdiv/svm.hpp"

namespace abdiv {

/// One experiment table: the d_t family members used as SVM kernels, directly
/// (K = -D) and through the Gaussian transform, with C and sigma picked by
/// cross-validation on an 80/20 stratified split.
struct BenchOptions {
  std::string dataset = "synth";  // synth | cats | gene
  std::uint64_t seed = 7;
  std::optional<std::filesystem::path> gene_path;
  std::string gene_label_column = "label";
  std::string gene_positive = "B";
  std::optional<std::filesystem::path> synth_config;
  /// Defaults per dataset when unset: simplex for synth and gene, raw-positive for cats.
  std::optional<DensityMode> density_mode;
  double density_epsilon = 1e-9;
  double train_fraction = 0.8;
  std::vector<double> c_grid{1.0, 10.0, 100.0};
  std::vector<double> sigma_grid{0.5, 1.5};
  std::size_t folds = 5;
};

struct BenchRow {
  std::string divergence;
  DivergenceSpec spec;
  KernelTransform transform = KernelTransform::Direct;
  double test_error = 0.0;
  double penalty = 0.0;
  std::optional<double> sigma;
  double cv_error = 0.0;
  bool converged = true;
};

struct BenchResult {
  std::string dataset;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::vector<BenchRow> rows;

  bool all_converged() const noexcept;
  /// Aligned text table, one line for direct kernels and one for the Gaussian transform.
  std::string to_table() const;
  /// `key=value` records, one block per row.
  std::string to_key_value() const;
};

/// Names and d_t parameters of the table columns, in order.
std::vector<std::pair<std::string, DivergenceSpec>> bench_divergences();

/// Loads the dataset named by `options`; throws DataError when unavailable.
LabeledDataset load_bench_dataset(const BenchOptions& options);

BenchResult run_bench(const LabeledDataset& data, const BenchOptions& options);
BenchResult run_bench(const BenchOptions& options);

/// Trains on the training split with (C, sigma) and reports the test error.
BenchRow evaluate_kernel(const Eigen::MatrixXd& divergences, std::span<const int> labels, const Split& split,
                         KernelTransform transform, double penalty, std::optional<double> sigma);

}  // namespace abdiv
