#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "abdiv/kernel.hpp"
#include "abdiv/measure.hpp"

namespace abdiv {

class SvmError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LabeledDataset {
  std::vector<DiscreteDensity> densities;
  std::vector<int> labels;  // each -1 or +1

  std::size_t size() const noexcept { return labels.size(); }
  /// Throws SvmError on length mismatch, fewer than 2 samples or labels
  /// outside {-1, +1}.
  void validate() const;
  LabeledDataset subset(std::span<const std::size_t> indices) const;
};

struct Split {
  LabeledDataset train;
  LabeledDataset test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

/// Stratified shuffle: each class contributes round(fraction * count) samples
/// to the training side. Throws SvmError if a class ends up with no training
/// samples.
Split train_test_split(const LabeledDataset& data, double train_fraction, std::uint64_t seed);

enum class Conditioning { None, Clip, Jitter };

/// none: unchanged; clip: negative eigenvalues set to zero; jitter: add
/// (max(0, -lambda_min) + 1e-10) I.
Eigen::MatrixXd condition_gram(const Eigen::MatrixXd& g, Conditioning mode);
GramMatrix condition_gram(const GramMatrix& g, Conditioning mode);

struct SmoOptions {
  double kkt_tol = 1e-3;
  /// Iteration budget is max_passes * n pair updates.
  std::size_t max_passes = 10000;
  bool record_objective = false;
};

struct SvmModel {
  Eigen::VectorXd dual_coeffs;
  double bias = 0.0;
  std::vector<std::size_t> support_indices;
  std::vector<int> train_labels;
  double penalty = 1.0;
  KernelSpec spec{};
  bool converged = false;
  std::size_t iterations = 0;
  double objective = 0.0;
  std::vector<double> objective_trace;
};

/// Soft-margin dual: maximize sum(a) - 1/2 a^T Q a, Q_ij = y_i y_j G_ij,
/// subject to 0 <= a_i <= C and sum(a_i y_i) = 0. Working pairs are the
/// maximal KKT violators (the pair with the largest error gap |E_i - E_j|).
/// A non-converged model is returned with `converged == false`.
SvmModel solve_dual_smo(const Eigen::MatrixXd& gram, std::span<const int> labels, double penalty,
                        const SmoOptions& options = {}, const KernelSpec& spec = {});

/// Largest KKT violation of `model` on its own training Gram.
double kkt_violation(const SvmModel& model, const Eigen::MatrixXd& gram);
/// sum(a) - 1/2 a^T Q a.
double dual_objective(const Eigen::VectorXd& alpha, std::span<const int> labels, const Eigen::MatrixXd& gram);

/// f(x) = sum_i a_i y_i K(x_i, x) + b.
double decision_function(const SvmModel& model, std::span<const double> kernel_row);
double decision_function(const SvmModel& model, const Eigen::Ref<const Eigen::VectorXd>& kernel_row);
/// sign(f) with sign(0) = +1.
int predict(const SvmModel& model, const Eigen::Ref<const Eigen::VectorXd>& kernel_row);

/// Fraction misclassified; rows of `test_rows` are kernel rows against the
/// training set.
double test_error(const SvmModel& model, const Eigen::MatrixXd& test_rows, std::span<const int> test_labels);

/// How a divergence becomes the SVM kernel.
enum class KernelTransform {
  Direct,    // K = -D (cpd), used without conditioning
  Gaussian,  // K = exp(-D / 2 sigma^2), conditioned before training
};

struct CvEntry {
  double penalty = 0.0;
  std::optional<double> sigma;
  double mean_error = 0.0;
};

struct CvReport {
  std::vector<CvEntry> grid;
  CvEntry best;

  std::string to_table() const;
};

struct CvOptions {
  std::size_t folds = 5;
  Conditioning conditioning = Conditioning::Clip;
  SmoOptions smo{};
};

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, std::size_t folds,
                                                       std::uint64_t seed);

/// Grid search over C (and sigma for the Gaussian transform) with stratified
/// k-fold cross-validation. `divergences` is the full pairwise divergence
/// matrix of the dataset. Ties go to the smaller C, then the smaller sigma.
CvReport cross_validate(const Eigen::MatrixXd& divergences, std::span<const int> labels, KernelTransform transform,
                        std::span<const double> c_grid, std::span<const double> sigma_grid, std::uint64_t seed,
                        const CvOptions& options = {});

CvReport cross_validate(const LabeledDataset& data, const DivergenceSpec& spec, KernelTransform transform,
                        std::span<const double> c_grid, std::span<const double> sigma_grid, std::uint64_t seed,
                        const CvOptions& options = {});

}  // namespace abdiv
