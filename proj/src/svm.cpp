#include "abdiv/svm.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace abdiv {

namespace {

constexpr double kTau = 1e-12;

void check_labels(std::span<const int> labels) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1 && labels[i] != -1) {
      std::ostringstream os;
      os << "label at " << i << " is " << labels[i] << ", expected -1 or +1";
      throw SvmError(os.str());
    }
  }
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, std::span<const std::size_t> rows,
                          std::span<const std::size_t> cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          m(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
    }
  }
  return out;
}

std::vector<int> pick(std::span<const int> labels, std::span<const std::size_t> idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(labels[i]);
  return out;
}

}  // namespace

void LabeledDataset::validate() const {
  if (densities.size() != labels.size()) {
    throw SvmError("dataset has " + std::to_string(densities.size()) + " densities but " +
                   std::to_string(labels.size()) + " labels");
  }
  if (labels.size() < 2) throw SvmError("dataset needs at least two samples");
  check_labels(labels);
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  LabeledDataset out;
  out.densities.reserve(indices.size());
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) {
    out.densities.push_back(densities.at(i));
    out.labels.push_back(labels.at(i));
  }
  return out;
}

Split train_test_split(const LabeledDataset& data, double train_fraction, std::uint64_t seed) {
  data.validate();
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw SvmError("train fraction must lie in (0, 1)");
  std::mt19937_64 rng(seed);
  Split split;
  for (int cls : {1, -1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.labels[i] == cls) members.push_back(i);
    }
    std::shuffle(members.begin(), members.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(members.size())));
    if (n_train == 0) {
      throw SvmError("class " + std::to_string(cls) + " has no training samples after the split");
    }
    split.train_indices.insert(split.train_indices.end(), members.begin(), members.begin() + static_cast<long>(n_train));
    split.test_indices.insert(split.test_indices.end(), members.begin() + static_cast<long>(n_train), members.end());
  }
  std::sort(split.train_indices.begin(), split.train_indices.end());
  std::sort(split.test_indices.begin(), split.test_indices.end());
  split.train = data.subset(split.train_indices);
  split.test = data.subset(split.test_indices);
  return split;
}

Eigen::MatrixXd condition_gram(const Eigen::MatrixXd& g, Conditioning mode) {
  if (!g.allFinite()) throw std::invalid_argument("condition_gram: non-finite entries");
  if (mode == Conditioning::None || g.rows() == 0) return g;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  if (es.info() != Eigen::Success) throw std::runtime_error("condition_gram: eigendecomposition failed");
  if (mode == Conditioning::Clip) {
    const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd out = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
    return 0.5 * (out + out.transpose());
  }
  const double delta = std::max(0.0, -es.eigenvalues().minCoeff()) + 1e-10;
  Eigen::MatrixXd out = g;
  out.diagonal().array() += delta;
  return out;
}

GramMatrix condition_gram(const GramMatrix& g, Conditioning mode) {
  return GramMatrix{condition_gram(g.entries, mode), g.spec};
}

double dual_objective(const Eigen::VectorXd& alpha, std::span<const int> labels, const Eigen::MatrixXd& gram) {
  Eigen::VectorXd ay(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) ay(i) = alpha(i) * labels[static_cast<std::size_t>(i)];
  return alpha.sum() - 0.5 * ay.dot(gram * ay);
}

SvmModel solve_dual_smo(const Eigen::MatrixXd& gram, std::span<const int> labels, double penalty,
                        const SmoOptions& options, const KernelSpec& spec) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  if (gram.rows() != n || gram.cols() != n) throw SvmError("Gram order does not match the label count");
  if (!(penalty > 0.0)) throw SvmError("penalty C must be positive");
  if (n < 2) throw SvmError("SVM training needs at least two samples");
  check_labels(labels);
  const bool has_pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
  const bool has_neg = std::find(labels.begin(), labels.end(), -1) != labels.end();
  if (!has_pos || !has_neg) throw SvmError("degenerate training set: only one class present");
  if (!gram.allFinite()) throw SvmError("Gram matrix has non-finite entries");

  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = labels[static_cast<std::size_t>(i)];
  const Eigen::MatrixXd q = (y * y.transpose()).cwiseProduct(gram);

  const double c = penalty;
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  // Gradient of (1/2) a^T Q a - e^T a.
  Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);

  auto in_up = [&](Eigen::Index t) { return (y(t) > 0 && alpha(t) < c) || (y(t) < 0 && alpha(t) > 0); };
  auto in_low = [&](Eigen::Index t) { return (y(t) > 0 && alpha(t) > 0) || (y(t) < 0 && alpha(t) < c); };
  auto objective = [&] { return 0.5 * alpha.sum() - 0.5 * alpha.dot(grad); };

  SvmModel model;
  model.penalty = penalty;
  model.spec = spec;
  model.train_labels.assign(labels.begin(), labels.end());
  if (options.record_objective) model.objective_trace.push_back(0.0);

  const std::size_t max_iter = options.max_passes * static_cast<std::size_t>(n);
  double g_max = 0.0;
  double g_min = 0.0;
  std::size_t iter = 0;
  for (;; ++iter) {
    g_max = -std::numeric_limits<double>::infinity();
    g_min = std::numeric_limits<double>::infinity();
    Eigen::Index i = -1;
    Eigen::Index j = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = -y(t) * grad(t);
      if (in_up(t) && v > g_max) {
        g_max = v;
        i = t;
      }
      if (in_low(t) && v < g_min) {
        g_min = v;
        j = t;
      }
    }
    if (i < 0 || j < 0 || g_max - g_min < options.kkt_tol) {
      model.converged = true;
      break;
    }
    if (iter >= max_iter) break;

    const double old_i = alpha(i);
    const double old_j = alpha(j);
    if (y(i) != y(j)) {
      double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0.0) {
        if (alpha(j) < 0.0) {
          alpha(j) = 0.0;
          alpha(i) = diff;
        }
      } else if (alpha(i) < 0.0) {
        alpha(i) = 0.0;
        alpha(j) = -diff;
      }
      if (diff > 0.0) {
        if (alpha(i) > c) {
          alpha(i) = c;
          alpha(j) = c - diff;
        }
      } else if (alpha(j) > c) {
        alpha(j) = c;
        alpha(i) = c + diff;
      }
    } else {
      double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > c) {
        if (alpha(i) > c) {
          alpha(i) = c;
          alpha(j) = sum - c;
        }
      } else if (alpha(j) < 0.0) {
        alpha(j) = 0.0;
        alpha(i) = sum;
      }
      if (sum > c) {
        if (alpha(j) > c) {
          alpha(j) = c;
          alpha(i) = sum - c;
        }
      } else if (alpha(i) < 0.0) {
        alpha(i) = 0.0;
        alpha(j) = sum;
      }
    }
    const double di = alpha(i) - old_i;
    const double dj = alpha(j) - old_j;
    grad += q.col(i) * di + q.col(j) * dj;
    if (options.record_objective) model.objective_trace.push_back(objective());
  }

  // Bias from free support vectors, else the midpoint of the feasible interval.
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (alpha(t) > 0.0 && alpha(t) < c) {
      free_sum += -y(t) * grad(t);
      ++free_count;
    }
  }
  if (free_count > 0) {
    model.bias = free_sum / static_cast<double>(free_count);
  } else if (std::isfinite(g_max) && std::isfinite(g_min)) {
    model.bias = 0.5 * (g_max + g_min);
  } else {
    model.bias = std::isfinite(g_max) ? g_max : (std::isfinite(g_min) ? g_min : 0.0);
  }

  model.dual_coeffs = alpha;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (alpha(t) > 0.0) model.support_indices.push_back(static_cast<std::size_t>(t));
  }
  model.iterations = iter;
  model.objective = objective();
  return model;
}

double kkt_violation(const SvmModel& model, const Eigen::MatrixXd& gram) {
  const Eigen::Index n = model.dual_coeffs.size();
  Eigen::VectorXd ay(n);
  for (Eigen::Index i = 0; i < n; ++i) ay(i) = model.dual_coeffs(i) * model.train_labels[static_cast<std::size_t>(i)];
  const Eigen::VectorXd f = gram * ay + Eigen::VectorXd::Constant(n, model.bias);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double margin = model.train_labels[static_cast<std::size_t>(i)] * f(i);
    const double a = model.dual_coeffs(i);
    double v;
    if (a <= 0.0) {
      v = std::max(0.0, 1.0 - margin);
    } else if (a >= model.penalty) {
      v = std::max(0.0, margin - 1.0);
    } else {
      v = std::abs(margin - 1.0);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

double decision_function(const SvmModel& model, const Eigen::Ref<const Eigen::VectorXd>& kernel_row) {
  if (kernel_row.size() != model.dual_coeffs.size()) {
    throw SvmError("kernel row has " + std::to_string(kernel_row.size()) + " entries, expected " +
                   std::to_string(model.dual_coeffs.size()));
  }
  double f = model.bias;
  for (std::size_t i : model.support_indices) {
    const auto k = static_cast<Eigen::Index>(i);
    f += model.dual_coeffs(k) * model.train_labels[i] * kernel_row(k);
  }
  return f;
}

double decision_function(const SvmModel& model, std::span<const double> kernel_row) {
  return decision_function(
      model, Eigen::Map<const Eigen::VectorXd>(kernel_row.data(), static_cast<Eigen::Index>(kernel_row.size())));
}

int predict(const SvmModel& model, const Eigen::Ref<const Eigen::VectorXd>& kernel_row) {
  return decision_function(model, kernel_row) >= 0.0 ? 1 : -1;
}

double test_error(const SvmModel& model, const Eigen::MatrixXd& test_rows, std::span<const int> test_labels) {
  if (test_labels.empty()) throw SvmError("empty test set");
  if (static_cast<std::size_t>(test_rows.rows()) != test_labels.size()) {
    throw SvmError("test rows and labels disagree in length");
  }
  std::size_t wrong = 0;
  for (Eigen::Index r = 0; r < test_rows.rows(); ++r) {
    const Eigen::VectorXd row = test_rows.row(r).transpose();
    if (predict(model, row) != test_labels[static_cast<std::size_t>(r)]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(test_labels.size());
}

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, std::size_t folds,
                                                       std::uint64_t seed) {
  if (folds < 2) throw SvmError("cross-validation needs at least two folds");
  check_labels(labels);
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> out(folds);
  std::size_t slot = 0;
  for (int cls : {1, -1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) members.push_back(i);
    }
    if (members.size() < folds) {
      throw SvmError("class " + std::to_string(cls) + " has " + std::to_string(members.size()) +
                     " samples, fewer than the " + std::to_string(folds) + " folds; some fold would hold a single class");
    }
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t m : members) {
      out[slot % folds].push_back(m);
      ++slot;
    }
  }
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

std::string CvReport::to_table() const {
  std::ostringstream os;
  os << std::left << std::setw(10) << "C" << std::setw(10) << "sigma" << "mean_error\n";
  os << std::fixed;
  for (const CvEntry& e : grid) {
    os << std::setw(10) << std::setprecision(4) << e.penalty;
    if (e.sigma) {
      os << std::setw(10) << std::setprecision(4) << *e.sigma;
    } else {
      os << std::setw(10) << "-";
    }
    os << std::setprecision(6) << e.mean_error << '\n';
  }
  return os.str();
}

CvReport cross_validate(const Eigen::MatrixXd& divergences, std::span<const int> labels, KernelTransform transform,
                        std::span<const double> c_grid, std::span<const double> sigma_grid, std::uint64_t seed,
                        const CvOptions& options) {
  if (c_grid.empty()) throw SvmError("empty C grid");
  if (transform == KernelTransform::Gaussian && sigma_grid.empty()) throw SvmError("empty sigma grid");
  if (divergences.rows() != static_cast<Eigen::Index>(labels.size())) {
    throw SvmError("divergence matrix does not match the label count");
  }
  const auto folds = stratified_folds(labels, options.folds, seed);

  std::vector<std::optional<double>> sigmas;
  if (transform == KernelTransform::Gaussian) {
    sigmas.assign(sigma_grid.begin(), sigma_grid.end());
  } else {
    sigmas.push_back(std::nullopt);
  }

  CvReport report;
  for (double c : c_grid) {
    for (const auto& sigma : sigmas) {
      const Eigen::MatrixXd kernel = sigma ? kernel_from_divergence_matrix(divergences, KernelMode::Gaussian, *sigma)
                                           : kernel_from_divergence_matrix(divergences, KernelMode::NegDivergenceCpd, 0.0);
      double total = 0.0;
      for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<std::size_t> train;
        for (std::size_t g = 0; g < folds.size(); ++g) {
          if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
        }
        std::sort(train.begin(), train.end());
        const auto& test = folds[f];
        Eigen::MatrixXd k_train = submatrix(kernel, train, train);
        if (sigma) k_train = condition_gram(k_train, options.conditioning);
        const auto y_train = pick(labels, train);
        const auto y_test = pick(labels, test);
        const SvmModel model = solve_dual_smo(k_train, y_train, c, options.smo);
        total += test_error(model, submatrix(kernel, test, train), y_test);
      }
      report.grid.push_back({c, sigma, total / static_cast<double>(folds.size())});
    }
  }

  report.best = report.grid.front();
  for (const CvEntry& e : report.grid) {
    const double s = e.sigma.value_or(0.0);
    const double bs = report.best.sigma.value_or(0.0);
    const bool better = e.mean_error < report.best.mean_error ||
                        (e.mean_error == report.best.mean_error &&
                         (e.penalty < report.best.penalty || (e.penalty == report.best.penalty && s < bs)));
    if (better) report.best = e;
  }
  return report;
}

CvReport cross_validate(const LabeledDataset& data, const DivergenceSpec& spec, KernelTransform transform,
                        std::span<const double> c_grid, std::span<const double> sigma_grid, std::uint64_t seed,
                        const CvOptions& options) {
  data.validate();
  return cross_validate(divergence_matrix(spec, data.densities), data.labels, transform, c_grid, sigma_grid, seed,
                        options);
}

}  // namespace abdiv
