#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "abdiv/divergence.hpp"
#include "abdiv/measure.hpp"

namespace abdiv {

enum class KernelMode {
  NegDivergenceCpd,  // K = -D, conditionally positive definite
  LemmaPd,           // K = (1/2)(-D(P,Q) + D(P,0) + D(Q,0)), zero measure as origin
  Gaussian,          // K = exp(-D / (2 sigma^2))
};

const char* kernel_mode_name(KernelMode m) noexcept;

struct KernelSpec {
  DivergenceSpec base{};
  KernelMode mode = KernelMode::Gaussian;
  double sigma = 1.0;  // Gaussian mode only

  /// Throws std::invalid_argument unless sigma > 0 in Gaussian mode.
  void validate() const;
};

/// Symmetric n x n matrix of kernel (or divergence) evaluations.
struct GramMatrix {
  Eigen::MatrixXd entries;
  KernelSpec spec{};

  Eigen::Index order() const noexcept { return entries.rows(); }
};

class UnsupportedSpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Element (i, j) of a Gram matrix failed; the original message is kept.
class GramElementError : public std::runtime_error {
 public:
  GramElementError(std::size_t i, std::size_t j, const std::string& what)
      : std::runtime_error(what), i_(i), j_(j) {}
  std::size_t row() const noexcept { return i_; }
  std::size_t col() const noexcept { return j_; }

 private:
  std::size_t i_, j_;
};

/// Known pd-kernel closed forms, when one exists for the spec:
///   K_(1,1) = sum pq,  K_(1/2,1) = sum (q sqrt p + p sqrt q),  K_(1/2,1/2) = 4 sum sqrt(pq),
///   K_(1,0) = (1/2) sum ((q - p) log(p/q) - p - q),  K_t = (1 / 2t^2) sum p^t q^t  (t != 0).
std::optional<double> kernel_closed_form(const DivergenceSpec& spec, const DiscreteDensity& p,
                                         const DiscreteDensity& q);

/// (D(p, 0) + D(q, 0) - D(p, q)) / 2, the zero measure as origin. Falls back to the
/// closed form when D(., 0) is infinite; throws UnsupportedSpecError
/// when neither route exists.
double kernel_from_divergence(const DivergenceSpec& spec, const DiscreteDensity& p, const DiscreteDensity& q);

double gaussian_kernel(const DivergenceSpec& spec, double sigma, const DiscreteDensity& p, const DiscreteDensity& q);

double kernel_value(const KernelSpec& spec, const DiscreteDensity& p, const DiscreteDensity& q);

/// Pairwise divergence matrix (zero diagonal). Requires a symmetric family.
Eigen::MatrixXd divergence_matrix(const DivergenceSpec& spec, std::span<const DiscreteDensity> data);

GramMatrix gram(const KernelSpec& spec, std::span<const DiscreteDensity> data);

/// Kernel rows between `queries` and `reference`: result(q, r) = K(queries[q], reference[r]).
Eigen::MatrixXd cross_kernel(const KernelSpec& spec, std::span<const DiscreteDensity> queries,
                             std::span<const DiscreteDensity> reference);

/// Maps a divergence matrix to a kernel matrix entrywise (-D or exp(-D/2s^2)).
Eigen::MatrixXd kernel_from_divergence_matrix(const Eigen::MatrixXd& d, KernelMode mode, double sigma);

inline constexpr double kDefaultEigTol = 1e-8;

struct SpectrumReport {
  double min_eig = 0.0;
  double max_eig = 0.0;
  Eigen::Index order = 0;
  bool centered = false;
  bool psd = false;
  double tol = kDefaultEigTol;

  /// min_eig / max(1, |max_eig|)
  double relative_min() const noexcept;
  /// `key=value` lines, one per field.
  std::string to_key_value() const;
};

/// Full symmetric eigendecomposition; psd iff min_eig >= -tol * max(1, |max_eig|).
SpectrumReport psd_check(const Eigen::MatrixXd& g, double tol = kDefaultEigTol);
SpectrumReport psd_check(const GramMatrix& g, double tol = kDefaultEigTol);

/// Spectrum of -D restricted to the hyperplane sum(c) = 0, via J(-D)J with
/// the centering projector J = I - 11^T / n.
SpectrumReport cpd_check(const Eigen::MatrixXd& divergences, double tol = kDefaultEigTol);

/// pd kernel from a cpd kernel k with origin x0 = `origin`:
/// K_ij = k_ij - k_i0 - k_0j + k_00.
Eigen::MatrixXd lemma_gram_from_cpd(const Eigen::MatrixXd& cpd, Eigen::Index origin);

/// Densities on `atoms` atoms (unit weights) from normalized i.i.d.
/// Exp(1) draws, i.e. uniform on the simplex.
std::vector<DiscreteDensity> sample_simplex_densities(std::size_t n, std::size_t atoms, std::mt19937_64& rng);

struct ProbeResult {
  std::vector<SpectrumReport> reports;
  double worst_relative_eig = 0.0;
  std::size_t indefinite_count = 0;

  std::string to_key_value(const DivergenceSpec& spec) const;
};

/// Repeated cpd_check on random divergence Grams; deterministic given seed.
ProbeResult probe_hilbertianity(const DivergenceSpec& spec, std::size_t n, std::size_t trials, std::uint64_t seed,
                                std::size_t atoms = 8, double tol = kDefaultEigTol);

}  // namespace abdiv
