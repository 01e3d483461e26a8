#include "abdiv/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace abdiv {

namespace {

bool near(double a, double b, double eps) { return std::abs(a - b) <= eps; }

template <typename F>
double atom_sum(const DiscreteDensity& p, const DiscreteDensity& q, F&& f) {
  if (p.size() != q.size()) throw DensityError("densities have different atom counts");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += p.weight(i) * f(p.value(i), q.value(i));
  return s;
}

void require_symmetric_family(const DivergenceSpec& spec) {
  if (!spec.symmetric()) {
    throw UnsupportedSpecError("Gram matrices need a symmetric divergence; got " + spec.to_string());
  }
}

}  // namespace

const char* kernel_mode_name(KernelMode m) noexcept {
  switch (m) {
    case KernelMode::NegDivergenceCpd: return "cpd";
    case KernelMode::LemmaPd: return "lemma";
    case KernelMode::Gaussian: return "gaussian";
  }
  return "?";
}

void KernelSpec::validate() const {
  if (mode == KernelMode::Gaussian && !(sigma > 0.0 && std::isfinite(sigma))) {
    std::ostringstream os;
    os << "gaussian kernel needs sigma > 0 (got " << sigma << ")";
    throw std::invalid_argument(os.str());
  }
}

std::optional<double> kernel_closed_form(const DivergenceSpec& spec, const DiscreteDensity& p,
                                         const DiscreteDensity& q) {
  const double eps = spec.param_eps;
  if (spec.family == Family::DT) {
    const double t = spec.t;
    if (std::abs(t) <= eps) return std::nullopt;
    const double c = 1.0 / (2.0 * t * t);
    return c * atom_sum(p, q, [t](double a, double b) { return std::pow(a, t) * std::pow(b, t); });
  }
  if (spec.family != Family::ABS) return std::nullopt;
  const double a = spec.params.alpha;
  const double b = spec.params.beta;
  if (near(a, 1.0, eps) && near(b, 1.0, eps)) {
    return atom_sum(p, q, [](double x, double y) { return x * y; });
  }
  if (near(a, 0.5, eps) && near(b, 1.0, eps)) {
    return atom_sum(p, q, [](double x, double y) { return y * std::sqrt(x) + x * std::sqrt(y); });
  }
  if (near(a, 0.5, eps) && near(b, 0.5, eps)) {
    return 4.0 * atom_sum(p, q, [](double x, double y) { return std::sqrt(x * y); });
  }
  if (near(a, 1.0, eps) && near(b, 0.0, eps)) {
    return 0.5 * atom_sum(p, q, [](double x, double y) {
      const double l = x == y ? 0.0 : std::log(x / y);
      return (y - x) * l - x - y;
    });
  }
  return std::nullopt;
}

double kernel_from_divergence(const DivergenceSpec& spec, const DiscreteDensity& p, const DiscreteDensity& q) {
  if (!singular_at_zero(spec)) {
    const double dpq = divergence_measures(spec, p, q);
    return 0.5 * (-dpq + (divergence_to_zero(spec, p) + divergence_to_zero(spec, q)));
  }
  if (auto closed = kernel_closed_form(spec, p, q)) return *closed;
  throw UnsupportedSpecError("no pd kernel available for " + spec.to_string() +
                             ": divergence to the zero measure is infinite and no closed form is known");
}

double gaussian_kernel(const DivergenceSpec& spec, double sigma, const DiscreteDensity& p, const DiscreteDensity& q) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian kernel needs sigma > 0");
  return std::exp(-divergence_measures(spec, p, q) / (2.0 * sigma * sigma));
}

double kernel_value(const KernelSpec& spec, const DiscreteDensity& p, const DiscreteDensity& q) {
  switch (spec.mode) {
    case KernelMode::NegDivergenceCpd: return -divergence_measures(spec.base, p, q);
    case KernelMode::LemmaPd: return kernel_from_divergence(spec.base, p, q);
    case KernelMode::Gaussian: return gaussian_kernel(spec.base, spec.sigma, p, q);
  }
  return 0.0;
}

Eigen::MatrixXd divergence_matrix(const DivergenceSpec& spec, std::span<const DiscreteDensity> data) {
  require_symmetric_family(spec);
  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      try {
        d(i, j) = d(j, i) = divergence_measures(spec, data[i], data[j]);
      } catch (const std::exception& e) {
        std::ostringstream os;
        os << "divergence (" << i << ", " << j << "): " << e.what();
        throw GramElementError(i, j, os.str());
      }
    }
  }
  return d;
}

GramMatrix gram(const KernelSpec& spec, std::span<const DiscreteDensity> data) {
  spec.validate();
  require_symmetric_family(spec.base);
  if (data.empty()) throw std::invalid_argument("gram needs at least one density");
  const auto n = static_cast<Eigen::Index>(data.size());
  GramMatrix g{Eigen::MatrixXd(n, n), spec};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      try {
        g.entries(i, j) = g.entries(j, i) = kernel_value(spec, data[i], data[j]);
      } catch (const std::exception& e) {
        std::ostringstream os;
        os << "kernel (" << i << ", " << j << "): " << e.what();
        throw GramElementError(i, j, os.str());
      }
    }
  }
  return g;
}

Eigen::MatrixXd cross_kernel(const KernelSpec& spec, std::span<const DiscreteDensity> queries,
                             std::span<const DiscreteDensity> reference) {
  spec.validate();
  const auto nq = static_cast<Eigen::Index>(queries.size());
  const auto nr = static_cast<Eigen::Index>(reference.size());
  Eigen::MatrixXd k(nq, nr);
  for (Eigen::Index i = 0; i < nq; ++i) {
    for (Eigen::Index j = 0; j < nr; ++j) {
      try {
        k(i, j) = kernel_value(spec, queries[i], reference[j]);
      } catch (const std::exception& e) {
        std::ostringstream os;
        os << "kernel (" << i << ", " << j << "): " << e.what();
        throw GramElementError(i, j, os.str());
      }
    }
  }
  return k;
}

Eigen::MatrixXd kernel_from_divergence_matrix(const Eigen::MatrixXd& d, KernelMode mode, double sigma) {
  switch (mode) {
    case KernelMode::NegDivergenceCpd: return -d;
    case KernelMode::Gaussian: {
      if (!(sigma > 0.0)) throw std::invalid_argument("gaussian kernel needs sigma > 0");
      const double s = 1.0 / (2.0 * sigma * sigma);
      return (-s * d.array()).exp().matrix();
    }
    case KernelMode::LemmaPd:
      break;
  }
  throw std::invalid_argument("lemma kernels need the densities, not only their divergences");
}

double SpectrumReport::relative_min() const noexcept { return min_eig / std::max(1.0, std::abs(max_eig)); }

std::string SpectrumReport::to_key_value() const {
  std::ostringstream os;
  os.precision(12);
  os << "order=" << order << '\n'
     << "centered=" << (centered ? "true" : "false") << '\n'
     << "min_eig=" << min_eig << '\n'
     << "max_eig=" << max_eig << '\n'
     << "relative_min=" << relative_min() << '\n'
     << "tol=" << tol << '\n'
     << "verdict=" << (psd ? "psd" : "indefinite") << '\n';
  return os.str();
}

SpectrumReport psd_check(const Eigen::MatrixXd& g, double tol) {
  if (g.rows() != g.cols()) throw std::invalid_argument("psd_check needs a square matrix");
  if (!g.allFinite()) throw std::invalid_argument("psd_check: matrix has non-finite entries");
  if (!(tol > 0.0)) throw std::invalid_argument("psd_check: tolerance must be positive");
  SpectrumReport r;
  r.order = g.rows();
  r.tol = tol;
  if (g.rows() == 0) {
    r.psd = true;
    return r;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("psd_check: eigendecomposition failed");
  r.min_eig = es.eigenvalues().minCoeff();
  r.max_eig = es.eigenvalues().maxCoeff();
  r.psd = r.min_eig >= -tol * std::max(1.0, std::abs(r.max_eig));
  return r;
}

SpectrumReport psd_check(const GramMatrix& g, double tol) { return psd_check(g.entries, tol); }

SpectrumReport cpd_check(const Eigen::MatrixXd& divergences, double tol) {
  const Eigen::Index n = divergences.rows();
  if (n != divergences.cols()) throw std::invalid_argument("cpd_check needs a square matrix");
  if (!divergences.allFinite()) throw std::invalid_argument("cpd_check: matrix has non-finite entries");
  const double scale = std::max(1.0, divergences.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(divergences(i, i)) > tol * scale) {
      std::ostringstream os;
      os << "cpd_check: nonzero diagonal entry " << divergences(i, i) << " at " << i;
      throw std::invalid_argument(os.str());
    }
  }
  const Eigen::MatrixXd centering =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  const Eigen::MatrixXd projected = centering * (-divergences) * centering;
  SpectrumReport r = psd_check(0.5 * (projected + projected.transpose()), tol);
  r.centered = true;
  return r;
}

Eigen::MatrixXd lemma_gram_from_cpd(const Eigen::MatrixXd& cpd, Eigen::Index origin) {
  const Eigen::Index n = cpd.rows();
  if (origin < 0 || origin >= n) throw std::out_of_range("lemma origin index out of range");
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      k(i, j) = cpd(i, j) - cpd(i, origin) - cpd(origin, j) + cpd(origin, origin);
    }
  }
  return k;
}

std::vector<DiscreteDensity> sample_simplex_densities(std::size_t n, std::size_t atoms, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<DiscreteDensity> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> v(atoms);
    double s = 0.0;
    for (double& x : v) {
      // Exp(1) draws are a.s. positive; guard the measure-zero case anyway.
      do {
        x = expo(rng);
      } while (!(x > 0.0));
      s += x;
    }
    for (double& x : v) x /= s;
    out.push_back(DiscreteDensity::with_unit_weights(std::move(v)));
  }
  return out;
}

std::string ProbeResult::to_key_value(const DivergenceSpec& spec) const {
  std::ostringstream os;
  os.precision(12);
  os << "spec=" << spec.to_string() << '\n'
     << "trials=" << reports.size() << '\n'
     << "indefinite=" << indefinite_count << '\n'
     << "worst_relative_eig=" << worst_relative_eig << '\n'
     << "verdict=" << (indefinite_count == 0 ? "psd" : "indefinite") << '\n';
  for (std::size_t i = 0; i < reports.size(); ++i) {
    os << "[trial " << i << "]\n" << reports[i].to_key_value();
  }
  return os.str();
}

ProbeResult probe_hilbertianity(const DivergenceSpec& spec, std::size_t n, std::size_t trials, std::uint64_t seed,
                                std::size_t atoms, double tol) {
  if (n < 3) throw std::invalid_argument("probe needs n >= 3");
  if (trials < 1) throw std::invalid_argument("probe needs at least one trial");
  if (atoms < 1) throw std::invalid_argument("probe needs at least one atom");
  std::mt19937_64 rng(seed);
  ProbeResult result;
  result.worst_relative_eig = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    const auto data = sample_simplex_densities(n, atoms, rng);
    SpectrumReport r = cpd_check(divergence_matrix(spec, data), tol);
    result.worst_relative_eig = std::min(result.worst_relative_eig, r.relative_min());
    if (!r.psd) ++result.indefinite_count;
    result.reports.push_back(r);
  }
  return result;
}

}  // namespace abdiv
