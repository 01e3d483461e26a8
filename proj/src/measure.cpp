#include "abdiv/measure.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace abdiv {

namespace {

void require_same_support(const DiscreteDensity& p, const DiscreteDensity& q) {
  if (p.size() != q.size()) {
    std::ostringstream os;
    os << "densities have different atom counts (" << p.size() << " vs " << q.size() << ")";
    throw DensityError(os.str());
  }
  const auto wp = p.weights();
  const auto wq = q.weights();
  if (!std::equal(wp.begin(), wp.end(), wq.begin())) {
    throw DensityError("densities are expressed against different dominating measures");
  }
}

double atom_divergence(const DivergenceSpec& spec, double x, double y, std::size_t atom) {
  try {
    return scalar_divergence_nonneg(spec, x, y);
  } catch (const DomainError& e) {
    std::ostringstream os;
    os << "atom " << atom << ": " << e.what();
    throw SingularAtomError(atom, os.str());
  }
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

double phi_euclidean(double p, double q) { return (p - q) * (p - q); }
double phi_v1_hellinger(double p, double q) { return 2.0 * (std::sqrt(p) - std::sqrt(q)) * (p - q); }
double phi_v2_hellinger(double p, double q) { return 2.0 * (std::sqrt(p) - std::sqrt(q)) * (p - q) / (p * q); }
double phi_hellinger(double p, double q) {
  const double d = std::sqrt(p) - std::sqrt(q);
  return 4.0 * d * d;
}
double phi_jeffrey(double p, double q) { return p == q ? 0.0 : (p - q) * std::log(p / q); }
double phi_s_euclidean(double p, double q) {
  const double d = 1.0 / p - 1.0 / q;
  return 0.5 * d * d;
}
double phi_s_itakura_saito(double p, double q) {
  const double d = 1.0 / std::sqrt(p) - 1.0 / std::sqrt(q);
  return 2.0 * d * d;
}
double phi_euclidean_dt(double p, double q) { return 0.5 * (p - q) * (p - q); }
double phi_hellinger_dt(double p, double q) {
  const double d = std::sqrt(p) - std::sqrt(q);
  return 2.0 * d * d;
}

}  // namespace

DiscreteDensity::DiscreteDensity(std::vector<double> values, std::vector<double> weights)
    : values_(std::move(values)), weights_(std::move(weights)) {
  if (values_.empty()) throw DensityError("density must have at least one atom");
  if (values_.size() != weights_.size()) {
    std::ostringstream os;
    os << "length mismatch: " << values_.size() << " values vs " << weights_.size() << " weights";
    throw DensityError(os.str());
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || !std::isfinite(weights_[i])) {
      std::ostringstream os;
      os << "non-finite entry at atom " << i;
      throw DensityError(os.str());
    }
    if (values_[i] < 0.0) {
      std::ostringstream os;
      os << "negative value " << values_[i] << " at atom " << i;
      throw DensityError(os.str());
    }
    if (!(weights_[i] > 0.0)) {
      std::ostringstream os;
      os << "nonpositive weight " << weights_[i] << " at atom " << i;
      throw DensityError(os.str());
    }
  }
  normalized_ = std::abs(mass() - 1.0) <= 1e-9;
}

DiscreteDensity DiscreteDensity::with_unit_weights(std::vector<double> values) {
  std::vector<double> w(values.size(), 1.0);
  return DiscreteDensity(std::move(values), std::move(w));
}

double DiscreteDensity::mass() const noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * weights_[i];
  return s;
}

DiscreteDensity validate_density(std::vector<double> values, std::vector<double> weights) {
  return DiscreteDensity(std::move(values), std::move(weights));
}

double divergence_measures(const DivergenceSpec& spec, const DiscreteDensity& p, const DiscreteDensity& q) {
  require_same_support(p, q);
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    total += p.weight(i) * atom_divergence(spec, p.value(i), q.value(i), i);
  }
  return total;
}

double divergence_to_zero(const DivergenceSpec& spec, const DiscreteDensity& p) {
  if (singular_at_zero(spec)) {
    throw DomainError("divergence to the zero measure is infinite for spec " + spec.to_string());
  }
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    total += p.weight(i) * scalar_divergence_nonneg(spec, p.value(i), 0.0);
  }
  return total;
}

double symmetrize_type2(ParameterPair params, const DiscreteDensity& p, const DiscreteDensity& q, double eps_param) {
  require_same_support(p, q);
  DivergenceSpec spec = DivergenceSpec::ab(params.alpha, params.beta);
  spec.param_eps = eps_param;
  double to_p = 0.0;
  double to_q = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p.value(i) + q.value(i));
    to_p += p.weight(i) * atom_divergence(spec, p.value(i), m, i);
    to_q += p.weight(i) * atom_divergence(spec, q.value(i), m, i);
  }
  return 0.5 * (to_p + to_q);
}

double symmetrize_type1_measures(ParameterPair params, const DiscreteDensity& p, const DiscreteDensity& q,
                                 double eps_param) {
  require_same_support(p, q);
  DivergenceSpec spec = DivergenceSpec::ab(params.alpha, params.beta);
  spec.param_eps = eps_param;
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pq = atom_divergence(spec, p.value(i), q.value(i), i);
    const double qp = atom_divergence(spec, q.value(i), p.value(i), i);
    total += p.weight(i) * 0.5 * (pq + qp);
  }
  return total;
}

DiscreteDensity change_dominating_measure(const DiscreteDensity& p, std::vector<double> new_weights) {
  if (new_weights.size() != p.size()) {
    throw DensityError("new dominating measure has a different atom count");
  }
  std::vector<double> values(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(new_weights[i] > 0.0) || !std::isfinite(new_weights[i])) {
      std::ostringstream os;
      os << "nonpositive weight " << new_weights[i] << " at atom " << i;
      throw DensityError(os.str());
    }
    values[i] = p.value(i) * p.weight(i) / new_weights[i];
  }
  return DiscreteDensity(std::move(values), std::move(new_weights));
}

DiscreteDensity smooth_density(const DiscreteDensity& p, double epsilon, bool renormalize) {
  if (!(epsilon > 0.0)) throw DensityError("smoothing epsilon must be positive");
  std::vector<double> values(p.values().begin(), p.values().end());
  for (double& v : values) v = std::max(v, epsilon);
  std::vector<double> weights(p.weights().begin(), p.weights().end());
  if (renormalize) {
    double m = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * weights[i];
    for (double& v : values) v /= m;
  }
  return DiscreteDensity(std::move(values), std::move(weights));
}

double NamedDivergence::evaluate(const DiscreteDensity& p, const DiscreteDensity& q) const {
  require_same_support(p, q);
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += p.weight(i) * closed_form(p.value(i), q.value(i));
  return total;
}

NamedDivergence named_divergence(DivergenceName name) {
  switch (name) {
    case DivergenceName::Euclidean:
      return {name, "Euclidean", DivergenceSpec::abs(1.0, 1.0), &phi_euclidean};
    case DivergenceName::V1Hellinger:
      return {name, "V1-Hellinger", DivergenceSpec::abs(0.5, 1.0), &phi_v1_hellinger};
    case DivergenceName::V2Hellinger:
      return {name, "V2-Hellinger", DivergenceSpec::abs(0.5, -1.0), &phi_v2_hellinger};
    case DivergenceName::Hellinger:
      return {name, "Hellinger", DivergenceSpec::abs(0.5, 0.5), &phi_hellinger};
    case DivergenceName::Jeffrey:
      return {name, "Jeffrey", DivergenceSpec::abs(1.0, 0.0), &phi_jeffrey};
    case DivergenceName::SEuclidean:
      return {name, "S-Euclidean", DivergenceSpec::dt(-1.0), &phi_s_euclidean};
    case DivergenceName::SItakuraSaito:
      return {name, "S-ItakuraSaito", DivergenceSpec::dt(-0.5), &phi_s_itakura_saito};
    case DivergenceName::EuclideanDT:
      return {name, "Euclidean-DT", DivergenceSpec::dt(1.0), &phi_euclidean_dt};
    case DivergenceName::HellingerDT:
      return {name, "Hellinger-DT", DivergenceSpec::dt(0.5), &phi_hellinger_dt};
  }
  throw std::invalid_argument("unknown divergence name");
}

const std::vector<DivergenceName>& all_divergence_names() {
  static const std::vector<DivergenceName> names = {
      DivergenceName::Euclidean,  DivergenceName::V1Hellinger,   DivergenceName::V2Hellinger,
      DivergenceName::Hellinger,  DivergenceName::Jeffrey,       DivergenceName::SEuclidean,
      DivergenceName::SItakuraSaito, DivergenceName::EuclideanDT, DivergenceName::HellingerDT,
  };
  return names;
}

NamedDivergence named_divergence(std::string_view name) {
  const std::string key = lowercase(name);
  for (DivergenceName n : all_divergence_names()) {
    NamedDivergence nd = named_divergence(n);
    if (lowercase(nd.label) == key) return nd;
  }
  struct Alias {
    const char* alias;
    DivergenceName name;
  };
  static constexpr Alias aliases[] = {
      {"euclidian", DivergenceName::Euclidean},
      {"v1hellinger", DivergenceName::V1Hellinger},
      {"v2hellinger", DivergenceName::V2Hellinger},
      {"jeffreys", DivergenceName::Jeffrey},
      {"s-euclidian", DivergenceName::SEuclidean},
      {"seuclidean", DivergenceName::SEuclidean},
      {"itakura-saito", DivergenceName::SItakuraSaito},
      {"itakurasaito", DivergenceName::SItakuraSaito},
      {"s-itakura-saito", DivergenceName::SItakuraSaito},
      {"cosh", DivergenceName::SItakuraSaito},
  };
  for (const auto& a : aliases) {
    if (key == a.alias) return named_divergence(a.name);
  }
  throw std::invalid_argument("unknown divergence name '" + std::string(name) + "'");
}

}  // namespace abdiv
