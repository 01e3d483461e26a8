#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "abdiv/divergence.hpp"

namespace abdiv {

class DensityError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A zero atom met a divergence that is singular at zero.
class SingularAtomError : public std::domain_error {
 public:
  SingularAtomError(std::size_t atom, const std::string& what)
      : std::domain_error(what), atom_(atom) {}
  std::size_t atom() const noexcept { return atom_; }

 private:
  std::size_t atom_;
};

/// Density of a measure on finitely many atoms, expressed against an explicit
/// dominating measure: atom i carries mass values[i] * weights[i].
class DiscreteDensity {
 public:
  /// Validates and copies; throws DensityError on length mismatch, negative
  /// value, nonpositive weight or non-finite entry.
  DiscreteDensity(std::vector<double> values, std::vector<double> weights);

  /// Counting measure as dominating measure.
  static DiscreteDensity with_unit_weights(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double value(std::size_t i) const { return values_.at(i); }
  double weight(std::size_t i) const { return weights_.at(i); }

  /// Total mass sum_i values[i] * weights[i].
  double mass() const noexcept;
  /// Mass equals one within 1e-9.
  bool normalized() const noexcept { return normalized_; }

  friend bool operator==(const DiscreteDensity&, const DiscreteDensity&) = default;

 private:
  std::vector<double> values_;
  std::vector<double> weights_;
  bool normalized_ = false;
};

DiscreteDensity validate_density(std::vector<double> values, std::vector<double> weights);

/// Sum over atoms of weights[i] * d(P_i, Q_i). P and Q must share the same
/// dominating measure. Zero atoms are allowed only when the spec is finite at
/// zero; otherwise SingularAtomError names the first offending atom.
double divergence_measures(const DivergenceSpec& spec, const DiscreteDensity& p, const DiscreteDensity& q);

/// D(P, 0): divergence from the zero measure, finite only when
/// `singular_at_zero(spec)` is false.
double divergence_to_zero(const DivergenceSpec& spec, const DiscreteDensity& p);

/// (1/2)[D_AB(P, M) + D_AB(Q, M)] with M = (P + Q) / 2 atomwise.
double symmetrize_type2(ParameterPair params, const DiscreteDensity& p, const DiscreteDensity& q,
                        double eps_param = kDefaultParamEps);

/// Sum over atoms of weights[i] * symmetrize_type1(P_i, Q_i).
double symmetrize_type1_measures(ParameterPair params, const DiscreteDensity& p, const DiscreteDensity& q,
                                 double eps_param = kDefaultParamEps);

/// Re-expresses the same measure against new dominating weights.
DiscreteDensity change_dominating_measure(const DiscreteDensity& p, std::vector<double> new_weights);

/// Floors every value at epsilon; optionally rescales to unit mass.
DiscreteDensity smooth_density(const DiscreteDensity& p, double epsilon = 1e-9, bool renormalize = false);

// Named members of the symmetric and one-parameter families. The one-parameter
// names follow the d_t formula itself: t = 1/2 is the Hellinger form
// 2(sqrt p - sqrt q)^2 and t = -1/2 the symmetrized Itakura-Saito (COSH) form
// 2(1/sqrt p - 1/sqrt q)^2.
enum class DivergenceName {
  Euclidean,
  V1Hellinger,
  V2Hellinger,
  Hellinger,
  Jeffrey,
  SEuclidean,
  SItakuraSaito,
  EuclideanDT,
  HellingerDT,
};

struct NamedDivergence {
  DivergenceName name;
  std::string label;
  DivergenceSpec spec;
  /// Atomwise closed form phi(p, q) of the table row.
  double (*closed_form)(double p, double q);

  /// Sum over atoms of weights[i] * closed_form(P_i, Q_i).
  double evaluate(const DiscreteDensity& p, const DiscreteDensity& q) const;
};

NamedDivergence named_divergence(DivergenceName name);
/// Case-insensitive lookup; accepts the labels plus a few aliases
/// ("euclidian", "itakura-saito", ...). Throws std::invalid_argument.
NamedDivergence named_divergence(std::string_view name);
const std::vector<DivergenceName>& all_divergence_names();

}  // namespace abdiv
