#pragma once

#include <stdexcept>
#include <string>

namespace abdiv {

/// Snapping tolerance used to decide whether alpha, beta or alpha+beta is zero.
inline constexpr double kDefaultParamEps = 1e-12;

/// Raised when a scalar divergence is evaluated outside of (0, inf) x (0, inf).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a power term overflows; `term()` names the offending quantity.
class RangeError : public std::range_error {
 public:
  RangeError(std::string term, const std::string& what)
      : std::range_error(what), term_(std::move(term)) {}
  const std::string& term() const noexcept { return term_; }

 private:
  std::string term_;
};

struct ParameterPair {
  double alpha = 1.0;
  double beta = 1.0;

  double gamma() const noexcept { return alpha + beta; }
  friend bool operator==(const ParameterPair&, const ParameterPair&) = default;
};

enum class Branch { Generic, AlphaOnly, SkewPair, BetaOnly, BothZero };

enum class Family { AB, ABS, DT };

/// How the alpha = -beta row of the symmetric divergence is evaluated.
/// `ContinuousLimit` is the limit of the generic row; `Literal` adds the
/// extra (x^a - y^a) log(x^a / y^a) term of the uncorrected closed form.
enum class SkewMode { ContinuousLimit, Literal };

struct DivergenceSpec {
  Family family = Family::ABS;
  ParameterPair params{};
  double t = 1.0;  // DT only
  SkewMode skew = SkewMode::ContinuousLimit;
  double param_eps = kDefaultParamEps;

  static DivergenceSpec ab(double alpha, double beta) { return {Family::AB, {alpha, beta}, 0.0}; }
  static DivergenceSpec abs(double alpha, double beta) { return {Family::ABS, {alpha, beta}, 0.0}; }
  static DivergenceSpec dt(double t) { return {Family::DT, {}, t}; }

  /// Homogeneity degree: alpha + beta for AB/ABS, 2t for DT.
  double homogeneity() const noexcept;
  bool symmetric() const noexcept { return family != Family::AB; }
  /// Canonical textual form, `ab:a,b`, `abs:a,b` or `dt:t`.
  std::string to_string() const;

  friend bool operator==(const DivergenceSpec&, const DivergenceSpec&) = default;
};

Branch branch_select(ParameterPair params, double eps_param = kDefaultParamEps);
const char* branch_name(Branch b) noexcept;

/// Alpha-beta divergence d_AB(x || y); generally asymmetric.
double ab_divergence(ParameterPair params, double x, double y, double eps_param = kDefaultParamEps);

/// Symmetric alpha-beta divergence, gamma-homogeneous with gamma = alpha + beta.
double abs_divergence(ParameterPair params, double x, double y,
                      SkewMode skew = SkewMode::ContinuousLimit,
                      double eps_param = kDefaultParamEps);

/// One-parameter family d_t^2(x, y) = (1/2) ((x^t - y^t) / t)^2, 2t-homogeneous.
double dt_squared(double t, double x, double y, double eps_param = kDefaultParamEps);

/// (1/2) [d_AB(x, y) + d_AB(y, x)].
double symmetrize_type1(ParameterPair params, double x, double y,
                        double eps_param = kDefaultParamEps);

/// Dispatches on `spec.family`; x, y > 0.
double scalar_divergence(const DivergenceSpec& spec, double x, double y);

/// True when d(x, 0) is undefined or infinite for the spec (logarithmic rows or
/// a nonpositive exponent), i.e. a zero atom cannot be fed to the divergence.
bool singular_at_zero(const DivergenceSpec& spec) noexcept;

/// Like scalar_divergence but admits zeros for specs that are finite at the
/// boundary. Throws DomainError for zeros under a singular spec.
double scalar_divergence_nonneg(const DivergenceSpec& spec, double x, double y);

}  // namespace abdiv
