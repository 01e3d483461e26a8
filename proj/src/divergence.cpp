#include "abdiv/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace abdiv {

namespace {

// (e^z - 1) / z, continuous at 0.
double expm1_ratio(double z) {
  if (z == 0.0) return 1.0;
  return std::expm1(z) / z;
}

// (e^z - 1 - z) / z^2, continuous at 0 (value 1/2).
double expm1_second(double z) {
  if (std::abs(z) < 0.5) {
    double term = 0.5;
    double sum = 0.5;
    for (int k = 1; k < 24; ++k) {
      term *= z / static_cast<double>(k + 2);
      sum += term;
    }
    return sum;
  }
  return (std::expm1(z) - z) / (z * z);
}

void check_positive(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
    std::ostringstream os;
    os << "divergence arguments must be finite and positive (x=" << x << ", y=" << y << ")";
    throw DomainError(os.str());
  }
}

// log(x / y); near x == y the difference x - y is exact, so log1p keeps full
// relative accuracy where log(x / y) would not.
double log_ratio(double x, double y) {
  const double q = x / y;
  if (q > 0.5 && q < 2.0) return std::log1p((x - y) / y);
  if (std::isnormal(q)) return std::log(q);
  return std::log(x) - std::log(y);
}

double checked_pow(double base, double exponent, const char* term) {
  const double v = std::pow(base, exponent);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "overflow evaluating " << term << " with base " << base << " and exponent " << exponent;
    throw RangeError(term, os.str());
  }
  return v;
}

double checked_result(double v, const char* what) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "non-finite divergence value in " << what;
    throw RangeError(what, os.str());
  }
  return v;
}

}  // namespace

double DivergenceSpec::homogeneity() const noexcept {
  return family == Family::DT ? 2.0 * t : params.gamma();
}

std::string DivergenceSpec::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (family) {
    case Family::AB: os << "ab:" << params.alpha << ',' << params.beta; break;
    case Family::ABS: os << "abs:" << params.alpha << ',' << params.beta; break;
    case Family::DT: os << "dt:" << t; break;
  }
  return os.str();
}

Branch branch_select(ParameterPair params, double eps_param) {
  const bool a0 = std::abs(params.alpha) <= eps_param;
  const bool b0 = std::abs(params.beta) <= eps_param;
  const bool g0 = std::abs(params.alpha + params.beta) <= eps_param;
  if (a0 && b0) return Branch::BothZero;
  if (b0) return Branch::AlphaOnly;
  if (a0) return Branch::BetaOnly;
  if (g0) return Branch::SkewPair;
  return Branch::Generic;
}

const char* branch_name(Branch b) noexcept {
  switch (b) {
    case Branch::Generic: return "Generic";
    case Branch::AlphaOnly: return "AlphaOnly";
    case Branch::SkewPair: return "SkewPair";
    case Branch::BetaOnly: return "BetaOnly";
    case Branch::BothZero: return "BothZero";
  }
  return "?";
}

// All branches are evaluated relative to y with u = log(x / y), so that the
// textbook closed forms become products of expm1-type factors and no
// difference of nearly equal powers is ever formed.
double ab_divergence(ParameterPair params, double x, double y, double eps_param) {
  check_positive(x, y);
  if (x == y) return 0.0;
  const double a = params.alpha;
  const double b = params.beta;
  const double u = log_ratio(x, y);
  const double u2 = u * u;
  switch (branch_select(params, eps_param)) {
    case Branch::Generic: {
      // -(1/ab)(x^a y^b - a/(a+b) x^(a+b) - b/(a+b) y^(a+b))
      //   = y^(a+b) u^2 [ (a+b) phi((a+b)u) - a phi(a u) ] / b
      const double g = a + b;
      const double scale = checked_pow(y, g, "y^(alpha+beta)");
      const double bracket = g * expm1_second(g * u) - a * expm1_second(a * u);
      return std::max(0.0, checked_result(scale * u2 * bracket / b, "ab generic"));
    }
    case Branch::AlphaOnly: {
      // (1/a^2)(x^a log(x^a/y^a) - x^a + y^a)
      const double z = a * u;
      const double scale = checked_pow(y, a, "y^alpha");
      return std::max(0.0, checked_result(scale * u2 * (expm1_ratio(z) - expm1_second(z)), "ab alpha-only"));
    }
    case Branch::BetaOnly: {
      // (1/b^2)(y^b log(y^b/x^b) - y^b + x^b)
      const double z = -b * u;
      const double scale = checked_pow(x, b, "x^beta");
      return std::max(0.0, checked_result(scale * u2 * (expm1_ratio(z) - expm1_second(z)), "ab beta-only"));
    }
    case Branch::SkewPair:
      // (1/a^2)(log(y^a/x^a) + x^a/y^a - 1)
      return checked_result(u2 * expm1_second(a * u), "ab skew-pair");
    case Branch::BothZero:
      return 0.5 * u2;
  }
  return 0.0;
}

double abs_divergence(ParameterPair params, double x, double y, SkewMode skew, double eps_param) {
  check_positive(x, y);
  if (x == y) return 0.0;
  // Evaluate with x > y so that the result is bitwise symmetric.
  if (x < y) std::swap(x, y);
  const double a = params.alpha;
  const double b = params.beta;
  const double u = log_ratio(x, y);
  const double u2 = u * u;
  switch (branch_select(params, eps_param)) {
    case Branch::Generic: {
      // (1/ab)(x^a - y^a)(x^b - y^b)
      const double scale = checked_pow(y, a + b, "y^(alpha+beta)");
      return checked_result(scale * u2 * expm1_ratio(a * u) * expm1_ratio(b * u), "abs generic");
    }
    case Branch::AlphaOnly: {
      // (1/a^2)(x^a - y^a) log(x^a/y^a)
      const double scale = checked_pow(y, a, "y^alpha");
      return checked_result(scale * u2 * expm1_ratio(a * u), "abs alpha-only");
    }
    case Branch::BetaOnly: {
      const double scale = checked_pow(y, b, "y^beta");
      return checked_result(scale * u2 * expm1_ratio(b * u), "abs beta-only");
    }
    case Branch::SkewPair: {
      // (1/a^2)(x^a/y^a + y^a/x^a - 2)
      const double z = a * u;
      double v = u2 * expm1_ratio(z) * expm1_ratio(-z);
      if (skew == SkewMode::Literal) {
        const double scale = checked_pow(y, a, "y^alpha");
        v += scale * u2 * expm1_ratio(z);
      }
      return checked_result(v, "abs skew-pair");
    }
    case Branch::BothZero:
      // Limit of the generic row as alpha, beta -> 0.
      return u2;
  }
  return 0.0;
}

double dt_squared(double t, double x, double y, double eps_param) {
  check_positive(x, y);
  if (x == y) return 0.0;
  if (x < y) std::swap(x, y);
  const double u = log_ratio(x, y);
  if (std::abs(t) <= eps_param) return 0.5 * u * u;
  const double scale = checked_pow(y, t, "y^t");
  const double diff = scale * u * expm1_ratio(t * u);
  return checked_result(0.5 * diff * diff, "dt");
}

double symmetrize_type1(ParameterPair params, double x, double y, double eps_param) {
  return 0.5 * (ab_divergence(params, x, y, eps_param) + ab_divergence(params, y, x, eps_param));
}

double scalar_divergence(const DivergenceSpec& spec, double x, double y) {
  switch (spec.family) {
    case Family::AB: return ab_divergence(spec.params, x, y, spec.param_eps);
    case Family::ABS: return abs_divergence(spec.params, x, y, spec.skew, spec.param_eps);
    case Family::DT: return dt_squared(spec.t, x, y, spec.param_eps);
  }
  return 0.0;
}

bool singular_at_zero(const DivergenceSpec& spec) noexcept {
  if (spec.family == Family::DT) return !(spec.t > spec.param_eps);
  if (branch_select(spec.params, spec.param_eps) != Branch::Generic) return true;
  return !(spec.params.alpha > 0.0 && spec.params.beta > 0.0);
}

double scalar_divergence_nonneg(const DivergenceSpec& spec, double x, double y) {
  if (x > 0.0 && y > 0.0) return scalar_divergence(spec, x, y);
  if (!(x >= 0.0) || !(y >= 0.0)) {
    std::ostringstream os;
    os << "divergence arguments must be nonnegative (x=" << x << ", y=" << y << ")";
    throw DomainError(os.str());
  }
  if (singular_at_zero(spec)) {
    std::ostringstream os;
    os << "zero argument is singular for spec " << spec.to_string();
    throw DomainError(os.str());
  }
  if (x == y) return 0.0;
  // Positive exponents only: direct power evaluation is exact at zero.
  switch (spec.family) {
    case Family::AB: {
      const double a = spec.params.alpha, b = spec.params.beta, g = a + b;
      const double v = -(std::pow(x, a) * std::pow(y, b) - a / g * std::pow(x, g) - b / g * std::pow(y, g)) / (a * b);
      return std::max(0.0, checked_result(v, "ab boundary"));
    }
    case Family::ABS: {
      const double a = spec.params.alpha, b = spec.params.beta;
      const double v = (std::pow(x, a) - std::pow(y, a)) * (std::pow(x, b) - std::pow(y, b)) / (a * b);
      return checked_result(v, "abs boundary");
    }
    case Family::DT: {
      const double d = (std::pow(x, spec.t) - std::pow(y, spec.t)) / spec.t;
      return checked_result(0.5 * d * d, "dt boundary");
    }
  }
  return 0.0;
}

}  // namespace abdiv
