#include "tvspec/special.hpp"

#include <cmath>
#include <limits>

#include "tvspec/errors.hpp"

namespace tvspec::special {

namespace {

constexpr int kMaxIterations = 1000;
constexpr double kEpsilon = 1e-16;
constexpr double kTiny = 1e-300;

// Continued fraction for I_x(a, b); converges fast for x < (a + 1)/(a + b + 2).
double incomplete_beta_cf(double x, double a, double b) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int n = 1; n <= kMaxIterations; ++n) {
    const double m = static_cast<double>(n);
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEpsilon) {
      return h;
    }
  }
  throw EvaluationError("incomplete beta continued fraction did not converge");
}

double log_prefactor(double x, double a, double b) {
  return a * std::log(x) + b * std::log1p(-x) - log_beta_function(a, b);
}

}  // namespace

double log_beta_function(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double beta_density(double x, double a, double b) {
  if (x < 0.0 || x > 1.0) return 0.0;
  if (x == 0.0) {
    if (a < 1.0) return std::numeric_limits<double>::infinity();
    return a == 1.0 ? std::exp(-log_beta_function(a, b)) : 0.0;
  }
  if (x == 1.0) {
    if (b < 1.0) return std::numeric_limits<double>::infinity();
    return b == 1.0 ? std::exp(-log_beta_function(a, b)) : 0.0;
  }
  return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) -
                  log_beta_function(a, b));
}

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw InvalidArgument("incomplete beta requires positive shapes");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_prefactor(x, a, b)) * incomplete_beta_cf(x, a, b) / a;
  }
  return 1.0 - std::exp(log_prefactor(1.0 - x, b, a)) * incomplete_beta_cf(1.0 - x, b, a) / b;
}

double beta_interval_mass(double a, double b, double lo, double hi) {
  const double upper_lo = regularized_incomplete_beta(1.0 - lo, b, a);  // P(X > lo)
  if (upper_lo < 0.5) {
    // Both tails are small on the right: subtract upper-tail probabilities.
    return upper_lo - regularized_incomplete_beta(1.0 - hi, b, a);
  }
  return regularized_incomplete_beta(hi, a, b) - regularized_incomplete_beta(lo, a, b);
}

}  // namespace tvspec::special
