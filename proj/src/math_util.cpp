#include "upimh/math_util.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace upimh {

double logsumexp(std::span<const double> v) {
  double max_v = kNegInf;
  for (double x : v) max_v = std::max(max_v, x);
  if (max_v == kNegInf) return kNegInf;
  double tot = 0.0;
  for (double x : v) tot += std::exp(x - max_v);
  return max_v + std::log(tot);
}

double normal_logpdf(double x, double mean, double var) {
  static const double kLogTwoPi = std::log(2.0 * M_PI);
  const double d = x - mean;
  return -0.5 * (kLogTwoPi + std::log(var) + d * d / var);
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double erfcx(double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("erfcx: requires x >= 0");
  if (x <= 20.0) {
    // Both factors are representable here; the product loses at most a
    // few ulps from the exp(x^2) rounding (x^2 <= 400 << log(DBL_MAX)).
    return std::exp(x * x) * std::erfc(x);
  }
  // Asymptotic continued series: erfcx(x) ~ 1/(x sqrt(pi)) * sum_k
  // (-1)^k (2k-1)!! / (2x^2)^k. At x = 20 the k = 8 term is ~1e-17.
  const double inv2x2 = 1.0 / (2.0 * x * x);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 8; ++k) {
    term *= -(2.0 * k - 1.0) * inv2x2;
    sum += term;
  }
  return sum / (x * std::sqrt(M_PI));
}

double log_norm_cdf(double x) {
  if (x >= -1.0) return std::log(norm_cdf(x));
  // Phi(x) = 0.5 erfc(-x/sqrt(2)) = 0.5 erfcx(-x/sqrt(2)) exp(-x^2/2)
  const double t = -x * M_SQRT1_2;
  return std::log(0.5 * erfcx(t)) - 0.5 * x * x;
}

}  // namespace upimh
