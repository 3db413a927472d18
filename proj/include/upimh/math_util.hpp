#ifndef UPIMH_MATH_UTIL_HPP
#define UPIMH_MATH_UTIL_HPP

#include <limits>
#include <span>

namespace upimh {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(sum(exp(v))). Returns -inf for an all-(-inf) input; never NaN for
// inputs free of NaN/+inf.
double logsumexp(std::span<const double> v);

double normal_logpdf(double x, double mean, double var);

// Standard normal CDF.
double norm_cdf(double x);

// log(Phi(x)), stable far into the left tail (uses the scaled
// complementary error function below x ~ -1).
double log_norm_cdf(double x);

// exp(x^2) * erfc(x) for x >= 0 without overflow; relative error
// below ~1e-13 over the whole range.
double erfcx(double x);

}  // namespace upimh

#endif
