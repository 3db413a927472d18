#include "upimh/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "upimh/math_util.hpp"

namespace upimh {

ResamplingScheme resampling_scheme_from_string(const std::string& name) {
  if (name == "multinomial") return ResamplingScheme::multinomial;
  if (name == "systematic") return ResamplingScheme::systematic;
  throw std::invalid_argument("unknown resampling scheme: " + name);
}

const char* to_string(ResamplingScheme scheme) {
  return scheme == ResamplingScheme::multinomial ? "multinomial" : "systematic";
}

namespace {

// Cumulative weights in natural space. Normalized log weights have max 0,
// so the exp cannot overflow.
std::vector<double> cumulative_weights(std::span<const double> log_w) {
  if (log_w.empty()) throw std::invalid_argument("resample: empty weight vector");
  std::vector<double> cum(log_w.size());
  double acc = 0.0;
  for (size_t i = 0; i < log_w.size(); ++i) {
    acc += std::exp(log_w[i]);
    cum[i] = acc;
  }
  if (!(cum.back() > 0.0)) throw std::domain_error("resample: all weights are zero");
  return cum;
}

}  // namespace

std::vector<int> resample_multinomial(std::span<const double> log_w, int n_out,
                                      Rng& rng) {
  if (n_out < 1) throw std::invalid_argument("resample: n_out must be >= 1");
  const auto cum = cumulative_weights(log_w);
  const double total = cum.back();
  std::vector<int> idx(n_out);
  for (int i = 0; i < n_out; ++i) {
    const double u = rng.uniform() * total;
    idx[i] = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
    idx[i] = std::min<int>(idx[i], static_cast<int>(cum.size()) - 1);
  }
  return idx;
}

std::vector<int> resample_systematic(std::span<const double> log_w, int n_out,
                                     Rng& rng) {
  if (n_out < 1) throw std::invalid_argument("resample: n_out must be >= 1");
  const auto cum = cumulative_weights(log_w);
  const double total = cum.back();
  const double u = rng.uniform();
  std::vector<int> idx(n_out);
  int j = 0;
  const int n_in = static_cast<int>(cum.size());
  for (int i = 0; i < n_out; ++i) {
    const double p = total * (static_cast<double>(i) + u) / static_cast<double>(n_out);
    while (j < n_in - 1 && cum[j] <= p) ++j;
    idx[i] = j;
  }
  return idx;
}

std::vector<int> resample(ResamplingScheme scheme, std::span<const double> log_w,
                          int n_out, Rng& rng) {
  return scheme == ResamplingScheme::multinomial
             ? resample_multinomial(log_w, n_out, rng)
             : resample_systematic(log_w, n_out, rng);
}

}  // namespace upimh
