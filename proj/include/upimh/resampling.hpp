#ifndef UPIMH_RESAMPLING_HPP
#define UPIMH_RESAMPLING_HPP

#include <span>
#include <string>
#include <vector>

#include "upimh/rng.hpp"

namespace upimh {

enum class ResamplingScheme { multinomial, systematic };

ResamplingScheme resampling_scheme_from_string(const std::string& name);
const char* to_string(ResamplingScheme scheme);

// Both schemes satisfy the unbiasedness identity
// E[#{i : A^i = k}] = n_out * W^k. Weights come in log space, normalized
// (logsumexp == 0); all-zero weights are an error. Returned indices are
// 0-based.
std::vector<int> resample_multinomial(std::span<const double> log_norm_weights,
                                      int n_out, Rng& rng);

// Single uniform driving a stratified inverse-CDF sweep; for uniform
// weights and n_out == N every index appears exactly once.
std::vector<int> resample_systematic(std::span<const double> log_norm_weights,
                                     int n_out, Rng& rng);

std::vector<int> resample(ResamplingScheme scheme,
                          std::span<const double> log_norm_weights, int n_out,
                          Rng& rng);

}  // namespace upimh

#endif
