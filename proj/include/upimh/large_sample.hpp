#ifndef UPIMH_LARGE_SAMPLE_HPP
#define UPIMH_LARGE_SAMPLE_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "upimh/model.hpp"
#include "upimh/resampling.hpp"

namespace upimh {

// Large-sample regime of the log-likelihood-estimate error Z: under the
// particle filter law Z ~ N(-sigma^2/2, sigma^2) and the PIMH Z-chain has
// invariant law N(+sigma^2/2, sigma^2).
struct SigmaModel {
  double sigma;

  explicit SigmaModel(double sigma_);

  double proposal_logpdf(double z) const;   // g_sigma
  double invariant_logpdf(double z) const;  // pi_sigma
  double sample_proposal(Rng& rng) const;   // draw from g_sigma
  double sample_invariant(Rng& rng) const;
};

// Average acceptance probability from state z under the limiting kernel:
// 1 - Phi((z + sigma^2/2)/sigma) + e^{-z} Phi((z - sigma^2/2)/sigma),
// with the second product computed through the log domain so large
// negative z cannot overflow.
double alpha_sigma(double z, double sigma);

// P[tau = 1] = (1 + exp(sigma^2) Erfc(sigma)) / 2, via the scaled
// complementary error function so large sigma cannot overflow.
double tau_one_closed(double sigma);

// P[tau = n] by quadrature of alpha (1-alpha)^{n-1} g_sigma over
// z in [-sigma^2/2 - 10 sigma, -sigma^2/2 + 10 sigma].
double tau_pmf(int n, double sigma);

// P[tau >= n] = 1 - sum_{j<n} pmf(j).
double tau_survival(int n, double sigma);

// E[tau] = E_g[1/alpha_sigma(Z)] over a +-12 sigma window.
double expected_tau(double sigma);

struct SigmaEstimate {
  double sigma_hat = 0.0;
  double standard_error = 0.0;  // jackknife SE of sigma_hat
  int replicates = 0;
};

// Sample standard deviation of log p_N over R independent particle
// filters. Any dead filter pass is an error (sigma undefined).
SigmaEstimate estimate_sigma(const Model& model, const ObservationSeries& obs,
                             int num_particles, int replicates,
                             std::uint64_t seed, int threads = 1,
                             ResamplingScheme scheme = ResamplingScheme::multinomial);

// N solving sigma(N) = 0.92 under sigma^2 proportional to 1/N.
long recommend_n(long pilot_n, double sigma_hat);

struct IactEstimate {
  double value = 1.0;
  int window = 1;  // truncation lag
  long n_samples = 0;
};

// Integrated autocorrelation time 1 + 2 sum rho(l), truncated by Geyer's
// initial-positive-sequence rule on adjacent autocorrelation pairs.
IactEstimate iact(std::span<const double> series);

}  // namespace upimh

#endif
