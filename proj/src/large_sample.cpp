#include "upimh/large_sample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "upimh/math_util.hpp"
#include "upimh/particle_filter.hpp"
#include "upimh/quadrature.hpp"

namespace upimh {

SigmaModel::SigmaModel(double sigma_) : sigma(sigma_) {
  if (!(sigma > 0.0)) throw std::invalid_argument("SigmaModel: sigma must be > 0");
}

double SigmaModel::proposal_logpdf(double z) const {
  return normal_logpdf(z, -0.5 * sigma * sigma, sigma * sigma);
}

double SigmaModel::invariant_logpdf(double z) const {
  return normal_logpdf(z, 0.5 * sigma * sigma, sigma * sigma);
}

double SigmaModel::sample_proposal(Rng& rng) const {
  return rng.normal(-0.5 * sigma * sigma, sigma);
}

double SigmaModel::sample_invariant(Rng& rng) const {
  return rng.normal(0.5 * sigma * sigma, sigma);
}

double alpha_sigma(double z, double sigma) {
  if (!std::isfinite(z)) throw std::invalid_argument("alpha_sigma: non-finite z");
  if (!(sigma > 0.0)) throw std::invalid_argument("alpha_sigma: sigma must be > 0");
  const double half_s2 = 0.5 * sigma * sigma;
  const double reject_upper = norm_cdf(-(z + half_s2) / sigma);
  const double log_term = -z + log_norm_cdf((z - half_s2) / sigma);
  const double a = reject_upper + std::exp(log_term);
  if (a > 1.0) {
    if (a > 1.0 + 1e-12) throw std::runtime_error("alpha_sigma: left [0,1] beyond slack");
    return 1.0;
  }
  return a;
}

double tau_one_closed(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("tau_one_closed: sigma must be > 0");
  return 0.5 * (1.0 + erfcx(sigma));
}

double tau_pmf(int n, double sigma) {
  if (n < 1) throw std::invalid_argument("tau_pmf: n must be >= 1");
  if (!(sigma > 0.0)) throw std::invalid_argument("tau_pmf: sigma must be > 0");
  const SigmaModel sm(sigma);
  const double center = -0.5 * sigma * sigma;
  auto integrand = [&](double z) {
    const double a = alpha_sigma(z, sigma);
    return a * std::pow(1.0 - a, n - 1) * std::exp(sm.proposal_logpdf(z));
  };
  return integrate(integrand, center - 10.0 * sigma, center + 10.0 * sigma, 1e-10);
}

double tau_survival(int n, double sigma) {
  if (n < 1) throw std::invalid_argument("tau_survival: n must be >= 1");
  double acc = 1.0;
  for (int j = 1; j < n; ++j) acc -= tau_pmf(j, sigma);
  return std::max(acc, 0.0);
}

double expected_tau(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("expected_tau: sigma must be > 0");
  const SigmaModel sm(sigma);
  const double center = -0.5 * sigma * sigma;
  auto integrand = [&](double z) {
    return std::exp(sm.proposal_logpdf(z)) / alpha_sigma(z, sigma);
  };
  return integrate(integrand, center - 12.0 * sigma, center + 12.0 * sigma, 1e-8);
}

SigmaEstimate estimate_sigma(const Model& model, const ObservationSeries& obs,
                             int num_particles, int replicates, std::uint64_t seed,
                             int threads, ResamplingScheme scheme) {
  if (replicates < 2) throw std::invalid_argument("estimate_sigma: need replicates >= 2");
  std::vector<double> logliks(replicates);

  auto worker = [&](int begin, int end) {
    for (int r = begin; r < end; ++r) {
      Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
      logliks[r] = run_pf(model, obs, num_particles, scheme, rng).log_lik;
    }
  };
  const int n_threads = std::max(1, std::min(threads, replicates));
  if (n_threads == 1) {
    worker(0, replicates);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (replicates + n_threads - 1) / n_threads;
    for (int w = 0; w < n_threads; ++w) {
      const int begin = w * chunk, end = std::min(replicates, begin + chunk);
      if (begin < end) pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  double sum = 0.0, sum_sq = 0.0;
  for (double ll : logliks) {
    if (ll == kNegInf)
      throw std::runtime_error("estimate_sigma: dead particle filter pass");
    sum += ll;
    sum_sq += ll * ll;
  }
  const int R = replicates;
  const double mean = sum / R;
  const double var = (sum_sq - R * mean * mean) / (R - 1);
  const double sigma_hat = std::sqrt(std::max(var, 0.0));

  double se;
  if (R >= 3) {
    // Jackknife over leave-one-out standard deviations, in O(R) via the
    // sufficient statistics.
    double jk_sum = 0.0, jk_sum_sq = 0.0;
    for (double ll : logliks) {
      const double loo_mean = (sum - ll) / (R - 1);
      const double loo_var =
          (sum_sq - ll * ll - (R - 1) * loo_mean * loo_mean) / (R - 2);
      const double loo_sd = std::sqrt(std::max(loo_var, 0.0));
      jk_sum += loo_sd;
      jk_sum_sq += loo_sd * loo_sd;
    }
    const double jk_mean = jk_sum / R;
    se = std::sqrt(std::max(0.0, (R - 1.0) / R * (jk_sum_sq - R * jk_mean * jk_mean)));
  } else {
    se = sigma_hat / std::sqrt(2.0 * (R - 1.0));
  }

  SigmaEstimate out;
  out.sigma_hat = sigma_hat;
  out.standard_error = se;
  out.replicates = R;
  return out;
}

long recommend_n(long pilot_n, double sigma_hat) {
  if (pilot_n < 1) throw std::invalid_argument("recommend_n: pilot N must be >= 1");
  if (!(sigma_hat > 0.0)) throw std::invalid_argument("recommend_n: sigma must be > 0");
  const double target = 0.92;
  const long n = std::lround(pilot_n * sigma_hat * sigma_hat / (target * target));
  return std::max(1L, n);
}

IactEstimate iact(std::span<const double> series) {
  const long n = static_cast<long>(series.size());
  if (n < 100) throw std::invalid_argument("iact: need at least 100 samples");

  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : series) var += (x - mean) * (x - mean);
  var /= n;
  if (!(var > 0.0)) throw std::invalid_argument("iact: constant series");

  auto rho = [&](long lag) {
    double acc = 0.0;
    for (long i = 0; i + lag < n; ++i) acc += (series[i] - mean) * (series[i + lag] - mean);
    return acc / (n * var);
  };

  // Sum adjacent-pair autocorrelations Gamma_j = rho(2j) + rho(2j+1)
  // while they stay positive.
  double total = -1.0;  // cancels the double count of rho(0) below
  int window = 1;
  for (long j = 0; 2 * j + 1 < n; ++j) {
    const double pair = rho(2 * j) + rho(2 * j + 1);
    if (pair <= 0.0) break;
    total += 2.0 * pair;
    window = static_cast<int>(2 * j + 1);
  }

  IactEstimate out;
  out.value = total;
  out.window = window;
  out.n_samples = n;
  return out;
}

}  // namespace upimh
