#ifndef UPIMH_HARNESS_HPP
#define UPIMH_HARNESS_HPP

#include <atomic>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "upimh/config.hpp"
#include "upimh/coupled_pimh.hpp"
#include "upimh/csv.hpp"

namespace upimh {

template <typename Result>
struct Replicated {
  std::vector<std::optional<Result>> results;  // ordered by replicate index
  std::vector<std::string> errors;             // empty when the run succeeded
  int failed = 0;
};

// Runs fn(replicate, rng) for each replicate on a bounded worker pool.
// Replicate r always sees the stream derived from (seed, r), so the
// output is identical for any thread count; failures are captured
// per row instead of aborting the batch.
template <typename Result, typename Fn>
Replicated<Result> run_replicates(int replicates, std::uint64_t seed, int threads,
                                  Fn&& fn) {
  Replicated<Result> out;
  out.results.resize(replicates);
  out.errors.resize(replicates);

  int n_threads = threads > 0 ? threads
                              : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, replicates));

  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      const int r = next.fetch_add(1);
      if (r >= replicates) return;
      try {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
        out.results[r] = fn(r, rng);
      } catch (const std::exception& e) {
        out.errors[r] = e.what();
      }
    }
  };

  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& r : out.results)
    if (!r.has_value()) ++out.failed;
  return out;
}

struct Aggregate {
  int count = 0;   // successful records
  int failed = 0;
  double z_multiplier = 3.0;
  std::vector<double> mean, variance, standard_error, ci_lower, ci_upper;
  double tau_mean = 0.0;
  double tau_p50 = 0.0, tau_p95 = 0.0, tau_p99 = 0.0;  // nearest-rank
  double mean_pf_calls = 0.0;
  // (m-k+1) V[H] N is attached by callers that know N; here V[H] N only.
  std::vector<double> inefficiency;  // variance * N, when N uniform (else empty)
};

// Component-wise summary of coupled-run records. Needs at least two
// successful records for the variance fields.
Aggregate aggregate(const std::vector<std::optional<CoupledRunRecord>>& records,
                    double z_multiplier = 3.0, long num_particles = 0);

// Empirical P[tau >= n] with binomial standard errors, n = 1..max(tau).
ResultTable survival_curve(const std::vector<int>& tau_samples);

double percentile_nearest_rank(std::vector<double> samples, double percentile);

struct ExperimentOutput {
  ResultTable table;
  // Two-column side tables for --plot-data.
  std::vector<std::pair<std::string, ResultTable>> plot_data;
};

ExperimentOutput run_experiment(const ExperimentConfig& config);

}  // namespace upimh

#endif
