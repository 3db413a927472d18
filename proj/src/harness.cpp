#include "upimh/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "upimh/large_sample.hpp"
#include "upimh/math_util.hpp"

namespace upimh {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream-namespace tags so pilot runs never share a stream with the
// replicate farm.
constexpr std::uint64_t kSigmaTag = 0x5161;
constexpr std::uint64_t kGridSigmaTag = 0x6000;
constexpr std::uint64_t kGridRunTag = 0x7000;

}  // namespace

double percentile_nearest_rank(std::vector<double> samples, double percentile) {
  if (samples.empty()) throw std::invalid_argument("percentile: empty sample");
  if (percentile <= 0.0 || percentile > 100.0)
    throw std::invalid_argument("percentile: need 0 < p <= 100");
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<long>(samples.size());
  long rank = static_cast<long>(std::ceil(percentile / 100.0 * n));
  rank = std::clamp(rank, 1L, n);
  return samples[rank - 1];
}

Aggregate aggregate(const std::vector<std::optional<CoupledRunRecord>>& records,
                    double z_multiplier, long num_particles) {
  Aggregate agg;
  agg.z_multiplier = z_multiplier;

  std::vector<double> taus;
  size_t dim = 0;
  for (const auto& rec : records) {
    if (!rec.has_value()) {
      ++agg.failed;
      continue;
    }
    if (dim == 0) dim = rec->estimate.size();
    if (rec->estimate.size() != dim)
      throw std::invalid_argument("aggregate: inconsistent estimate dimensions");
    ++agg.count;
    taus.push_back(static_cast<double>(rec->tau));
    agg.mean_pf_calls += static_cast<double>(rec->pf_calls);
  }
  if (agg.count < 2)
    throw std::invalid_argument("aggregate: need >= 2 successful records");

  agg.mean.assign(dim, 0.0);
  agg.variance.assign(dim, 0.0);
  for (const auto& rec : records) {
    if (!rec.has_value()) continue;
    for (size_t c = 0; c < dim; ++c) agg.mean[c] += rec->estimate[c];
  }
  for (size_t c = 0; c < dim; ++c) agg.mean[c] /= agg.count;
  for (const auto& rec : records) {
    if (!rec.has_value()) continue;
    for (size_t c = 0; c < dim; ++c) {
      const double d = rec->estimate[c] - agg.mean[c];
      agg.variance[c] += d * d;
    }
  }
  agg.standard_error.resize(dim);
  agg.ci_lower.resize(dim);
  agg.ci_upper.resize(dim);
  for (size_t c = 0; c < dim; ++c) {
    agg.variance[c] /= (agg.count - 1);
    agg.standard_error[c] = std::sqrt(agg.variance[c] / agg.count);
    agg.ci_lower[c] = agg.mean[c] - z_multiplier * agg.standard_error[c];
    agg.ci_upper[c] = agg.mean[c] + z_multiplier * agg.standard_error[c];
  }

  agg.mean_pf_calls /= agg.count;
  agg.tau_mean = 0.0;
  for (double t : taus) agg.tau_mean += t;
  agg.tau_mean /= agg.count;
  agg.tau_p50 = percentile_nearest_rank(taus, 50.0);
  agg.tau_p95 = percentile_nearest_rank(taus, 95.0);
  agg.tau_p99 = percentile_nearest_rank(taus, 99.0);

  if (num_particles > 0) {
    agg.inefficiency.resize(dim);
    for (size_t c = 0; c < dim; ++c)
      agg.inefficiency[c] = agg.variance[c] * static_cast<double>(num_particles);
  }
  return agg;
}

ResultTable survival_curve(const std::vector<int>& tau_samples) {
  if (tau_samples.empty()) throw std::invalid_argument("survival_curve: empty sample");
  const int max_tau = *std::max_element(tau_samples.begin(), tau_samples.end());
  const double r = static_cast<double>(tau_samples.size());

  ResultTable table;
  table.columns = {"n", "survival", "se"};
  // One row past the largest tau, so the curve visibly reaches zero.
  for (int n = 1; n <= max_tau + 1; ++n) {
    long count = 0;
    for (int tau : tau_samples)
      if (tau >= n) ++count;
    const double p = count / r;
    table.add_row({static_cast<double>(n), p, std::sqrt(p * (1.0 - p) / r)});
  }
  return table;
}

namespace {

ExperimentOutput run_pf_experiment(const ExperimentConfig& cfg) {
  ModelInstance inst = build_model(cfg.model);
  Rng rng = Rng::stream(cfg.seed, 0);
  PfOutput out = run_pf(*inst.model, inst.observations, cfg.particles, cfg.scheme, rng,
                        PfRetain::full_cloud);
  ExperimentOutput result;
  result.table.columns = {"t", "log_lik_prefix"};
  for (int t = 0; t < inst.observations.horizon; ++t)
    result.table.add_row({static_cast<double>(t + 1), out.cloud->log_lik_prefix[t]});
  return result;
}

ExperimentOutput run_sigma_experiment(const ExperimentConfig& cfg) {
  ModelInstance inst = build_model(cfg.model);
  const SigmaEstimate est =
      estimate_sigma(*inst.model, inst.observations, cfg.particles, cfg.replicates,
                     derive_seed(cfg.seed, kSigmaTag), cfg.threads, cfg.scheme);
  ExperimentOutput result;
  result.table.columns = {"particles", "replicates", "sigma_hat", "se", "recommended_n"};
  result.table.add_row({static_cast<double>(cfg.particles),
                        static_cast<double>(est.replicates), est.sigma_hat,
                        est.standard_error,
                        static_cast<double>(recommend_n(cfg.particles, est.sigma_hat))});
  return result;
}

void append_coupled_rows(ResultTable& table,
                         const Replicated<CoupledRunRecord>& runs, size_t dim) {
  for (size_t r = 0; r < runs.results.size(); ++r) {
    std::vector<double> row;
    row.reserve(3 + dim);
    row.push_back(static_cast<double>(r));
    if (runs.results[r].has_value()) {
      const auto& rec = *runs.results[r];
      row.push_back(static_cast<double>(rec.tau));
      row.push_back(static_cast<double>(rec.pf_calls));
      for (size_t c = 0; c < dim; ++c) row.push_back(rec.estimate[c]);
    } else {
      row.push_back(-1.0);
      row.push_back(0.0);
      for (size_t c = 0; c < dim; ++c) row.push_back(kNaN);
    }
    table.add_row(std::move(row));
  }
}

std::vector<int> successful_taus(const Replicated<CoupledRunRecord>& runs) {
  std::vector<int> taus;
  for (const auto& rec : runs.results)
    if (rec.has_value()) taus.push_back(rec->tau);
  return taus;
}

ExperimentOutput run_coupled_experiment(const ExperimentConfig& cfg) {
  ModelInstance inst = build_model(cfg.model);
  PfProposalSource source(*inst.model, inst.observations, cfg.particles, cfg.scheme);
  EstimatorRequest request;
  request.h = make_test_function(cfg.h_selectors, cfg.h_component);
  request.k = cfg.k;
  request.m = cfg.m;
  request.rao_blackwell = cfg.rao_blackwell;

  auto runs = run_replicates<CoupledRunRecord>(
      cfg.replicates, cfg.seed, cfg.threads,
      [&](int, Rng& rng) { return run_coupled_pimh(source, request, rng); });

  const size_t dim = cfg.h_selectors.size();
  ExperimentOutput result;
  result.table.columns = {"replicate", "tau", "pf_calls"};
  for (size_t c = 0; c < dim; ++c)
    result.table.columns.push_back("estimate_" + std::to_string(c));
  append_coupled_rows(result.table, runs, dim);

  if (auto taus = successful_taus(runs); !taus.empty()) {
    ResultTable surv = survival_curve(taus);
    ResultTable two;
    two.columns = {"n", "survival"};
    for (const auto& row : surv.rows) two.add_row({row[0], row[1]});
    result.plot_data.emplace_back("tau_survival", std::move(two));
  }
  return result;
}

ExperimentOutput run_filtering_experiment(const ExperimentConfig& cfg) {
  ModelInstance inst = build_model(cfg.model);
  const TestFunction h = make_test_function(cfg.h_selectors, cfg.h_component);

  auto runs = run_replicates<FilteringResult>(
      cfg.replicates, cfg.seed, cfg.threads, [&](int, Rng& rng) {
        return unbiased_filtering(*inst.model, inst.observations, cfg.particles,
                                  cfg.scheme, h, cfg.k, cfg.m, rng);
      });

  const size_t dim = cfg.h_selectors.size();
  const int T = inst.observations.horizon;
  ExperimentOutput result;
  result.table.columns = {"replicate", "t", "tau"};
  for (size_t c = 0; c < dim; ++c)
    result.table.columns.push_back("estimate_" + std::to_string(c));

  std::vector<double> mean_by_t(T, 0.0);
  long ok_count = 0;
  for (size_t r = 0; r < runs.results.size(); ++r) {
    if (!runs.results[r].has_value()) {
      std::vector<double> row = {static_cast<double>(r), -1.0, -1.0};
      for (size_t c = 0; c < dim; ++c) row.push_back(kNaN);
      result.table.add_row(std::move(row));
      continue;
    }
    ++ok_count;
    const auto& fr = *runs.results[r];
    for (int t = 0; t < T; ++t) {
      const auto& rec = fr.per_t[t];
      std::vector<double> row = {static_cast<double>(r), static_cast<double>(t + 1),
                                 static_cast<double>(rec.tau)};
      for (size_t c = 0; c < dim; ++c) row.push_back(rec.estimate[c]);
      result.table.add_row(std::move(row));
      mean_by_t[t] += rec.estimate[0];
    }
  }

  if (ok_count > 0) {
    ResultTable means;
    means.columns = {"t", "mean_estimate_0"};
    for (int t = 0; t < T; ++t)
      means.add_row({static_cast<double>(t + 1), mean_by_t[t] / ok_count});
    result.plot_data.emplace_back("filtering_mean", std::move(means));
  }
  return result;
}

ExperimentOutput run_large_sample_experiment(const ExperimentConfig& cfg) {
  double sigma = cfg.sigma;
  if (!(sigma > 0.0)) {
    ModelInstance inst = build_model(cfg.model);
    sigma = estimate_sigma(*inst.model, inst.observations, cfg.particles,
                           cfg.sigma_replicates, derive_seed(cfg.seed, kSigmaTag),
                           cfg.threads, cfg.scheme)
                .sigma_hat;
    if (!(sigma > 0.0))
      throw std::runtime_error("large-sample: estimated sigma is zero");
  }

  const double e_tau = expected_tau(sigma);
  const double p_one = tau_one_closed(sigma);

  ExperimentOutput result;
  result.table.columns = {"n", "pmf", "survival", "sigma", "expected_tau", "p_tau_one"};
  ResultTable pmf_plot, surv_plot;
  pmf_plot.columns = {"n", "pmf"};
  surv_plot.columns = {"n", "survival"};

  double survival = 1.0;
  for (int n = 1; n <= cfg.n_max; ++n) {
    const double p = tau_pmf(n, sigma);
    result.table.add_row({static_cast<double>(n), p, survival, sigma, e_tau, p_one});
    pmf_plot.add_row({static_cast<double>(n), p});
    surv_plot.add_row({static_cast<double>(n), survival});
    survival = std::max(0.0, survival - p);
  }
  result.plot_data.emplace_back("tau_pmf", std::move(pmf_plot));
  result.plot_data.emplace_back("tau_survival", std::move(surv_plot));
  return result;
}

ExperimentOutput run_smc_experiment(const ExperimentConfig& cfg) {
  const SmcConfig& sc = cfg.smc;
  TemperedTarget target;
  if (sc.target == "mixture") {
    MixtureTarget mix;
    mix.num_components = sc.mixture_components;
    mix.component_sd = sc.mixture_sd;
    mix.box_halfwidth = sc.box_halfwidth;
    Rng data_rng(derive_seed(sc.data_seed, 0xDA7Aull));
    mix.data = simulate_mixture_data(sc.mixture_true_means, sc.mixture_sd,
                                     sc.mixture_obs, data_rng);
    target = make_tempered_mixture(mix, sc.temperatures, sc.mh_scale, sc.mh_steps);
  } else {
    // Conjugate check target: N(0,1) prior, single Gaussian observation.
    const double y0 = sc.conjugate_y;
    target.dim = 1;
    target.prior_sampler = [](Rng& rng, std::span<double> x) { x[0] = rng.normal(); };
    target.log_prior = [](std::span<const double> x) { return -0.5 * x[0] * x[0]; };
    target.log_likelihood = [y0](std::span<const double> x) {
      return normal_logpdf(y0, x[0], 1.0);
    };
    target.betas = tempering_schedule(sc.temperatures);
    target.mh_proposal_scale = sc.mh_scale;
    target.mh_steps_per_temperature = sc.mh_steps;
  }

  SmcProposalSource source(target, cfg.particles, sc.resample);
  EstimatorRequest request;
  request.h = make_test_function(cfg.h_selectors, cfg.h_component);
  request.k = cfg.k;
  request.m = cfg.m;
  request.rao_blackwell = cfg.rao_blackwell;

  auto runs = run_replicates<CoupledRunRecord>(
      cfg.replicates, cfg.seed, cfg.threads,
      [&](int, Rng& rng) { return run_coupled_pimh(source, request, rng); });

  const size_t dim = cfg.h_selectors.size();
  ExperimentOutput result;
  result.table.columns = {"replicate", "tau", "pf_calls"};
  for (size_t c = 0; c < dim; ++c)
    result.table.columns.push_back("estimate_" + std::to_string(c));
  append_coupled_rows(result.table, runs, dim);

  if (auto taus = successful_taus(runs); !taus.empty()) {
    ResultTable surv = survival_curve(taus);
    ResultTable two;
    two.columns = {"n", "survival"};
    for (const auto& row : surv.rows) two.add_row({row[0], row[1]});
    result.plot_data.emplace_back("tau_survival", std::move(two));
  }
  return result;
}

ExperimentOutput run_inefficiency_grid(const ExperimentConfig& cfg) {
  ModelInstance inst = build_model(cfg.model);
  EstimatorRequest request;
  request.h = make_test_function(cfg.h_selectors, cfg.h_component);
  request.k = cfg.k;
  request.m = cfg.m;
  request.rao_blackwell = cfg.rao_blackwell;
  const size_t dim = cfg.h_selectors.size();

  ExperimentOutput result;
  result.table.columns = {"particles", "sigma_hat", "tau_mean", "failed"};
  for (size_t c = 0; c < dim; ++c) {
    result.table.columns.push_back("var_" + std::to_string(c));
    result.table.columns.push_back("inefficiency_" + std::to_string(c));
  }
  ResultTable plot;
  plot.columns = {"sigma_hat", "inefficiency_0"};

  for (size_t g = 0; g < cfg.particle_grid.size(); ++g) {
    const int n_particles = cfg.particle_grid[g];
    const double sigma_hat =
        estimate_sigma(*inst.model, inst.observations, n_particles,
                       cfg.sigma_replicates, derive_seed(cfg.seed, kGridSigmaTag + g),
                       cfg.threads, cfg.scheme)
            .sigma_hat;

    PfProposalSource source(*inst.model, inst.observations, n_particles, cfg.scheme);
    auto runs = run_replicates<CoupledRunRecord>(
        cfg.replicates, derive_seed(cfg.seed, kGridRunTag + g), cfg.threads,
        [&](int, Rng& rng) { return run_coupled_pimh(source, request, rng); });
    const Aggregate agg = aggregate(runs.results, 3.0, n_particles);

    std::vector<double> row = {static_cast<double>(n_particles), sigma_hat,
                               agg.tau_mean, static_cast<double>(agg.failed)};
    for (size_t c = 0; c < dim; ++c) {
      row.push_back(agg.variance[c]);
      row.push_back(agg.inefficiency[c]);
    }
    result.table.add_row(std::move(row));
    plot.add_row({sigma_hat, agg.inefficiency[0]});
  }
  result.plot_data.emplace_back("inefficiency", std::move(plot));
  return result;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  config.validate_for_run();
  switch (config.kind) {
    case ExperimentKind::pf: return run_pf_experiment(config);
    case ExperimentKind::sigma: return run_sigma_experiment(config);
    case ExperimentKind::coupled: return run_coupled_experiment(config);
    case ExperimentKind::filtering: return run_filtering_experiment(config);
    case ExperimentKind::large_sample: return run_large_sample_experiment(config);
    case ExperimentKind::smc: return run_smc_experiment(config);
    case ExperimentKind::inefficiency_grid: return run_inefficiency_grid(config);
  }
  throw std::logic_error("unreachable experiment kind");
}

}  // namespace upimh
