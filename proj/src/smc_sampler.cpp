#include "upimh/smc_sampler.hpp"

#include <cmath>
#include <stdexcept>

#include "upimh/math_util.hpp"
#include "upimh/resampling.hpp"

namespace upimh {

void TemperedTarget::validate() const {
  if (dim < 1) throw std::invalid_argument("TemperedTarget: dim must be >= 1");
  if (!prior_sampler || !log_prior || !log_likelihood)
    throw std::invalid_argument("TemperedTarget: missing callable");
  if (betas.size() < 2) throw std::invalid_argument("TemperedTarget: need >= 2 temperatures");
  if (betas.front() != 0.0 || betas.back() != 1.0)
    throw std::invalid_argument("TemperedTarget: schedule must run from 0 to 1");
  for (size_t t = 1; t < betas.size(); ++t)
    if (!(betas[t] > betas[t - 1]))
      throw std::invalid_argument("TemperedTarget: schedule must be strictly increasing");
  if (mh_steps_per_temperature < 0)
    throw std::invalid_argument("TemperedTarget: negative move count");
}

std::vector<double> tempering_schedule(int num_temperatures) {
  if (num_temperatures < 2)
    throw std::invalid_argument("tempering_schedule: need at least 2 temperatures");
  std::vector<double> betas(num_temperatures);
  for (int t = 0; t < num_temperatures; ++t) {
    const double r = static_cast<double>(t) / (num_temperatures - 1);
    betas[t] = r * r;
  }
  return betas;
}

void MixtureTarget::validate() const {
  if (data.empty()) throw std::invalid_argument("MixtureTarget: need observations");
  if (num_components < 1) throw std::invalid_argument("MixtureTarget: need components");
  if (!(component_sd > 0.0)) throw std::invalid_argument("MixtureTarget: need sd > 0");
}

double mixture_loglik(std::span<const double> x, const MixtureTarget& target) {
  if (static_cast<int>(x.size()) != target.num_components)
    throw std::invalid_argument("mixture_loglik: dimension mismatch");
  const int D = target.num_components;
  const double var = target.component_sd * target.component_sd;
  const double log_d = std::log(static_cast<double>(D));
  double total = 0.0;
  std::vector<double> comp(D);
  for (double y : target.data) {
    for (int i = 0; i < D; ++i) comp[i] = normal_logpdf(y, x[i], var);
    // Fixed summation order keeps the value exactly invariant under
    // permutations of the component labels.
    std::sort(comp.begin(), comp.end());
    total += logsumexp(comp) - log_d;
  }
  return total;
}

std::vector<double> simulate_mixture_data(std::span<const double> means,
                                          double component_sd, int n_obs, Rng& rng) {
  if (means.empty() || n_obs < 1)
    throw std::invalid_argument("simulate_mixture_data: bad arguments");
  std::vector<double> data(n_obs);
  for (int n = 0; n < n_obs; ++n) {
    const auto i = rng.uniform_index(means.size());
    data[n] = rng.normal(means[i], component_sd);
  }
  return data;
}

TemperedTarget make_tempered_mixture(const MixtureTarget& target, int num_temperatures,
                                     double mh_scale, int mh_steps) {
  target.validate();
  TemperedTarget out;
  out.dim = target.num_components;
  const double box = target.box_halfwidth;
  out.prior_sampler = [box](Rng& rng, std::span<double> x) {
    for (double& xi : x) xi = rng.uniform(-box, box);
  };
  out.log_prior = [box](std::span<const double> x) {
    for (double xi : x)
      if (xi < -box || xi > box) return kNegInf;
    return 0.0;
  };
  out.log_likelihood = [target](std::span<const double> x) {
    return mixture_loglik(x, target);
  };
  out.betas = tempering_schedule(num_temperatures);
  out.mh_proposal_scale = mh_scale;
  out.mh_steps_per_temperature = mh_steps;
  return out;
}

int rw_mh_move(std::span<double> x,
               const std::function<double(std::span<const double>)>& log_target,
               double scale, int n_steps, Rng& rng) {
  double cur = log_target(x);
  if (cur == kNegInf)
    throw std::invalid_argument("rw_mh_move: start has zero target density");
  std::vector<double> prop(x.size());
  int accepted = 0;
  for (int s = 0; s < n_steps; ++s) {
    for (size_t d = 0; d < x.size(); ++d) prop[d] = x[d] + scale * rng.normal();
    const double cand = log_target(prop);
    if (cand > kNegInf && std::log(rng.uniform()) <= cand - cur) {
      std::copy(prop.begin(), prop.end(), x.begin());
      cur = cand;
      ++accepted;
    }
  }
  return accepted;
}

namespace {

// Weighted point set over the static parameter space.
class PointCloud final : public ProposalCloud {
 public:
  PointCloud(std::vector<double> points, std::vector<double> log_norm_weights, int dim)
      : points_(std::move(points)), log_w_(std::move(log_norm_weights)), dim_(dim) {}

  std::vector<double> estimate(const TestFunction& h) const override {
    const int n = static_cast<int>(log_w_.size());
    std::vector<double> acc;
    Trajectory point(1, dim_);
    for (int i = 0; i < n; ++i) {
      const double wi = std::exp(log_w_[i]);
      if (wi == 0.0) continue;
      std::copy(points_.begin() + static_cast<size_t>(i) * dim_,
                points_.begin() + static_cast<size_t>(i + 1) * dim_,
                point.data.begin());
      const auto values = h(point);
      if (acc.empty()) acc.assign(values.size(), 0.0);
      for (size_t c = 0; c < values.size(); ++c) {
        if (!std::isfinite(values[c]))
          throw std::domain_error("PointCloud: h returned a non-finite value");
        acc[c] += wi * values[c];
      }
    }
    return acc;
  }

 private:
  std::vector<double> points_;
  std::vector<double> log_w_;
  int dim_;
};

}  // namespace

SmcOutput run_smc_sampler(const TemperedTarget& target, int num_particles,
                          bool resample_flag, Rng& rng, PfRetain retain) {
  target.validate();
  const int N = num_particles;
  if (N < 1) throw std::invalid_argument("run_smc_sampler: need particles");
  const int D = target.dim;
  const int T = static_cast<int>(target.betas.size());

  std::vector<double> points(static_cast<size_t>(N) * D);
  std::vector<double> loglik(N);       // cached log L at each point
  std::vector<double> cum_logw(N, 0.0);  // per-path product of weights (AIS mode)
  auto point = [&](int i) {
    return std::span<double>{points.data() + static_cast<size_t>(i) * D,
                             static_cast<size_t>(D)};
  };

  for (int i = 0; i < N; ++i) {
    target.prior_sampler(rng, point(i));
    loglik[i] = target.log_likelihood(point(i));
    if (std::isnan(loglik[i]))
      throw std::logic_error("run_smc_sampler: log likelihood returned NaN");
  }

  const double log_n = std::log(static_cast<double>(N));
  double log_z = 0.0;
  bool dead = false;
  std::vector<double> logw(N), log_norm_w(N, -log_n);
  std::vector<double> moved(static_cast<size_t>(N) * D);

  for (int t = 1; t < T && !dead; ++t) {
    const double dbeta = target.betas[t] - target.betas[t - 1];
    for (int i = 0; i < N; ++i) logw[i] = dbeta * loglik[i];

    if (resample_flag) {
      const double lse = logsumexp(logw);
      if (lse == kNegInf) { dead = true; break; }
      log_z += lse - log_n;
      for (int i = 0; i < N; ++i) log_norm_w[i] = logw[i] - lse;

      auto ancestors = resample_multinomial(log_norm_w, N, rng);
      std::vector<double> new_loglik(N);
      for (int i = 0; i < N; ++i) {
        const int a = ancestors[i];
        std::copy(points.begin() + static_cast<size_t>(a) * D,
                  points.begin() + static_cast<size_t>(a + 1) * D,
                  moved.begin() + static_cast<size_t>(i) * D);
        new_loglik[i] = loglik[a];
      }
      points.swap(moved);
      loglik.swap(new_loglik);
      std::fill(log_norm_w.begin(), log_norm_w.end(), -log_n);
    } else {
      for (int i = 0; i < N; ++i) cum_logw[i] += logw[i];
      const double lse = logsumexp(cum_logw);
      if (lse == kNegInf) { dead = true; break; }
      log_z = lse - log_n;
      for (int i = 0; i < N; ++i) log_norm_w[i] = cum_logw[i] - lse;
    }

    // Move under pi_t, tracking the likelihood cache alongside.
    const double beta = target.betas[t];
    for (int i = 0; i < N; ++i) {
      auto x = point(i);
      double cur_prior = target.log_prior(x);
      double cur_ll = loglik[i];
      std::vector<double> prop(D);
      for (int s = 0; s < target.mh_steps_per_temperature; ++s) {
        for (int d = 0; d < D; ++d)
          prop[d] = x[d] + target.mh_proposal_scale * rng.normal();
        const double prop_prior = target.log_prior(prop);
        const double prop_ll =
            prop_prior > kNegInf ? target.log_likelihood(prop) : kNegInf;
        const double prop_combined =
            prop_prior > kNegInf && prop_ll > kNegInf ? prop_prior + beta * prop_ll
                                                      : kNegInf;
        if (prop_combined == kNegInf) continue;  // zero-density proposal
        const double cur_combined =
            cur_ll > kNegInf ? cur_prior + beta * cur_ll : kNegInf;
        if (cur_combined == kNegInf ||
            std::log(rng.uniform()) <= prop_combined - cur_combined) {
          std::copy(prop.begin(), prop.end(), x.begin());
          cur_prior = prop_prior;
          cur_ll = prop_ll;
        }
      }
      loglik[i] = cur_ll;
    }
  }

  SmcOutput out;
  if (dead) {
    out.log_evidence = kNegInf;
    return out;
  }
  out.log_evidence = log_z;

  // Final draw: leaf with probability W_T^i.
  {
    const double u = rng.uniform();
    double acc = 0.0;
    int pick = N - 1;
    for (int i = 0; i < N; ++i) {
      acc += std::exp(log_norm_w[i]);
      if (u < acc) { pick = i; break; }
    }
    out.drawn = Trajectory(1, D);
    auto src = point(pick);
    std::copy(src.begin(), src.end(), out.drawn.data.begin());
  }

  if (retain == PfRetain::full_cloud)
    out.cloud = std::make_shared<PointCloud>(std::move(points), std::move(log_norm_w), D);
  return out;
}

SmcProposalSource::SmcProposalSource(const TemperedTarget& target, int num_particles,
                                     bool resample)
    : target_(target), num_particles_(num_particles), resample_(resample) {
  target.validate();
  if (num_particles < 1) throw std::invalid_argument("SmcProposalSource: need particles");
}

ProposalDraw SmcProposalSource::propose(Rng& rng, bool retain_cloud) const {
  SmcOutput out = run_smc_sampler(target_, num_particles_, resample_, rng,
                                  retain_cloud ? PfRetain::full_cloud
                                               : PfRetain::trajectory_only);
  ProposalDraw draw;
  draw.sample = std::move(out.drawn);
  draw.log_estimate = out.log_evidence;
  draw.cloud = std::move(out.cloud);
  return draw;
}

}  // namespace upimh
