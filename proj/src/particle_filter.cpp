#include "upimh/particle_filter.hpp"

#include <cmath>
#include <stdexcept>

#include "upimh/math_util.hpp"

namespace upimh {

namespace {

// Normalizes a log-weight column in place; returns its logsumexp
// (-inf when every weight is zero).
double normalize_log_weights(std::span<double> log_w) {
  const double lse = logsumexp(log_w);
  if (lse == kNegInf) return kNegInf;
  for (double& w : log_w) w -= lse;
  return lse;
}

double column_ess(std::span<const double> log_norm_w) {
  double sum_sq = 0.0;
  for (double lw : log_norm_w) {
    const double w = std::exp(lw);
    sum_sq += w * w;
  }
  return sum_sq > 0.0 ? 1.0 / sum_sq : 0.0;
}

int sample_leaf(const ParticleCloud& cloud, int t, Rng& rng) {
  const auto w = cloud.weights_at(t);
  const double u = rng.uniform();
  double acc = 0.0;
  int last_positive = 0;
  for (int i = 0; i < cloud.num_particles; ++i) {
    const double wi = std::exp(w[i]);
    if (wi > 0.0) last_positive = i;
    acc += wi;
    if (u < acc) return i;
  }
  // Rounding left acc slightly below one; fall back to the top stratum.
  return last_positive;
}

}  // namespace

Trajectory ParticleCloud::extract_path(int t_end, int leaf) const {
  Trajectory path(t_end + 1, state_dim);
  int b = leaf;
  for (int t = t_end; t >= 0; --t) {
    auto src = state(t, b);
    std::copy(src.begin(), src.end(), path.state(t).begin());
    if (t > 0) b = ancestor(t - 1, b);
  }
  return path;
}

PfOutput run_pf(const Model& model, const ObservationSeries& obs, int num_particles,
                ResamplingScheme scheme, Rng& rng, PfRetain retain) {
  const int N = num_particles;
  const int T = obs.horizon;
  if (N < 1) throw std::invalid_argument("run_pf: need at least one particle");
  if (T < 1) throw std::invalid_argument("run_pf: empty observation series");
  if (obs.dim != model.obs_dim())
    throw std::invalid_argument("run_pf: observation dimension mismatch");

  auto cloud = std::make_shared<ParticleCloud>();
  cloud->num_particles = N;
  cloud->horizon = T;
  cloud->state_dim = model.state_dim();
  cloud->scheme = scheme;
  cloud->states.assign(static_cast<size_t>(T) * N * cloud->state_dim, 0.0);
  cloud->ancestors.assign(static_cast<size_t>(T - 1) * N, 0);
  cloud->log_norm_weights.assign(static_cast<size_t>(T) * N, kNegInf);
  cloud->log_lik_prefix.assign(T, kNegInf);
  cloud->ess.assign(T, 0.0);

  const double log_n = std::log(static_cast<double>(N));
  double log_lik = 0.0;

  for (int t = 0; t < T && !cloud->dead; ++t) {
    if (t == 0) {
      for (int i = 0; i < N; ++i) model.sample_initial(rng, cloud->state(0, i));
    } else {
      auto ancestors = resample(scheme, cloud->weights_at(t - 1), N, rng);
      for (int i = 0; i < N; ++i) {
        cloud->ancestors[static_cast<size_t>(t - 1) * N + i] = ancestors[i];
        model.sample_transition(cloud->state(t - 1, ancestors[i]), t, rng,
                                cloud->state(t, i));
      }
    }

    std::span<double> log_w{cloud->log_norm_weights.data() + static_cast<size_t>(t) * N,
                            static_cast<size_t>(N)};
    for (int i = 0; i < N; ++i) {
      const double lw = model.obs_logdensity(cloud->state(t, i), obs.row(t), t);
      if (std::isnan(lw) || (std::isinf(lw) && lw > 0.0))
        throw std::logic_error("run_pf: obs_logdensity returned NaN or +inf");
      log_w[i] = lw;
    }

    const double lse = normalize_log_weights(log_w);
    if (lse == kNegInf) {
      // Every particle died; later prefix entries stay at -inf.
      cloud->dead = true;
      break;
    }
    log_lik += lse - log_n;
    cloud->log_lik_prefix[t] = log_lik;
    cloud->ess[t] = column_ess(log_w);
  }

  PfOutput out;
  out.log_lik = cloud->dead ? kNegInf : log_lik;
  if (!cloud->dead) out.drawn = draw_trajectory(*cloud, rng);
  if (retain == PfRetain::full_cloud) out.cloud = std::move(cloud);
  return out;
}

Trajectory draw_trajectory(const ParticleCloud& cloud, Rng& rng) {
  return draw_prefix(cloud, cloud.horizon - 1, rng);
}

Trajectory draw_prefix(const ParticleCloud& cloud, int t, Rng& rng) {
  if (t < 0 || t >= cloud.horizon) throw std::invalid_argument("draw_prefix: bad horizon");
  // A cloud that died at step s still supports prefix draws for t < s.
  if (cloud.log_lik_prefix[t] == kNegInf)
    throw std::domain_error("draw_prefix: dead cloud at this horizon");
  return cloud.extract_path(t, sample_leaf(cloud, t, rng));
}

std::vector<double> cloud_estimate(const ParticleCloud& cloud, const TestFunction& h) {
  if (cloud.dead) throw std::domain_error("cloud_estimate: dead cloud");
  const int T = cloud.horizon;
  const auto w = cloud.weights_at(T - 1);
  std::vector<double> acc;
  for (int i = 0; i < cloud.num_particles; ++i) {
    const double wi = std::exp(w[i]);
    if (wi == 0.0) continue;
    const auto values = h(cloud.extract_path(T - 1, i));
    if (acc.empty()) acc.assign(values.size(), 0.0);
    if (values.size() != acc.size())
      throw std::invalid_argument("cloud_estimate: h returned inconsistent dimensions");
    for (size_t c = 0; c < values.size(); ++c) {
      if (!std::isfinite(values[c]))
        throw std::domain_error("cloud_estimate: h returned a non-finite value");
      acc[c] += wi * values[c];
    }
  }
  return acc;
}

}  // namespace upimh
