#ifndef UPIMH_PARTICLE_FILTER_HPP
#define UPIMH_PARTICLE_FILTER_HPP

#include <functional>
#include <memory>
#include <vector>

#include "upimh/model.hpp"
#include "upimh/resampling.hpp"
#include "upimh/types.hpp"

namespace upimh {

// Vector-valued test function on a latent path. For prefix chains it is
// applied to the length-t prefix trajectory.
using TestFunction = std::function<std::vector<double>(const Trajectory&)>;

// Full particle system of one filter pass: states, ancestry, normalized
// log weights and the running likelihood estimate. Immutable once built.
//
// A cloud is "dead" when every particle weight hit zero at some step.
// From that step on the prefix estimates are -inf and the states are not
// propagated further; PIMH rejects such proposals.
struct ParticleCloud {
  int num_particles = 0;
  int horizon = 0;
  int state_dim = 0;
  ResamplingScheme scheme = ResamplingScheme::multinomial;
  bool dead = false;

  std::vector<double> states;            // [t][i][d], time-major
  std::vector<int> ancestors;            // [t][i] for t = 0..T-2: A_t^i
  std::vector<double> log_norm_weights;  // [t][i], logsumexp == 0 per t
  std::vector<double> log_lik_prefix;    // log p_N(y_{1:t})
  std::vector<double> ess;               // effective sample size per t (diagnostic only)

  std::span<const double> state(int t, int i) const {
    return {states.data() + (static_cast<size_t>(t) * num_particles + i) * state_dim,
            static_cast<size_t>(state_dim)};
  }
  std::span<double> state(int t, int i) {
    return {states.data() + (static_cast<size_t>(t) * num_particles + i) * state_dim,
            static_cast<size_t>(state_dim)};
  }
  int ancestor(int t, int i) const {
    return ancestors[static_cast<size_t>(t) * num_particles + i];
  }
  std::span<const double> weights_at(int t) const {
    return {log_norm_weights.data() + static_cast<size_t>(t) * num_particles,
            static_cast<size_t>(num_particles)};
  }

  double log_lik() const { return log_lik_prefix.back(); }

  // Ancestral path of leaf j at horizon t_end (inclusive): traces
  // b_t = a_t^{b_{t+1}} backwards.
  Trajectory extract_path(int t_end, int leaf) const;
};

struct PfOutput {
  Trajectory drawn;      // one sample from pi_N (empty if dead)
  double log_lik = 0.0;  // log p_N(y_{1:T}), -inf if dead
  std::shared_ptr<const ParticleCloud> cloud;  // null in trajectory-only mode
};

enum class PfRetain { trajectory_only, full_cloud };

// Algorithm: sample, weight, resample at every step, accumulate the
// per-horizon likelihood estimate in log space; finally draw one path
// with probability W_T^i.
PfOutput run_pf(const Model& model, const ObservationSeries& obs, int num_particles,
                ResamplingScheme scheme, Rng& rng,
                PfRetain retain = PfRetain::trajectory_only);

// Draws a full path from the cloud: leaf with probability W_T^j, then the
// ancestry trace. Throws on a dead cloud.
Trajectory draw_trajectory(const ParticleCloud& cloud, Rng& rng);

// Prefix draw for the horizon-t smoothing approximation (leaf ~ W_t).
Trajectory draw_prefix(const ParticleCloud& cloud, int t, Rng& rng);

// pi_N(h) = sum_i W_T^i h(path_i). Throws if h produces non-finite values
// or the cloud is dead.
std::vector<double> cloud_estimate(const ParticleCloud& cloud, const TestFunction& h);

}  // namespace upimh

#endif
