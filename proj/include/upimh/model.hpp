#ifndef UPIMH_MODEL_HPP
#define UPIMH_MODEL_HPP

#include <optional>
#include <span>
#include <utility>

#include "upimh/rng.hpp"
#include "upimh/types.hpp"

namespace upimh {

// Bootstrap-flavoured state-space model: the particle filter proposes from
// the model's own initial law and transition, so the incremental log
// weight at time t is exactly obs_logdensity(x_t, y_t, t).
//
// obs_logdensity may return -inf (a zero-weight particle) but never +inf
// or NaN. Time indices are 0-based throughout the code.
class Model {
 public:
  virtual ~Model() = default;

  virtual int state_dim() const = 0;
  virtual int obs_dim() const = 0;

  virtual void sample_initial(Rng& rng, std::span<double> x_out) const = 0;
  virtual void sample_transition(std::span<const double> x_prev, int t, Rng& rng,
                                 std::span<double> x_out) const = 0;
  virtual double obs_logdensity(std::span<const double> x, std::span<const double> y,
                                int t) const = 0;
  virtual void sample_observation(std::span<const double> x, int t, Rng& rng,
                                  std::span<double> y_out) const = 0;

  // Finite upper bound on the incremental log weight at time t, where the
  // model can supply one (uniform ergodicity condition).
  virtual std::optional<double> log_weight_bound(int /*t*/) const { return std::nullopt; }
};

// Draws a latent path from the model's prior and one observation per step.
std::pair<Trajectory, ObservationSeries> simulate_ssm(const Model& model, int horizon,
                                                      Rng& rng);

}  // namespace upimh

#endif
