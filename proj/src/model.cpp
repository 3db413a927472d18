#include "upimh/model.hpp"

#include <stdexcept>

namespace upimh {

std::pair<Trajectory, ObservationSeries> simulate_ssm(const Model& model, int horizon,
                                                      Rng& rng) {
  if (horizon < 1) throw std::invalid_argument("simulate_ssm: horizon must be >= 1");
  Trajectory x(horizon, model.state_dim());
  ObservationSeries y(horizon, model.obs_dim());
  model.sample_initial(rng, x.state(0));
  model.sample_observation(x.state(0), 0, rng, y.row(0));
  for (int t = 1; t < horizon; ++t) {
    model.sample_transition(x.state(t - 1), t, rng, x.state(t));
    model.sample_observation(x.state(t), t, rng, y.row(t));
  }
  return {std::move(x), std::move(y)};
}

}  // namespace upimh
