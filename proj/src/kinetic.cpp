#include "upimh/kinetic.hpp"

#include <cmath>
#include <stdexcept>

#include "upimh/math_util.hpp"

namespace upimh {

const std::array<std::array<int, 8>, 4> kKineticStoichiometry = {{
    {0, 0, 1, 0, 0, 0, -1, 0},
    {0, 0, 0, 1, -2, 2, 0, -1},
    {-1, 1, 0, 0, 1, -1, 0, 0},
    {-1, 1, 0, 0, 0, 0, 0, 0},
}};

void KineticParams::validate() const {
  for (double c : rates)
    if (!(c > 0.0)) throw std::invalid_argument("KineticParams: rates must be > 0");
  if (capacity < 1) throw std::invalid_argument("KineticParams: capacity must be >= 1");
  if (!(delta > 0.0)) throw std::invalid_argument("KineticParams: delta must be > 0");
  for (long v : initial_state)
    if (v < 0) throw std::invalid_argument("KineticParams: initial state must be nonnegative");
  if (initial_state[3] > capacity)
    throw std::invalid_argument("KineticParams: X4 exceeds capacity");
  if (max_events_per_step < 1)
    throw std::invalid_argument("KineticParams: event cap must be >= 1");
}

std::array<double, 8> kinetic_hazards(const std::array<long, 4>& x,
                                      const KineticParams& p) {
  const auto& c = p.rates;
  return {
      c[0] * static_cast<double>(x[3]) * static_cast<double>(x[2]),
      c[1] * static_cast<double>(p.capacity - x[3]),
      c[2] * static_cast<double>(x[3]),
      c[3] * static_cast<double>(x[0]),
      c[4] * static_cast<double>(x[1]) * static_cast<double>(x[1] - 1) / 2.0,
      c[5] * static_cast<double>(x[2]),
      c[6] * static_cast<double>(x[0]),
      c[7] * static_cast<double>(x[1]),
  };
}

std::array<long, 4> gillespie_step(const std::array<long, 4>& state,
                                   const KineticParams& params, double duration,
                                   Rng& rng, long* event_count) {
  if (!(duration >= 0.0)) throw std::invalid_argument("gillespie_step: duration must be >= 0");
  for (long v : state)
    if (v < 0) throw std::invalid_argument("gillespie_step: negative species count");
  if (state[3] > params.capacity)
    throw std::invalid_argument("gillespie_step: X4 exceeds capacity");

  std::array<long, 4> x = state;
  double t = 0.0;
  long events = 0;
  while (true) {
    const auto hazards = kinetic_hazards(x, params);
    double total = 0.0;
    for (double h : hazards) total += h;
    if (total <= 0.0) break;  // absorbing state, nothing more fires

    t += rng.exponential(total);
    if (t > duration) break;

    if (++events > params.max_events_per_step)
      throw std::runtime_error("gillespie_step: event cap exceeded");

    // Pick the reaction by inverse CDF on the hazards.
    double u = rng.uniform() * total;
    int r = 0;
    double acc = hazards[0];
    while (r < 7 && u >= acc) acc += hazards[++r];

    for (int q = 0; q < 4; ++q) x[q] += kKineticStoichiometry[q][r];
    for (long v : x)
      if (v < 0) throw std::logic_error("gillespie_step: hazard fired without reactants");
    if (x[3] > params.capacity)
      throw std::logic_error("gillespie_step: X4 overflowed its capacity");
  }
  if (event_count) *event_count = events;
  return x;
}

KineticModel::KineticModel(KineticParams params) : params_(params) { params_.validate(); }

namespace {

std::array<long, 4> to_counts(std::span<const double> x) {
  std::array<long, 4> out;
  for (int q = 0; q < 4; ++q) out[q] = std::lround(x[q]);
  return out;
}

}  // namespace

void KineticModel::sample_initial(Rng& rng, std::span<double> x_out) const {
  // Observation 1 is taken at process time delta, so the first latent PF
  // state is the chain advanced from X0 over one interval.
  auto x = gillespie_step(params_.initial_state, params_, params_.delta, rng);
  for (int q = 0; q < 4; ++q) x_out[q] = static_cast<double>(x[q]);
}

void KineticModel::sample_transition(std::span<const double> x_prev, int /*t*/, Rng& rng,
                                     std::span<double> x_out) const {
  auto x = gillespie_step(to_counts(x_prev), params_, params_.delta, rng);
  for (int q = 0; q < 4; ++q) x_out[q] = static_cast<double>(x[q]);
}

double KineticModel::obs_logdensity(std::span<const double> x, std::span<const double> y,
                                    int /*t*/) const {
  // y1 ~ N(X1, 1), y2 ~ N(X2 + 2 X3, 1)
  return normal_logpdf(y[0], x[0], 1.0) + normal_logpdf(y[1], x[1] + 2.0 * x[2], 1.0);
}

void KineticModel::sample_observation(std::span<const double> x, int /*t*/, Rng& rng,
                                      std::span<double> y_out) const {
  y_out[0] = rng.normal(x[0], 1.0);
  y_out[1] = rng.normal(x[1] + 2.0 * x[2], 1.0);
}

std::optional<double> KineticModel::log_weight_bound(int /*t*/) const {
  return 2.0 * normal_logpdf(0.0, 0.0, 1.0);
}

}  // namespace upimh
