#ifndef UPIMH_KINETIC_HPP
#define UPIMH_KINETIC_HPP

#include <array>
#include <cstdint>

#include "upimh/model.hpp"

namespace upimh {

// Prokaryotic autoregulation network: four species, eight reactions,
// observed at regular intervals of length delta through a 2x4 linear map
// plus unit Gaussian noise.
struct KineticParams {
  std::array<double, 8> rates = {0.1, 0.7, 0.35, 0.2, 0.1, 0.9, 0.3, 0.1};
  int capacity = 10;  // hard cap on species 4 via the c2(k - X4) hazard
  double delta = 0.1;
  std::array<long, 4> initial_state = {8, 8, 8, 5};
  long max_events_per_step = 1000000;

  void validate() const;
};

// Column r is the state change of reaction r.
extern const std::array<std::array<int, 8>, 4> kKineticStoichiometry;

// Reaction hazards at the given state.
std::array<double, 8> kinetic_hazards(const std::array<long, 4>& state,
                                      const KineticParams& params);

// Gillespie's direct method over [0, duration]: exponential waiting times
// with rate sum_r f_r, reaction r picked with probability f_r / sum f.
std::array<long, 4> gillespie_step(const std::array<long, 4>& state,
                                   const KineticParams& params, double duration,
                                   Rng& rng, long* event_count = nullptr);

class KineticModel final : public Model {
 public:
  explicit KineticModel(KineticParams params);

  int state_dim() const override { return 4; }
  int obs_dim() const override { return 2; }
  void sample_initial(Rng& rng, std::span<double> x_out) const override;
  void sample_transition(std::span<const double> x_prev, int t, Rng& rng,
                         std::span<double> x_out) const override;
  double obs_logdensity(std::span<const double> x, std::span<const double> y,
                        int t) const override;
  void sample_observation(std::span<const double> x, int t, Rng& rng,
                          std::span<double> y_out) const override;
  std::optional<double> log_weight_bound(int t) const override;

  const KineticParams& params() const { return params_; }

 private:
  KineticParams params_;
};

}  // namespace upimh

#endif
