#ifndef UPIMH_SV_HPP
#define UPIMH_SV_HPP

#include <utility>

#include "upimh/model.hpp"

namespace upimh {

// Levy-driven stochastic volatility: log-returns with a Gamma-OU actual /
// spot volatility pair as the latent state.
struct SvParams {
  double mu = 0.24;       // drift of the log-return
  double beta = -0.28;    // risk premium
  double xi = 0.82;       // stationary mean of the spot volatility
  double omega2 = 0.09;   // stationary variance of the spot volatility
  double lambda = 0.05;   // autocorrelation decay rate

  void validate() const;
};

// One step of the compound-Poisson recursion: given the spot volatility
// W_{t-1}, draws K ~ Poisson(lambda xi^2/omega^2) jumps and returns
// (W_t, V_t). Consumes a random number of draws per call.
std::pair<double, double> sv_transition(double prev_spot, const SvParams& params,
                                        Rng& rng);

// log N(y; mu + beta V, V) for V > 0, -inf otherwise.
double sv_obs_logdensity(double actual_vol, double y, const SvParams& params);

// State layout: x = (V_t, W_t). The spot volatility is initialised from a
// Gamma with shape xi^2/omega^2 and rate xi/omega^2 (mean xi, variance
// omega^2, matching the stationary moments), then advanced one step.
class SvModel final : public Model {
 public:
  explicit SvModel(SvParams params);

  int state_dim() const override { return 2; }
  int obs_dim() const override { return 1; }
  void sample_initial(Rng& rng, std::span<double> x_out) const override;
  void sample_transition(std::span<const double> x_prev, int t, Rng& rng,
                         std::span<double> x_out) const override;
  double obs_logdensity(std::span<const double> x, std::span<const double> y,
                        int t) const override;
  void sample_observation(std::span<const double> x, int t, Rng& rng,
                          std::span<double> y_out) const override;

  const SvParams& params() const { return params_; }

 private:
  SvParams params_;
};

}  // namespace upimh

#endif
