#ifndef UPIMH_AR1_HPP
#define UPIMH_AR1_HPP

#include <vector>

#include "upimh/model.hpp"

namespace upimh {

// X_t = a X_{t-1} + N(0,1), Y_t = X_t + N(0, sigma_y2), X_1 stationary
// N(0, 1/(1-a^2)). Transition variance is fixed to one.
struct LinearGaussianParams {
  double a = 0.5;
  double sigma_y2 = 10.0;

  void validate() const;
  double stationary_var() const { return 1.0 / (1.0 - a * a); }
};

class Ar1Model final : public Model {
 public:
  explicit Ar1Model(LinearGaussianParams params);

  int state_dim() const override { return 1; }
  int obs_dim() const override { return 1; }
  void sample_initial(Rng& rng, std::span<double> x_out) const override;
  void sample_transition(std::span<const double> x_prev, int t, Rng& rng,
                         std::span<double> x_out) const override;
  double obs_logdensity(std::span<const double> x, std::span<const double> y,
                        int t) const override;
  void sample_observation(std::span<const double> x, int t, Rng& rng,
                          std::span<double> y_out) const override;
  std::optional<double> log_weight_bound(int t) const override;

  const LinearGaussianParams& params() const { return params_; }

 private:
  LinearGaussianParams params_;
};

// Exact filter/smoother output for the linear-Gaussian model; the ground
// truth every unbiasedness test compares against.
struct KalmanResult {
  double log_lik = 0.0;                 // log p(y_{1:T})
  std::vector<double> log_lik_prefix;   // log p(y_{1:t}) per t
  std::vector<double> filter_mean, filter_var;
  std::vector<double> smooth_mean, smooth_var;
};

KalmanResult kalman_oracle(const LinearGaussianParams& params,
                           const ObservationSeries& obs);

}  // namespace upimh

#endif
