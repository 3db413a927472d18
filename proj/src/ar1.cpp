#include "upimh/ar1.hpp"

#include <cmath>
#include <stdexcept>

#include "upimh/math_util.hpp"

namespace upimh {

void LinearGaussianParams::validate() const {
  if (!(std::abs(a) < 1.0))
    throw std::invalid_argument("LinearGaussianParams: need |a| < 1");
  if (!(sigma_y2 > 0.0))
    throw std::invalid_argument("LinearGaussianParams: need sigma_y2 > 0");
}

Ar1Model::Ar1Model(LinearGaussianParams params) : params_(params) { params_.validate(); }

void Ar1Model::sample_initial(Rng& rng, std::span<double> x_out) const {
  x_out[0] = rng.normal(0.0, std::sqrt(params_.stationary_var()));
}

void Ar1Model::sample_transition(std::span<const double> x_prev, int /*t*/, Rng& rng,
                                 std::span<double> x_out) const {
  x_out[0] = rng.normal(params_.a * x_prev[0], 1.0);
}

double Ar1Model::obs_logdensity(std::span<const double> x, std::span<const double> y,
                                int /*t*/) const {
  return normal_logpdf(y[0], x[0], params_.sigma_y2);
}

void Ar1Model::sample_observation(std::span<const double> x, int /*t*/, Rng& rng,
                                  std::span<double> y_out) const {
  y_out[0] = rng.normal(x[0], std::sqrt(params_.sigma_y2));
}

std::optional<double> Ar1Model::log_weight_bound(int /*t*/) const {
  // Gaussian density peak.
  return -0.5 * std::log(2.0 * M_PI * params_.sigma_y2);
}

KalmanResult kalman_oracle(const LinearGaussianParams& params,
                           const ObservationSeries& obs) {
  params.validate();
  if (obs.horizon < 1) throw std::invalid_argument("kalman_oracle: empty series");
  if (obs.dim != 1) throw std::invalid_argument("kalman_oracle: expected scalar observations");
  for (double v : obs.values)
    if (!std::isfinite(v)) throw std::invalid_argument("kalman_oracle: non-finite observation");

  const int T = obs.horizon;
  const double a = params.a, r = params.sigma_y2, q = 1.0;

  KalmanResult out;
  out.log_lik_prefix.resize(T);
  out.filter_mean.resize(T);
  out.filter_var.resize(T);
  out.smooth_mean.resize(T);
  out.smooth_var.resize(T);

  // Forward pass; also keep predictive moments for the smoother.
  std::vector<double> pred_mean(T), pred_var(T);
  double ll = 0.0;
  for (int t = 0; t < T; ++t) {
    if (t == 0) {
      pred_mean[t] = 0.0;
      pred_var[t] = params.stationary_var();
    } else {
      pred_mean[t] = a * out.filter_mean[t - 1];
      pred_var[t] = a * a * out.filter_var[t - 1] + q;
    }
    const double y = obs.values[t];
    const double s = pred_var[t] + r;
    ll += normal_logpdf(y, pred_mean[t], s);
    const double gain = pred_var[t] / s;
    out.filter_mean[t] = pred_mean[t] + gain * (y - pred_mean[t]);
    out.filter_var[t] = (1.0 - gain) * pred_var[t];
    out.log_lik_prefix[t] = ll;
  }
  out.log_lik = ll;

  // Rauch-Tung-Striebel backward pass.
  out.smooth_mean[T - 1] = out.filter_mean[T - 1];
  out.smooth_var[T - 1] = out.filter_var[T - 1];
  for (int t = T - 2; t >= 0; --t) {
    const double c = out.filter_var[t] * a / pred_var[t + 1];
    out.smooth_mean[t] = out.filter_mean[t] + c * (out.smooth_mean[t + 1] - pred_mean[t + 1]);
    out.smooth_var[t] =
        out.filter_var[t] + c * c * (out.smooth_var[t + 1] - pred_var[t + 1]);
  }
  return out;
}

}  // namespace upimh
