#include "upimh/sv.hpp"

#include <cmath>
#include <stdexcept>

#include "upimh/math_util.hpp"

namespace upimh {

void SvParams::validate() const {
  if (!(xi > 0.0)) throw std::invalid_argument("SvParams: need xi > 0");
  if (!(omega2 > 0.0)) throw std::invalid_argument("SvParams: need omega2 > 0");
  if (!(lambda > 0.0)) throw std::invalid_argument("SvParams: need lambda > 0");
}

std::pair<double, double> sv_transition(double prev_spot, const SvParams& p, Rng& rng) {
  if (!(prev_spot >= 0.0)) throw std::invalid_argument("sv_transition: need W >= 0");
  const double jump_rate = p.xi / p.omega2;
  const long k = rng.poisson(p.lambda * p.xi * p.xi / p.omega2);
  double decayed_sum = 0.0, jump_sum = 0.0;
  for (long j = 0; j < k; ++j) {
    const double age = rng.uniform();  // t - C_j with C_j ~ U[t-1, t]
    const double jump = rng.exponential(jump_rate);
    decayed_sum += std::exp(-p.lambda * age) * jump;
    jump_sum += jump;
  }
  const double spot = std::exp(-p.lambda) * prev_spot + decayed_sum;
  const double actual = (prev_spot - spot + jump_sum) / p.lambda;
  return {spot, actual};
}

double sv_obs_logdensity(double actual_vol, double y, const SvParams& p) {
  if (!(actual_vol > 0.0)) return kNegInf;
  return normal_logpdf(y, p.mu + p.beta * actual_vol, actual_vol);
}

SvModel::SvModel(SvParams params) : params_(params) { params_.validate(); }

void SvModel::sample_initial(Rng& rng, std::span<double> x_out) const {
  const double shape = params_.xi * params_.xi / params_.omega2;
  const double rate = params_.xi / params_.omega2;
  const double w0 = rng.gamma(shape, rate);
  auto [spot, actual] = sv_transition(w0, params_, rng);
  x_out[0] = actual;
  x_out[1] = spot;
}

void SvModel::sample_transition(std::span<const double> x_prev, int /*t*/, Rng& rng,
                                std::span<double> x_out) const {
  auto [spot, actual] = sv_transition(x_prev[1], params_, rng);
  x_out[0] = actual;
  x_out[1] = spot;
}

double SvModel::obs_logdensity(std::span<const double> x, std::span<const double> y,
                               int /*t*/) const {
  return sv_obs_logdensity(x[0], y[0], params_);
}

void SvModel::sample_observation(std::span<const double> x, int /*t*/, Rng& rng,
                                 std::span<double> y_out) const {
  const double v = x[0];
  if (!(v > 0.0)) throw std::runtime_error("SvModel: cannot observe at V <= 0");
  y_out[0] = rng.normal(params_.mu + params_.beta * v, std::sqrt(v));
}

}  // namespace upimh
