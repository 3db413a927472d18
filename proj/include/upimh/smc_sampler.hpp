#ifndef UPIMH_SMC_SAMPLER_HPP
#define UPIMH_SMC_SAMPLER_HPP

#include <functional>
#include <memory>
#include <vector>

#include "upimh/coupled_pimh.hpp"

namespace upimh {

// Tempered static target gamma_t(x) = nu(x) L(x)^{beta_t}. The prior only
// needs to be samplable as far as the weights are concerned; its
// log-density (an indicator for a uniform box) enters the MH move kernel
// only.
struct TemperedTarget {
  int dim = 0;
  std::function<void(Rng&, std::span<double>)> prior_sampler;
  std::function<double(std::span<const double>)> log_prior;       // up to a constant
  std::function<double(std::span<const double>)> log_likelihood;  // may be -inf
  std::vector<double> betas;  // beta_1 = 0 < ... < beta_T = 1
  double mh_proposal_scale = 1.0;
  int mh_steps_per_temperature = 1;

  void validate() const;
};

// beta_t = ((t-1)/(T-1))^2 for t = 1..T.
std::vector<double> tempering_schedule(int num_temperatures);

// Gaussian mixture posterior with unknown, exchangeable component means
// under a uniform prior on [-box, box]^D.
struct MixtureTarget {
  std::vector<double> data;
  int num_components = 4;
  double component_sd = 1.0;
  double box_halfwidth = 10.0;

  void validate() const;
};

// L(x) = prod_n (1/D) sum_i N(y_n; x^i, sigma^2), evaluated with one
// log-sum-exp per observation.
double mixture_loglik(std::span<const double> x, const MixtureTarget& target);

TemperedTarget make_tempered_mixture(const MixtureTarget& target, int num_temperatures,
                                     double mh_scale = 1.0, int mh_steps = 1);

// Draws M observations from the mixture at the given component means.
std::vector<double> simulate_mixture_data(std::span<const double> means,
                                          double component_sd, int n_obs, Rng& rng);

// n_steps random-walk Metropolis steps with isotropic Gaussian proposals;
// mutates x in place and returns the number of accepted moves. The
// starting point must have a finite log target.
int rw_mh_move(std::span<double> x,
               const std::function<double(std::span<const double>)>& log_target,
               double scale, int n_steps, Rng& rng);

struct SmcOutput {
  Trajectory drawn;       // one point from the final weighted cloud (horizon 1)
  double log_evidence = 0.0;  // log Z_{T,N}; -inf if the sampler died
  std::shared_ptr<const ProposalCloud> cloud;  // null unless retained
};

// Tempered SMC sampler (resample = true) or AIS (resample = false). Both
// modes return an unbiased evidence estimate in natural space: the SMC
// sampler multiplies per-step averaged incremental weights, AIS averages
// the per-path product of incremental weights.
SmcOutput run_smc_sampler(const TemperedTarget& target, int num_particles,
                          bool resample, Rng& rng,
                          PfRetain retain = PfRetain::trajectory_only);

class SmcProposalSource final : public ProposalSource {
 public:
  SmcProposalSource(const TemperedTarget& target, int num_particles, bool resample);
  ProposalDraw propose(Rng& rng, bool retain_cloud) const override;

 private:
  const TemperedTarget& target_;
  int num_particles_;
  bool resample_;
};

}  // namespace upimh

#endif
