#ifndef UPIMH_COUPLED_PIMH_HPP
#define UPIMH_COUPLED_PIMH_HPP

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "upimh/particle_filter.hpp"

namespace upimh {

// Anything usable as an independent MH proposal: draws a sample together
// with an unbiased (in natural space) estimate of a fixed normalizing
// constant, optionally retaining the weighted cloud that produced it.
class ProposalCloud {
 public:
  virtual ~ProposalCloud() = default;
  virtual std::vector<double> estimate(const TestFunction& h) const = 0;
};

struct ProposalDraw {
  Trajectory sample;
  double log_estimate = 0.0;  // -inf marks a dead draw, rejected by PIMH
  std::shared_ptr<const ProposalCloud> cloud;  // null unless requested
};

class ProposalSource {
 public:
  virtual ~ProposalSource() = default;
  virtual ProposalDraw propose(Rng& rng, bool retain_cloud) const = 0;
};

// Particle filter as a proposal source. Holds references; the model and
// observations must outlive the source.
class PfProposalSource final : public ProposalSource {
 public:
  PfProposalSource(const Model& model, const ObservationSeries& obs, int num_particles,
                   ResamplingScheme scheme = ResamplingScheme::multinomial);
  ProposalDraw propose(Rng& rng, bool retain_cloud) const override;

  int num_particles() const { return num_particles_; }

 private:
  const Model& model_;
  const ObservationSeries& obs_;
  int num_particles_;
  ResamplingScheme scheme_;
};

// Independence-MH acceptance in log space: accept iff
// log u <= min(0, proposal - current). A -inf proposal is always rejected
// against a finite current state; a -inf current state accepts anything.
bool pimh_accept(double current_log_lik, double proposal_log_lik, double u);

struct EstimatorRequest {
  TestFunction h;
  int k = 0;  // burn-in
  int m = 0;  // horizon, k <= m
  bool rao_blackwell = false;

  void validate() const;
};

struct CoupledRunRecord {
  int tau = 0;                          // meeting time, >= 1
  std::vector<double> estimate;         // H_{k:m} (or RB version)
  std::vector<double> mcmc_term;
  std::vector<double> bc_term;
  std::vector<double> estimate_plain;   // plain H_{k:m}, filled in RB mode only
  std::vector<double> chain1_loglik;    // indices 0..max(m, tau)
  std::vector<double> chain2_loglik;    // indices 0..max(m, tau)-1
  long pf_calls = 0;                    // == max(m, tau) + 1
};

struct HkmTerms {
  std::vector<double> estimate, mcmc_term, bc_term;
};

// Time-averaged unbiased estimator from the two coupled value sequences:
// the ergodic average over k..m plus the telescoping bias correction
// sum_{l=k+1}^{tau-1} min(1, (l-k)/(m-k+1)) (v1[l] - v2[l-1]).
HkmTerms h_km_combine(const std::vector<std::vector<double>>& chain1_values,
                      const std::vector<std::vector<double>>& chain2_values, int k,
                      int m, int tau);

struct PimhTrace {
  std::vector<std::vector<double>> h_values;  // index 0..n_iters
  std::vector<double> loglik_trace;
  long accept_count = 0;
};

// Marginal (uncoupled) PIMH chain initialized from one proposal draw;
// used for IACT studies and ergodic-average baselines.
PimhTrace run_pimh(const ProposalSource& source, const TestFunction& h, int n_iters,
                   Rng& rng, bool rao_blackwell = false);

// One coupled run: a single proposal and a single uniform drive both
// acceptance tests each iteration; chain 2 starts one step behind by
// adopting the first proposal unconditionally. Enforces at runtime that
// chain 1's likelihood trace dominates chain 2's lagged trace and that
// the meeting happens at chain 1's first acceptance.
//
// `pinned_init` fixes chain 1's initial state instead of drawing it
// (used to check the conditional geometric law of the meeting time).
CoupledRunRecord run_coupled_pimh(const ProposalSource& source,
                                  const EstimatorRequest& request, Rng& rng,
                                  const ProposalDraw* pinned_init = nullptr);

struct FilteringResult {
  // Record t estimates E[h(x_{1:t}) | y_{1:t}]; h sees the length-t prefix.
  std::vector<CoupledRunRecord> per_t;
  // log p_N(y_{1:t}) of the first proposal, an unbiased predictive
  // likelihood estimate for every horizon.
  std::vector<double> first_loglik_prefix;
  long pf_calls = 0;
};

// T coupled chain pairs driven by one PF proposal stream: pair t targets
// p(x_{1:t} | y_{1:t}) using the prefix estimate p_N(y_{1:t}) and its own
// uniform per iteration. Runs until every pair has reached max(m, tau_t).
FilteringResult unbiased_filtering(const Model& model, const ObservationSeries& obs,
                                   int num_particles, ResamplingScheme scheme,
                                   const TestFunction& h, int k, int m, Rng& rng);

// Kernel of the induced chain on the log-likelihood-estimate error: from
// state z, propose z' ~ g and accept with probability 1 ^ exp(z' - z).
// Used as an idealized simulator in the large-sample tests.
class ZChainKernel {
 public:
  explicit ZChainKernel(std::function<double(Rng&)> sample_g)
      : sample_g_(std::move(sample_g)) {}
  double step(double z, Rng& rng) const;

 private:
  std::function<double(Rng&)> sample_g_;
};

}  // namespace upimh

#endif
