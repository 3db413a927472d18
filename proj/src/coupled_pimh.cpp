#include "upimh/coupled_pimh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "upimh/math_util.hpp"

namespace upimh {

namespace {

class PfCloudView final : public ProposalCloud {
 public:
  explicit PfCloudView(std::shared_ptr<const ParticleCloud> cloud)
      : cloud_(std::move(cloud)) {}
  std::vector<double> estimate(const TestFunction& h) const override {
    return cloud_estimate(*cloud_, h);
  }

 private:
  std::shared_ptr<const ParticleCloud> cloud_;
};

void check_finite(const std::vector<double>& values) {
  for (double v : values)
    if (!std::isfinite(v))
      throw std::domain_error("pimh: test function returned a non-finite value");
}

// One chain state: likelihood estimate plus the cached h value(s) of the
// state, evaluated once at acceptance time.
struct ChainState {
  double log_lik = kNegInf;
  std::vector<double> value;        // h (plain) or pi_N(h) (RB)
  std::vector<double> plain_value;  // plain h, kept alongside in RB mode
};

}  // namespace

PfProposalSource::PfProposalSource(const Model& model, const ObservationSeries& obs,
                                   int num_particles, ResamplingScheme scheme)
    : model_(model), obs_(obs), num_particles_(num_particles), scheme_(scheme) {
  if (num_particles < 1)
    throw std::invalid_argument("PfProposalSource: need at least one particle");
}

ProposalDraw PfProposalSource::propose(Rng& rng, bool retain_cloud) const {
  PfOutput out = run_pf(model_, obs_, num_particles_, scheme_, rng,
                        retain_cloud ? PfRetain::full_cloud : PfRetain::trajectory_only);
  ProposalDraw draw;
  draw.sample = std::move(out.drawn);
  draw.log_estimate = out.log_lik;
  if (out.cloud) draw.cloud = std::make_shared<PfCloudView>(std::move(out.cloud));
  return draw;
}

bool pimh_accept(double current_log_lik, double proposal_log_lik, double u) {
  if (std::isnan(current_log_lik) || std::isnan(proposal_log_lik) || std::isnan(u))
    throw std::invalid_argument("pimh_accept: NaN input");
  if (u < 0.0 || u > 1.0) throw std::invalid_argument("pimh_accept: u outside [0,1]");
  if (proposal_log_lik == kNegInf) return false;  // dead proposals never enter
  if (current_log_lik == kNegInf) return true;
  return std::log(u) <= std::min(0.0, proposal_log_lik - current_log_lik);
}

void EstimatorRequest::validate() const {
  if (!h) throw std::invalid_argument("EstimatorRequest: missing test function");
  if (k < 0 || m < k) throw std::invalid_argument("EstimatorRequest: need 0 <= k <= m");
}

HkmTerms h_km_combine(const std::vector<std::vector<double>>& chain1_values,
                      const std::vector<std::vector<double>>& chain2_values, int k,
                      int m, int tau) {
  if (k < 0 || m < k) throw std::invalid_argument("h_km_combine: need 0 <= k <= m");
  if (tau < 1) throw std::invalid_argument("h_km_combine: need tau >= 1");
  const int top1 = std::max(m, tau - 1);
  if (static_cast<int>(chain1_values.size()) <= top1)
    throw std::out_of_range("h_km_combine: chain 1 values too short");
  if (tau - 1 >= k + 1 && static_cast<int>(chain2_values.size()) <= tau - 2)
    throw std::out_of_range("h_km_combine: chain 2 values too short");

  const size_t dim = chain1_values[k].size();
  if (dim == 0)
    throw std::domain_error(
        "h_km_combine: chain passed through a zero-density state inside the "
        "averaging window; the estimator is undefined");

  HkmTerms out;
  out.mcmc_term.assign(dim, 0.0);
  out.bc_term.assign(dim, 0.0);

  auto check_dim = [dim](const std::vector<double>& v) {
    if (v.empty())
      throw std::domain_error(
          "h_km_combine: chain passed through a zero-density state inside the "
          "averaging window; the estimator is undefined");
    if (v.size() != dim)
      throw std::invalid_argument("h_km_combine: inconsistent dims");
  };

  for (int l = k; l <= m; ++l) {
    const auto& v = chain1_values[l];
    check_dim(v);
    for (size_t c = 0; c < dim; ++c) out.mcmc_term[c] += v[c];
  }
  const double span = static_cast<double>(m - k + 1);
  for (size_t c = 0; c < dim; ++c) out.mcmc_term[c] /= span;

  for (int l = k + 1; l <= tau - 1; ++l) {
    const auto& v1 = chain1_values[l];
    const auto& v2 = chain2_values[l - 1];
    check_dim(v1);
    check_dim(v2);
    const double w = std::min(1.0, static_cast<double>(l - k) / span);
    for (size_t c = 0; c < dim; ++c) out.bc_term[c] += w * (v1[c] - v2[c]);
  }

  out.estimate.resize(dim);
  for (size_t c = 0; c < dim; ++c) out.estimate[c] = out.mcmc_term[c] + out.bc_term[c];
  return out;
}

PimhTrace run_pimh(const ProposalSource& source, const TestFunction& h, int n_iters,
                   Rng& rng, bool rao_blackwell) {
  if (n_iters < 1) throw std::invalid_argument("run_pimh: need n_iters >= 1");
  if (!h) throw std::invalid_argument("run_pimh: missing test function");

  auto evaluate = [&](const ProposalDraw& draw) {
    std::vector<double> v = rao_blackwell ? draw.cloud->estimate(h) : h(draw.sample);
    check_finite(v);
    return v;
  };

  PimhTrace trace;
  trace.h_values.reserve(n_iters + 1);
  trace.loglik_trace.reserve(n_iters + 1);

  ProposalDraw init = source.propose(rng, rao_blackwell);
  double cur_ll = init.log_estimate;
  std::vector<double> cur_value;
  if (cur_ll > kNegInf) cur_value = evaluate(init);
  init.cloud.reset();
  trace.h_values.push_back(cur_value);
  trace.loglik_trace.push_back(cur_ll);

  for (int n = 1; n <= n_iters; ++n) {
    ProposalDraw prop = source.propose(rng, rao_blackwell);
    const double u = rng.uniform();
    if (pimh_accept(cur_ll, prop.log_estimate, u)) {
      cur_ll = prop.log_estimate;
      cur_value = evaluate(prop);
      ++trace.accept_count;
    }
    trace.h_values.push_back(cur_value);
    trace.loglik_trace.push_back(cur_ll);
  }
  return trace;
}

CoupledRunRecord run_coupled_pimh(const ProposalSource& source,
                                  const EstimatorRequest& request, Rng& rng,
                                  const ProposalDraw* pinned_init) {
  request.validate();
  const bool rb = request.rao_blackwell;
  const int k = request.k, m = request.m;

  auto evaluate = [&](const ProposalDraw& draw, ChainState& into) {
    into.log_lik = draw.log_estimate;
    if (draw.log_estimate == kNegInf) {
      into.value.clear();
      into.plain_value.clear();
      return;
    }
    if (rb) {
      into.value = draw.cloud->estimate(request.h);
      into.plain_value = request.h(draw.sample);
      check_finite(into.plain_value);
    } else {
      into.value = request.h(draw.sample);
    }
    check_finite(into.value);
  };

  CoupledRunRecord rec;
  std::vector<std::vector<double>> vals1, vals2, plain1, plain2;

  ChainState chain1, chain2;
  {
    ProposalDraw init = pinned_init ? *pinned_init : source.propose(rng, rb);
    evaluate(init, chain1);
  }
  vals1.push_back(chain1.value);
  if (rb) plain1.push_back(chain1.plain_value);
  rec.chain1_loglik.push_back(chain1.log_lik);

  bool chain2_started = false;
  int tau = 0;

  for (int n = 1; tau == 0 || n <= std::max(m, tau); ++n) {
    ProposalDraw prop = source.propose(rng, rb);
    const double u = rng.uniform();

    const bool acc1 = pimh_accept(chain1.log_lik, prop.log_estimate, u);
    // Chain 2 lags one step; before it holds a state, any finite proposal
    // is adopted unconditionally (the alpha := 1 convention).
    const bool acc2 = chain2_started ? pimh_accept(chain2.log_lik, prop.log_estimate, u)
                                     : prop.log_estimate > kNegInf;

    if (acc1 || acc2) {
      ChainState accepted;
      evaluate(prop, accepted);
      if (acc1) chain1 = accepted;
      if (acc2) {
        chain2 = std::move(accepted);
        chain2_started = true;
      }
    }

    vals1.push_back(chain1.value);
    if (rb) plain1.push_back(chain1.plain_value);
    rec.chain1_loglik.push_back(chain1.log_lik);

    vals2.push_back(chain2_started ? chain2.value : std::vector<double>{});
    if (rb) plain2.push_back(chain2_started ? chain2.plain_value : std::vector<double>{});
    rec.chain2_loglik.push_back(chain2_started ? chain2.log_lik : kNegInf);

    if (tau == 0 && acc1 && acc2) tau = n;

    // Proposition 5 invariants, enforced on every run.
    if (rec.chain1_loglik[n] < rec.chain2_loglik[n - 1])
      throw std::logic_error("coupled PIMH: dominance violated");
    if (tau == 0 && acc1)
      throw std::logic_error("coupled PIMH: chain 1 accepted without meeting");
  }

  rec.tau = tau;
  rec.pf_calls = static_cast<long>(std::max(m, tau)) + 1;

  const HkmTerms terms = h_km_combine(vals1, vals2, k, m, tau);
  rec.estimate = terms.estimate;
  rec.mcmc_term = terms.mcmc_term;
  rec.bc_term = terms.bc_term;
  if (rb) rec.estimate_plain = h_km_combine(plain1, plain2, k, m, tau).estimate;
  return rec;
}

FilteringResult unbiased_filtering(const Model& model, const ObservationSeries& obs,
                                   int num_particles, ResamplingScheme scheme,
                                   const TestFunction& h, int k, int m, Rng& rng) {
  if (k < 0 || m < k) throw std::invalid_argument("unbiased_filtering: need 0 <= k <= m");
  if (!h) throw std::invalid_argument("unbiased_filtering: missing test function");
  const int T = obs.horizon;

  struct Pair {
    std::vector<std::vector<double>> vals1, vals2;
    std::vector<double> ll1, ll2;
    bool chain2_started = false;
    int tau = 0;
  };
  std::vector<Pair> pairs(T);

  auto prefix_value = [&](const ParticleCloud& cloud, int t) {
    auto v = h(draw_prefix(cloud, t, rng));
    check_finite(v);
    return v;
  };

  FilteringResult out;
  {
    PfOutput init = run_pf(model, obs, num_particles, scheme, rng, PfRetain::full_cloud);
    out.first_loglik_prefix = init.cloud->log_lik_prefix;
    for (int t = 0; t < T; ++t) {
      const double ll = init.cloud->log_lik_prefix[t];
      Pair& p = pairs[t];
      p.ll1.push_back(ll);
      p.vals1.push_back(ll > kNegInf ? prefix_value(*init.cloud, t) : std::vector<double>{});
    }
  }

  auto pair_active = [&](const Pair& p, int n) {
    return p.tau == 0 || n <= std::max(m, p.tau);
  };

  int n = 0;
  while (true) {
    bool any_active = false;
    for (const Pair& p : pairs)
      if (pair_active(p, n + 1)) { any_active = true; break; }
    if (!any_active) break;
    ++n;

    PfOutput prop = run_pf(model, obs, num_particles, scheme, rng, PfRetain::full_cloud);
    const ParticleCloud& cloud = *prop.cloud;

    // Independent uniform per pair, drawn for every t to keep the stream
    // layout independent of which pairs are still running.
    std::vector<double> uniforms(T);
    for (int t = 0; t < T; ++t) uniforms[t] = rng.uniform();

    for (int t = 0; t < T; ++t) {
      Pair& p = pairs[t];
      if (!pair_active(p, n)) continue;
      const double prop_ll = cloud.log_lik_prefix[t];
      const double u = uniforms[t];

      // Entering iteration n, chain 1 holds index n-1 and chain 2 index
      // n-2, both at the back of their traces.
      const bool acc1 = pimh_accept(p.ll1.back(), prop_ll, u);
      const bool acc2 = p.chain2_started ? pimh_accept(p.ll2.back(), prop_ll, u)
                                         : prop_ll > kNegInf;

      std::vector<double> prop_value;
      if (acc1 || acc2) prop_value = prefix_value(cloud, t);

      p.ll1.push_back(acc1 ? prop_ll : p.ll1.back());
      p.vals1.push_back(acc1 ? prop_value : std::vector<double>(p.vals1.back()));
      if (p.chain2_started) {
        p.ll2.push_back(acc2 ? prop_ll : p.ll2.back());
        p.vals2.push_back(acc2 ? prop_value : std::vector<double>(p.vals2.back()));
      } else {
        p.ll2.push_back(acc2 ? prop_ll : kNegInf);
        p.vals2.push_back(acc2 ? prop_value : std::vector<double>{});
        if (acc2) p.chain2_started = true;
      }

      if (p.tau == 0 && acc1 && acc2) p.tau = n;

      if (p.ll1.back() < p.ll2.back())
        throw std::logic_error("unbiased_filtering: dominance violated");
      if (p.tau == 0 && acc1)
        throw std::logic_error("unbiased_filtering: chain 1 accepted without meeting");
    }
  }

  out.pf_calls = n + 1;
  out.per_t.reserve(T);
  for (int t = 0; t < T; ++t) {
    Pair& p = pairs[t];
    CoupledRunRecord rec;
    rec.tau = p.tau;
    rec.pf_calls = static_cast<long>(std::max(m, p.tau)) + 1;
    const HkmTerms terms = h_km_combine(p.vals1, p.vals2, k, m, p.tau);
    rec.estimate = terms.estimate;
    rec.mcmc_term = terms.mcmc_term;
    rec.bc_term = terms.bc_term;
    rec.chain1_loglik = std::move(p.ll1);
    rec.chain2_loglik = std::move(p.ll2);
    out.per_t.push_back(std::move(rec));
  }
  return out;
}

double ZChainKernel::step(double z, Rng& rng) const {
  const double proposal = sample_g_(rng);
  const double u = rng.uniform();
  return pimh_accept(z, proposal, u) ? proposal : z;
}

}  // namespace upimh
