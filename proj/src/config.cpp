#include "upimh/config.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "upimh/csv.hpp"

namespace upimh {

using nlohmann::json;

ExperimentKind experiment_kind_from_string(const std::string& name) {
  if (name == "pf") return ExperimentKind::pf;
  if (name == "sigma") return ExperimentKind::sigma;
  if (name == "coupled") return ExperimentKind::coupled;
  if (name == "filtering") return ExperimentKind::filtering;
  if (name == "large-sample") return ExperimentKind::large_sample;
  if (name == "smc") return ExperimentKind::smc;
  if (name == "inefficiency-grid") return ExperimentKind::inefficiency_grid;
  throw std::invalid_argument("unknown experiment kind: " + name);
}

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::pf: return "pf";
    case ExperimentKind::sigma: return "sigma";
    case ExperimentKind::coupled: return "coupled";
    case ExperimentKind::filtering: return "filtering";
    case ExperimentKind::large_sample: return "large-sample";
    case ExperimentKind::smc: return "smc";
    case ExperimentKind::inefficiency_grid: return "inefficiency-grid";
  }
  return "?";
}

int ModelConfig::default_horizon() const {
  if (name == "sv") return 500;
  return 100;
}

void ExperimentConfig::validate() const {
  // Structural checks only; kind-dependent completeness (a nonempty grid
  // for inefficiency-grid, ...) is checked when the experiment runs, so
  // configs can be assembled key by key in any order.
  if (replicates < 1) throw std::invalid_argument("config: replicates must be >= 1");
  if (particles < 1) throw std::invalid_argument("config: particles must be >= 1");
  if (k < 0 || m < k) throw std::invalid_argument("config: need 0 <= k <= m");
  if (h_selectors.empty()) throw std::invalid_argument("config: empty test-function list");
  for (int n : particle_grid)
    if (n < 1) throw std::invalid_argument("config: grid entries must be >= 1");
  if (n_max < 1) throw std::invalid_argument("config: n_max must be >= 1");
}

void ExperimentConfig::validate_for_run() const {
  validate();
  if (kind == ExperimentKind::inefficiency_grid && particle_grid.empty())
    throw std::invalid_argument("config: inefficiency-grid needs a particle grid");
  if (kind == ExperimentKind::large_sample && sigma == 0.0 && sigma_replicates < 2)
    throw std::invalid_argument("config: sigma_replicates must be >= 2");
}

namespace {

template <typename T>
void read_into(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

void parse_model(const json& j, ModelConfig& m) {
  read_into(j, "name", m.name);
  read_into(j, "horizon", m.horizon);
  read_into(j, "data_seed", m.data_seed);
  read_into(j, "observations_csv", m.observations_csv);
  if (m.name == "ar1") {
    read_into(j, "a", m.ar1.a);
    read_into(j, "sigma_y2", m.ar1.sigma_y2);
  } else if (m.name == "kinetic") {
    if (auto it = j.find("rates"); it != j.end()) {
      auto v = it->get<std::vector<double>>();
      if (v.size() != m.kinetic.rates.size())
        throw std::invalid_argument("config: kinetic rates must have 8 entries");
      std::copy(v.begin(), v.end(), m.kinetic.rates.begin());
    }
    read_into(j, "capacity", m.kinetic.capacity);
    read_into(j, "delta", m.kinetic.delta);
    if (auto it = j.find("initial_state"); it != j.end()) {
      auto v = it->get<std::vector<long>>();
      if (v.size() != 4)
        throw std::invalid_argument("config: kinetic initial state must have 4 entries");
      std::copy(v.begin(), v.end(), m.kinetic.initial_state.begin());
    }
  } else if (m.name == "sv") {
    read_into(j, "mu", m.sv.mu);
    read_into(j, "beta", m.sv.beta);
    read_into(j, "xi", m.sv.xi);
    read_into(j, "omega2", m.sv.omega2);
    read_into(j, "lambda", m.sv.lambda);
  } else {
    throw std::invalid_argument("config: unknown model name: " + m.name);
  }
}

void parse_smc(const json& j, SmcConfig& s) {
  read_into(j, "target", s.target);
  read_into(j, "temperatures", s.temperatures);
  read_into(j, "resample", s.resample);
  read_into(j, "mixture_components", s.mixture_components);
  read_into(j, "mixture_obs", s.mixture_obs);
  read_into(j, "mixture_sd", s.mixture_sd);
  read_into(j, "mixture_true_means", s.mixture_true_means);
  read_into(j, "box", s.box_halfwidth);
  read_into(j, "conjugate_y", s.conjugate_y);
  read_into(j, "mh_scale", s.mh_scale);
  read_into(j, "mh_steps", s.mh_steps);
  read_into(j, "data_seed", s.data_seed);
  if (s.target != "mixture" && s.target != "conjugate-gaussian")
    throw std::invalid_argument("config: unknown smc target: " + s.target);
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  if (json_text.empty()) {
    j = json::object();
  } else {
    j = json::parse(json_text);  // throws json::parse_error on bad input
    if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  }

  ExperimentConfig cfg;
  if (auto it = j.find("experiment"); it != j.end())
    cfg.kind = experiment_kind_from_string(it->get<std::string>());
  // Kind-dependent defaults: filtering estimates the last prefix state,
  // the SMC subcommand reports the Rao-Blackwellised estimator.
  if (cfg.kind == ExperimentKind::filtering) cfg.h_selectors = {"last"};
  if (cfg.kind == ExperimentKind::smc) cfg.rao_blackwell = true;
  if (auto it = j.find("model"); it != j.end()) parse_model(*it, cfg.model);
  read_into(j, "particles", cfg.particles);
  read_into(j, "particle_grid", cfg.particle_grid);
  if (auto it = j.find("resampling"); it != j.end())
    cfg.scheme = resampling_scheme_from_string(it->get<std::string>());
  read_into(j, "k", cfg.k);
  read_into(j, "m", cfg.m);
  read_into(j, "rao_blackwell", cfg.rao_blackwell);
  read_into(j, "h", cfg.h_selectors);
  read_into(j, "component", cfg.h_component);
  read_into(j, "replicates", cfg.replicates);
  read_into(j, "seed", cfg.seed);
  read_into(j, "threads", cfg.threads);
  read_into(j, "sigma", cfg.sigma);
  read_into(j, "sigma_replicates", cfg.sigma_replicates);
  read_into(j, "n_max", cfg.n_max);
  if (auto it = j.find("smc"); it != j.end()) parse_smc(*it, cfg.smc);

  cfg.validate();
  return cfg;
}

ModelInstance build_model(const ModelConfig& config) {
  ModelInstance out;
  if (config.name == "ar1") {
    out.model = std::make_unique<Ar1Model>(config.ar1);
  } else if (config.name == "kinetic") {
    out.model = std::make_unique<KineticModel>(config.kinetic);
  } else if (config.name == "sv") {
    out.model = std::make_unique<SvModel>(config.sv);
  } else {
    throw std::invalid_argument("unknown model name: " + config.name);
  }

  if (!config.observations_csv.empty()) {
    out.observations = read_observation_csv(config.observations_csv);
    if (out.observations.dim != out.model->obs_dim())
      throw std::invalid_argument("loaded observations have the wrong dimension");
  } else {
    const int horizon = config.horizon > 0 ? config.horizon : config.default_horizon();
    Rng rng(derive_seed(config.data_seed, 0xDA7Aull));
    out.observations = simulate_ssm(*out.model, horizon, rng).second;
  }
  return out;
}

TestFunction make_test_function(const std::vector<std::string>& selectors,
                                int component) {
  if (selectors.empty()) throw std::invalid_argument("empty test-function list");
  if (component < 0) throw std::invalid_argument("negative state component");
  enum class Sel { x1, xT, sum, sumsq, last };
  std::vector<Sel> parsed;
  for (const auto& name : selectors) {
    if (name == "x1") parsed.push_back(Sel::x1);
    else if (name == "xT") parsed.push_back(Sel::xT);
    else if (name == "sum_x") parsed.push_back(Sel::sum);
    else if (name == "sum_x2") parsed.push_back(Sel::sumsq);
    else if (name == "last") parsed.push_back(Sel::last);
    else throw std::invalid_argument("unknown test-function selector: " + name);
  }
  return [parsed, component](const Trajectory& x) {
    if (component >= x.dim)
      throw std::invalid_argument("test function: state component out of range");
    std::vector<double> out;
    out.reserve(parsed.size());
    for (Sel sel : parsed) {
      switch (sel) {
        case Sel::x1: out.push_back(x.state(0)[component]); break;
        case Sel::xT:
        case Sel::last: out.push_back(x.state(x.horizon - 1)[component]); break;
        case Sel::sum: {
          double acc = 0.0;
          for (int t = 0; t < x.horizon; ++t) acc += x.state(t)[component];
          out.push_back(acc);
          break;
        }
        case Sel::sumsq: {
          double acc = 0.0;
          for (int t = 0; t < x.horizon; ++t) {
            const double v = x.state(t)[component];
            acc += v * v;
          }
          out.push_back(acc);
          break;
        }
      }
    }
    return out;
  };
}

}  // namespace upimh
