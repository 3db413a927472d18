#ifndef UPIMH_CONFIG_HPP
#define UPIMH_CONFIG_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "upimh/ar1.hpp"
#include "upimh/kinetic.hpp"
#include "upimh/model.hpp"
#include "upimh/resampling.hpp"
#include "upimh/smc_sampler.hpp"
#include "upimh/sv.hpp"

namespace upimh {

enum class ExperimentKind {
  pf,
  sigma,
  coupled,
  filtering,
  large_sample,
  smc,
  inefficiency_grid,
};

ExperimentKind experiment_kind_from_string(const std::string& name);
const char* to_string(ExperimentKind kind);

struct ModelConfig {
  std::string name = "ar1";  // ar1 | kinetic | sv
  LinearGaussianParams ar1;
  KineticParams kinetic;
  SvParams sv;
  int horizon = 0;  // 0 = per-model default
  std::uint64_t data_seed = 1;
  std::string observations_csv;  // load instead of simulating when set

  int default_horizon() const;
};

struct SmcConfig {
  std::string target = "mixture";  // mixture | conjugate-gaussian
  int temperatures = 200;
  bool resample = true;
  int mixture_components = 4;
  int mixture_obs = 100;
  double mixture_sd = 1.0;
  std::vector<double> mixture_true_means = {-3.0, 0.0, 3.0, 6.0};
  double box_halfwidth = 10.0;
  double conjugate_y = 1.3;
  double mh_scale = 1.0;
  int mh_steps = 1;
  std::uint64_t data_seed = 1;  // mixture dataset seed
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::coupled;
  ModelConfig model;
  int particles = 100;
  std::vector<int> particle_grid;  // inefficiency-grid
  ResamplingScheme scheme = ResamplingScheme::multinomial;
  int k = 0;
  int m = 0;
  bool rao_blackwell = false;
  std::vector<std::string> h_selectors = {"x1"};
  int h_component = 0;
  int replicates = 1;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
  double sigma = 0.0;  // large-sample: used directly when > 0
  int sigma_replicates = 1000;
  int n_max = 20;
  SmcConfig smc;

  void validate() const;          // structural checks, any experiment kind
  void validate_for_run() const;  // adds kind-dependent completeness checks
};

// Parses the JSON config text ("" or "{}" for all defaults).
ExperimentConfig parse_config(const std::string& json_text);

struct ModelInstance {
  std::unique_ptr<Model> model;
  ObservationSeries observations;
};

// Builds the configured model and its dataset (loaded from CSV or
// simulated deterministically from the data seed).
ModelInstance build_model(const ModelConfig& config);

// Maps selector names (x1 | xT | sum_x | sum_x2 | last) to one output
// component each; `component` picks the state coordinate.
TestFunction make_test_function(const std::vector<std::string>& selectors,
                                int component);

}  // namespace upimh

#endif
