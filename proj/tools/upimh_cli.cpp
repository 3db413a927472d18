// Command-line front end. Everything numerical goes through the C API in
// upimh.h; this program only handles arguments, config overrides and
// output files.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "upimh.h"

namespace {

struct ExperimentDeleter {
  void operator()(upimh_experiment* p) const { upimh_experiment_free(p); }
};
struct ResultDeleter {
  void operator()(upimh_result* p) const { upimh_result_free(p); }
};
using ExperimentPtr = std::unique_ptr<upimh_experiment, ExperimentDeleter>;
using ResultPtr = std::unique_ptr<upimh_result, ResultDeleter>;

[[noreturn]] void die(const std::string& context) {
  std::cerr << "upimh: " << context << ": " << upimh_last_error() << "\n";
  std::exit(1);
}

void print_table_csv(const upimh_table* table) {
  size_t rows = 0, cols = 0;
  if (upimh_table_num_rows(table, &rows) || upimh_table_num_cols(table, &cols))
    die("table shape");
  for (size_t j = 0; j < cols; ++j) {
    const char* name = nullptr;
    upimh_table_column_name(table, j, &name);
    std::printf("%s%s", j ? "," : "", name);
  }
  std::printf("\n");
  for (size_t i = 0; i < rows; ++i) {
    for (size_t j = 0; j < cols; ++j) {
      double v = 0.0;
      upimh_table_value(table, i, j, &v);
      std::printf("%s%.17g", j ? "," : "", v);
    }
    std::printf("\n");
  }
}

void write_plot_file(const upimh_table* table, const std::string& path) {
  size_t rows = 0, cols = 0;
  upimh_table_num_rows(table, &rows);
  upimh_table_num_cols(table, &cols);
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) {
    std::cerr << "upimh: cannot open " << path << "\n";
    std::exit(1);
  }
  for (size_t i = 0; i < rows; ++i) {
    for (size_t j = 0; j < cols && j < 2; ++j) {
      double v = 0.0;
      upimh_table_value(table, i, j, &v);
      std::fprintf(f, "%s%.17g", j ? " " : "", v);
    }
    std::fprintf(f, "\n");
  }
  std::fclose(f);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unbiased smoothing, filtering and posterior estimation with "
               "coupled particle independent Metropolis-Hastings"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::uint64_t seed = 0;
  long replicates = 0;
  long threads = -1;
  bool plot_data = false;
  std::vector<std::string> overrides;

  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "master seed (overrides config)");
  app.add_option("--replicates", replicates, "replicate count (overrides config)");
  app.add_option("--threads", threads, "worker threads, 0 = all cores");
  app.add_option("--out", out_path, "output CSV path (default: stdout)");
  app.add_flag("--plot-data", plot_data,
               "also write two-column <out>.<name>.dat files");
  app.add_option("--set", overrides,
                 "extra config override as key=JSON (repeatable), e.g. "
                 "--set model.horizon=20")
      ->type_size(1)
      ->allow_extra_args(false);

  static const char* kKinds[] = {"pf",       "sigma", "coupled",
                                 "filtering", "large-sample", "smc",
                                 "inefficiency-grid"};
  for (const char* kind : kKinds) app.add_subcommand(kind)->fallthrough();

  CLI11_PARSE(app, argc, argv);
  const std::string kind = app.get_subcommands().front()->get_name();

  ExperimentPtr experiment;
  {
    upimh_experiment* raw = nullptr;
    const int rc = config_path.empty()
                       ? upimh_experiment_create("{}", &raw)
                       : upimh_experiment_create_from_file(config_path.c_str(), &raw);
    if (rc != UPIMH_OK) die("config");
    experiment.reset(raw);
  }

  auto set = [&](const std::string& key, const std::string& value) {
    if (upimh_experiment_set(experiment.get(), key.c_str(), value.c_str()) != UPIMH_OK)
      die("override " + key);
  };
  set("experiment", "\"" + kind + "\"");
  if (app.count("--seed")) set("seed", std::to_string(seed));
  if (app.count("--replicates")) set("replicates", std::to_string(replicates));
  if (app.count("--threads")) set("threads", std::to_string(threads));
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "upimh: --set expects key=JSON, got: " << kv << "\n";
      return 1;
    }
    set(kv.substr(0, eq), kv.substr(eq + 1));
  }

  ResultPtr result;
  {
    upimh_result* raw = nullptr;
    if (upimh_experiment_run(experiment.get(), &raw) != UPIMH_OK) die("run");
    result.reset(raw);
  }

  const upimh_table* table = nullptr;
  upimh_result_table(result.get(), &table);
  if (out_path.empty()) {
    print_table_csv(table);
  } else if (upimh_table_write_csv(table, out_path.c_str()) != UPIMH_OK) {
    die("write " + out_path);
  }

  if (plot_data) {
    const std::string stem = out_path.empty() ? kind : out_path;
    size_t n_plots = 0;
    upimh_result_num_plots(result.get(), &n_plots);
    for (size_t i = 0; i < n_plots; ++i) {
      const char* name = nullptr;
      const upimh_table* plot = nullptr;
      upimh_result_plot_name(result.get(), i, &name);
      upimh_result_plot_table(result.get(), i, &plot);
      write_plot_file(plot, stem + "." + name + ".dat");
    }
  }
  return 0;
}
