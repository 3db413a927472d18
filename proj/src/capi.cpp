#include "upimh.h"

#include <exception>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "upimh/config.hpp"
#include "upimh/harness.hpp"
#include "upimh/large_sample.hpp"

using nlohmann::json;

namespace {

thread_local std::string g_last_error;

int fail(int code, const std::string& message) {
  g_last_error = message;
  return code;
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const json::parse_error& e) {
    return fail(UPIMH_ECONFIG, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(UPIMH_EINVAL, e.what());
  } catch (const std::domain_error& e) {
    return fail(UPIMH_EINVAL, e.what());
  } catch (const std::exception& e) {
    return fail(UPIMH_ERUNTIME, e.what());
  }
}

}  // namespace

struct upimh_experiment {
  json config;  // raw document; parsed and validated on every run
};

struct upimh_table {
  upimh::ResultTable data;
};

struct upimh_result {
  upimh_table main;
  std::vector<std::pair<std::string, upimh_table>> plots;
};

extern "C" {

const char* upimh_version(void) { return "1.0.0"; }

const char* upimh_last_error(void) { return g_last_error.c_str(); }

int upimh_experiment_create(const char* config_json, upimh_experiment** out) {
  if (!out) return fail(UPIMH_EINVAL, "null output pointer");
  *out = nullptr;
  return run_guarded([&]() {
    const std::string text = config_json ? config_json : "";
    // Validate eagerly so errors surface at creation time.
    upimh::parse_config(text);
    auto* experiment = new upimh_experiment;
    experiment->config = text.empty() ? json::object() : json::parse(text);
    *out = experiment;
    return UPIMH_OK;
  });
}

int upimh_experiment_create_from_file(const char* path, upimh_experiment** out) {
  if (!path || !out) return fail(UPIMH_EINVAL, "null argument");
  std::ifstream is(path);
  if (!is) return fail(UPIMH_EIO, std::string("cannot open: ") + path);
  std::ostringstream buffer;
  buffer << is.rdbuf();
  return upimh_experiment_create(buffer.str().c_str(), out);
}

void upimh_experiment_free(upimh_experiment* experiment) { delete experiment; }

int upimh_experiment_set(upimh_experiment* experiment, const char* key,
                         const char* json_value) {
  if (!experiment || !key || !json_value) return fail(UPIMH_EINVAL, "null argument");
  return run_guarded([&]() {
    const json value = json::parse(json_value);
    json patched = experiment->config;
    json* node = &patched;
    std::string path(key), part;
    size_t pos;
    while ((pos = path.find('.')) != std::string::npos) {
      part = path.substr(0, pos);
      path.erase(0, pos + 1);
      node = &(*node)[part];
    }
    (*node)[path] = value;
    // Commit only if the document still validates.
    upimh::parse_config(patched.dump());
    experiment->config = std::move(patched);
    return UPIMH_OK;
  });
}

int upimh_experiment_run(const upimh_experiment* experiment, upimh_result** out) {
  if (!experiment || !out) return fail(UPIMH_EINVAL, "null argument");
  *out = nullptr;
  return run_guarded([&]() {
    const upimh::ExperimentConfig config =
        upimh::parse_config(experiment->config.dump());
    upimh::ExperimentOutput output = upimh::run_experiment(config);
    auto* result = new upimh_result;
    result->main.data = std::move(output.table);
    for (auto& [name, table] : output.plot_data)
      result->plots.emplace_back(name, upimh_table{std::move(table)});
    *out = result;
    return UPIMH_OK;
  });
}

void upimh_result_free(upimh_result* result) { delete result; }

int upimh_result_table(const upimh_result* result, const upimh_table** out) {
  if (!result || !out) return fail(UPIMH_EINVAL, "null argument");
  *out = &result->main;
  return UPIMH_OK;
}

int upimh_result_num_plots(const upimh_result* result, size_t* out) {
  if (!result || !out) return fail(UPIMH_EINVAL, "null argument");
  *out = result->plots.size();
  return UPIMH_OK;
}

int upimh_result_plot_name(const upimh_result* result, size_t index,
                           const char** out) {
  if (!result || !out) return fail(UPIMH_EINVAL, "null argument");
  if (index >= result->plots.size()) return fail(UPIMH_EINVAL, "plot index out of range");
  *out = result->plots[index].first.c_str();
  return UPIMH_OK;
}

int upimh_result_plot_table(const upimh_result* result, size_t index,
                            const upimh_table** out) {
  if (!result || !out) return fail(UPIMH_EINVAL, "null argument");
  if (index >= result->plots.size()) return fail(UPIMH_EINVAL, "plot index out of range");
  *out = &result->plots[index].second;
  return UPIMH_OK;
}

int upimh_table_num_rows(const upimh_table* table, size_t* out) {
  if (!table || !out) return fail(UPIMH_EINVAL, "null argument");
  *out = table->data.rows.size();
  return UPIMH_OK;
}

int upimh_table_num_cols(const upimh_table* table, size_t* out) {
  if (!table || !out) return fail(UPIMH_EINVAL, "null argument");
  *out = table->data.columns.size();
  return UPIMH_OK;
}

int upimh_table_column_name(const upimh_table* table, size_t col, const char** out) {
  if (!table || !out) return fail(UPIMH_EINVAL, "null argument");
  if (col >= table->data.columns.size())
    return fail(UPIMH_EINVAL, "column index out of range");
  *out = table->data.columns[col].c_str();
  return UPIMH_OK;
}

int upimh_table_value(const upimh_table* table, size_t row, size_t col, double* out) {
  if (!table || !out) return fail(UPIMH_EINVAL, "null argument");
  if (row >= table->data.rows.size() || col >= table->data.columns.size())
    return fail(UPIMH_EINVAL, "cell index out of range");
  *out = table->data.rows[row][col];
  return UPIMH_OK;
}

int upimh_table_write_csv(const upimh_table* table, const char* path) {
  if (!table || !path) return fail(UPIMH_EINVAL, "null argument");
  return run_guarded([&]() {
    table->data.write_csv_file(path);
    return UPIMH_OK;
  });
}

int upimh_alpha_sigma(double z, double sigma, double* out) {
  if (!out) return fail(UPIMH_EINVAL, "null output pointer");
  return run_guarded([&]() {
    *out = upimh::alpha_sigma(z, sigma);
    return UPIMH_OK;
  });
}

int upimh_tau_one_closed(double sigma, double* out) {
  if (!out) return fail(UPIMH_EINVAL, "null output pointer");
  return run_guarded([&]() {
    *out = upimh::tau_one_closed(sigma);
    return UPIMH_OK;
  });
}

int upimh_tau_pmf(int n, double sigma, double* out) {
  if (!out) return fail(UPIMH_EINVAL, "null output pointer");
  return run_guarded([&]() {
    *out = upimh::tau_pmf(n, sigma);
    return UPIMH_OK;
  });
}

int upimh_expected_tau(double sigma, double* out) {
  if (!out) return fail(UPIMH_EINVAL, "null output pointer");
  return run_guarded([&]() {
    *out = upimh::expected_tau(sigma);
    return UPIMH_OK;
  });
}

int upimh_recommend_n(long pilot_n, double sigma_hat, long* out) {
  if (!out) return fail(UPIMH_EINVAL, "null output pointer");
  return run_guarded([&]() {
    *out = upimh::recommend_n(pilot_n, sigma_hat);
    return UPIMH_OK;
  });
}

}  // extern "C"
