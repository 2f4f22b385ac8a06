#include "pada.h"

#include <cstdlib>
#include <cstring>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "pada/bench.hpp"
#include "pada/bundle.hpp"
#include "pada/csv.hpp"
#include "pada/pipeline.hpp"
#include "pada/reconstruct.hpp"
#include "pada/run_config.hpp"
#include "pada/simulate.hpp"

struct pada_config {
  pada::RunConfig rc;
};

struct pada_dataset {
  pada::FtsDataset data;
  std::vector<long> ids;
  std::vector<long> gaps;
};

struct pada_model {
  pada::ModelBundle bundle;
};

namespace {

using nlohmann::json;

thread_local std::string g_last_error;

pada_status map_code(pada::ErrorCode code) {
  switch (code) {
    case pada::ErrorCode::invalid_argument:
      return PADA_ERR_INVALID_ARGUMENT;
    case pada::ErrorCode::dimension_mismatch:
      return PADA_ERR_DIMENSION;
    case pada::ErrorCode::io:
      return PADA_ERR_IO;
    case pada::ErrorCode::parse:
      return PADA_ERR_PARSE;
    case pada::ErrorCode::numeric:
      return PADA_ERR_NUMERIC;
    case pada::ErrorCode::checksum:
      return PADA_ERR_CHECKSUM;
    case pada::ErrorCode::unknown_key:
      return PADA_ERR_UNKNOWN_KEY;
  }
  return PADA_ERR_INTERNAL;
}

template <typename F>
pada_status guarded(F&& body) noexcept {
  try {
    body();
    g_last_error.clear();
    return PADA_OK;
  } catch (const pada::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PADA_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return PADA_ERR_INTERNAL;
  }
}

void need(bool ok, const char* what) {
  pada::require(ok, pada::ErrorCode::invalid_argument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) pada::fail(pada::ErrorCode::numeric, "out of memory");
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// fit AR score models for forecasting and forecast bands
std::vector<pada::ArModel> score_models(const pada::FitModel& m) {
  std::vector<pada::ArModel> models;
  models.reserve(size_t(m.scores.component_count()));
  for (const auto& xi : m.scores.xi)
    models.push_back(pada::fit_ar(xi, m.cfg.ar_max_order));
  return models;
}

void fill_rows(double* out, const std::vector<pada::VectorXd>& rows) {
  size_t i = 0;
  for (const auto& r : rows)
    for (long g = 0; g < r.size(); ++g) out[i++] = r[g];
}

void fill_bands(const std::vector<pada::CurveBand>& bands, double* lower,
                double* center, double* upper) {
  size_t i = 0;
  for (const auto& b : bands)
    for (long g = 0; g < b.t.size(); ++g, ++i) {
      lower[i] = b.lower[g];
      center[i] = b.center[g];
      upper[i] = b.upper[g];
    }
}

json summary_json(const pada::MetricSummary& s) {
  return json{{"hi", s.hi}, {"lo", s.lo}, {"mean", s.mean}};
}

json bench_report_json(const pada::BenchReport& report) {
  json methods = json::array();
  for (const auto& m : report.methods) {
    methods.push_back(json{{"attempted", m.attempted},
                           {"failed", m.failed},
                           {"lag_summary", summary_json(m.lag_summary)},
                           {"mean_lag", m.mean_lag},
                           {"method", pada::bench_method_name(m.method)},
                           {"mse", m.mse},
                           {"mse_summary", summary_json(m.mse_summary)},
                           {"mspe", m.mspe},
                           {"mspe_summary", summary_json(m.mspe_summary)},
                           {"sup_norm", m.sup_norm},
                           {"sup_summary", summary_json(m.sup_summary)}});
  }
  const pada::SimSpec& s = report.spec;
  json spec{{"case", s.scase == pada::SimCase::case1 ? 1 : 2},
            {"curve_count", s.curve_count},
            {"freq_half", s.freq_half},
            {"future_count", s.future_count},
            {"grid_size", s.grid_size},
            {"n_max", s.n_max},
            {"n_min", s.n_min},
            {"rho", s.rho},
            {"seed", s.seed}};
  return json{{"forecast_span", report.forecast_span},
              {"methods", methods},
              {"reps", report.reps},
              {"spec", spec}};
}

std::string bench_report_csv(const pada::BenchReport& report) {
  std::string out =
      "method,attempted,failed,mse_mean,mse_lo,mse_hi,"
      "mspe_mean,mspe_lo,mspe_hi,sup_mean,lag_mean\n";
  char buf[256];
  for (const auto& m : report.methods) {
    std::snprintf(buf, sizeof(buf),
                  "%s,%d,%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                  pada::bench_method_name(m.method).c_str(), m.attempted,
                  m.failed, m.mse_summary.mean, m.mse_summary.lo,
                  m.mse_summary.hi, m.mspe_summary.mean, m.mspe_summary.lo,
                  m.mspe_summary.hi, m.sup_summary.mean, m.lag_summary.mean);
    out += buf;
  }
  return out;
}

}  // namespace

extern "C" {

const char* pada_version(void) { return "0.1.0"; }

const char* pada_last_error(void) { return g_last_error.c_str(); }

void pada_string_free(char* s) { std::free(s); }

/* ---- configuration -------------------------------------------------- */

pada_status pada_config_create(pada_config** out) {
  return guarded([&] {
    need(out != nullptr, "pada_config_create: null out pointer");
    *out = new pada_config{};
  });
}

void pada_config_destroy(pada_config* cfg) { delete cfg; }

pada_status pada_config_apply_json(pada_config* cfg, const char* json_text) {
  return guarded([&] {
    need(cfg != nullptr && json_text != nullptr,
         "pada_config_apply_json: null argument");
    pada::apply_run_config_text(cfg->rc, json_text, "config");
  });
}

pada_status pada_config_get_f64(const pada_config* cfg, const char* key,
                                double* out) {
  return guarded([&] {
    need(cfg != nullptr && key != nullptr && out != nullptr,
         "pada_config_get_f64: null argument");
    const pada::RunConfig& rc = cfg->rc;
    std::string k = key;
    if (k == "level")
      *out = rc.level;
    else if (k == "rho")
      *out = rc.sim.rho;
    else if (k == "fve")
      *out = rc.model.fve;
    else if (k == "epsilon_l")
      *out = rc.model.epsilon_l;
    else if (k == "bandwidth_mu") {
      need(rc.model.bandwidth_mu.has_value(), "bandwidth_mu is not set");
      *out = *rc.model.bandwidth_mu;
    } else if (k == "bandwidth_f") {
      need(rc.model.bandwidth_f.has_value(), "bandwidth_f is not set");
      *out = *rc.model.bandwidth_f;
    } else
      pada::fail(pada::ErrorCode::unknown_key,
                 "pada_config_get_f64: unknown key '" + k + "'");
  });
}

pada_status pada_config_get_i64(const pada_config* cfg, const char* key,
                                int64_t* out) {
  return guarded([&] {
    need(cfg != nullptr && key != nullptr && out != nullptr,
         "pada_config_get_i64: null argument");
    const pada::RunConfig& rc = cfg->rc;
    std::string k = key;
    if (k == "horizon")
      *out = rc.horizon;
    else if (k == "reps")
      *out = rc.reps;
    else if (k == "seed")
      *out = int64_t(rc.model.seed);
    else if (k == "grid_size")
      *out = rc.model.grid_size;
    else if (k == "freq_half")
      *out = rc.model.freq_half;
    else if (k == "case")
      *out = rc.sim.scase == pada::SimCase::case1 ? 1 : 2;
    else if (k == "curve_count")
      *out = rc.sim.curve_count;
    else if (k == "future_count")
      *out = rc.sim.future_count;
    else if (k == "n_min")
      *out = rc.sim.n_min;
    else if (k == "n_max")
      *out = rc.sim.n_max;
    else if (k == "threads")
      *out = rc.model.threads;
    else if (k == "band_draws")
      *out = rc.model.band_draws;
    else if (k == "components") {
      need(rc.model.components.has_value(), "components is not set");
      *out = *rc.model.components;
    } else if (k == "lag_window") {
      need(rc.model.lag_window.has_value(), "lag_window is not set");
      *out = *rc.model.lag_window;
    } else
      pada::fail(pada::ErrorCode::unknown_key,
                 "pada_config_get_i64: unknown key '" + k + "'");
  });
}

pada_status pada_config_get_str(const pada_config* cfg, const char* key,
                                char** out) {
  return guarded([&] {
    need(cfg != nullptr && key != nullptr && out != nullptr,
         "pada_config_get_str: null argument");
    const pada::RunConfig& rc = cfg->rc;
    std::string k = key;
    if (k == "input")
      *out = dup_string(rc.input);
    else if (k == "bundle")
      *out = dup_string(rc.bundle);
    else if (k == "out")
      *out = dup_string(rc.out);
    else if (k == "methods") {
      std::string joined;
      for (const auto& m : rc.methods) {
        if (!joined.empty()) joined += ",";
        joined += m;
      }
      *out = dup_string(joined);
    } else
      pada::fail(pada::ErrorCode::unknown_key,
                 "pada_config_get_str: unknown key '" + k + "'");
  });
}

/* ---- datasets ------------------------------------------------------- */

pada_status pada_dataset_create(pada_dataset** out) {
  return guarded([&] {
    need(out != nullptr, "pada_dataset_create: null out pointer");
    *out = new pada_dataset{};
  });
}

void pada_dataset_destroy(pada_dataset* data) { delete data; }

pada_status pada_dataset_add_curve(pada_dataset* data, const double* times,
                                   const double* values, size_t n) {
  return guarded([&] {
    need(data != nullptr && times != nullptr && values != nullptr,
         "pada_dataset_add_curve: null argument");
    pada::SampledCurve c;
    c.times.assign(times, times + n);
    c.values.assign(values, values + n);
    c.validate();
    data->data.curves.push_back(std::move(c));
    data->ids.push_back(long(data->data.curves.size()));
  });
}

pada_status pada_dataset_read_csv(const char* path, pada_dataset** out) {
  return guarded([&] {
    need(path != nullptr && out != nullptr,
         "pada_dataset_read_csv: null argument");
    pada::CurveCsv csv = pada::read_curve_csv(path);
    *out = new pada_dataset{std::move(csv.data), std::move(csv.curve_ids),
                            std::move(csv.gap_ids)};
  });
}

pada_status pada_dataset_write_csv(const pada_dataset* data,
                                   const char* path) {
  return guarded([&] {
    need(data != nullptr && path != nullptr,
         "pada_dataset_write_csv: null argument");
    pada::write_curve_csv(path, data->data, data->ids);
  });
}

size_t pada_dataset_curve_count(const pada_dataset* data) {
  return data == nullptr ? 0 : size_t(data->data.curve_count());
}

size_t pada_dataset_gap_count(const pada_dataset* data) {
  return data == nullptr ? 0 : data->gaps.size();
}

long pada_dataset_gap_id(const pada_dataset* data, size_t i) {
  if (data == nullptr || i >= data->gaps.size()) return 0;
  return data->gaps[i];
}

pada_status pada_simulate_dataset(const pada_config* cfg,
                                  pada_dataset** out) {
  return guarded([&] {
    need(cfg != nullptr && out != nullptr,
         "pada_simulate_dataset: null argument");
    pada::SimTruth truth = pada::generate(cfg->rc.sim);
    std::vector<long> ids(truth.data.curves.size());
    std::iota(ids.begin(), ids.end(), 1L);
    *out = new pada_dataset{std::move(truth.data), std::move(ids), {}};
  });
}

/* ---- models --------------------------------------------------------- */

pada_status pada_fit(const pada_dataset* data, const pada_config* cfg,
                     pada_model** out) {
  return guarded([&] {
    need(data != nullptr && cfg != nullptr && out != nullptr,
         "pada_fit: null argument");
    need(data->data.curve_count() >= 2, "pada_fit: need at least 2 curves");
    bool has_pair = false;
    for (const auto& c : data->data.curves)
      if (c.size() >= 2) has_pair = true;
    pada::FitModel fit = [&] {
      if (has_pair || data->data.noise_variance)
        return pada::fit_pada(data->data, cfg->rc.model);
      // noise variance is unidentifiable without within-curve pairs; fall
      // back to one tenth of the pooled observation variance and flag it
      double sum = 0.0, sq = 0.0;
      long n = 0;
      for (const auto& c : data->data.curves)
        for (double v : c.values) {
          sum += v;
          sq += v * v;
          ++n;
        }
      double var = sq / double(n) - (sum / double(n)) * (sum / double(n));
      pada::FtsDataset patched = data->data;
      patched.noise_variance = std::max(var / 10.0, 1e-8);
      pada::FitModel m = pada::fit_pada(patched, cfg->rc.model);
      m.diag.noise_clamped = true;
      return m;
    }();
    *out = new pada_model{
        pada::ModelBundle{std::move(fit), data->ids}};
  });
}

void pada_model_destroy(pada_model* model) { delete model; }

pada_status pada_model_save(const pada_model* model, const char* dir) {
  return guarded([&] {
    need(model != nullptr && dir != nullptr,
         "pada_model_save: null argument");
    pada::write_model_bundle(dir, model->bundle);
  });
}

pada_status pada_model_load(const char* dir, pada_model** out) {
  return guarded([&] {
    need(dir != nullptr && out != nullptr, "pada_model_load: null argument");
    *out = new pada_model{pada::read_model_bundle(dir)};
  });
}

size_t pada_model_component_count(const pada_model* model) {
  return model == nullptr ? 0
                          : size_t(model->bundle.model.bank.component_count());
}

size_t pada_model_grid_size(const pada_model* model) {
  return model == nullptr ? 0 : size_t(model->bundle.model.grid.size());
}

size_t pada_model_curve_count(const pada_model* model) {
  return model == nullptr ? 0
                          : size_t(model->bundle.model.scores.curve_count);
}

long pada_model_curve_id(const pada_model* model, size_t j) {
  if (model == nullptr || j >= pada_model_curve_count(model)) return 0;
  const auto& ids = model->bundle.curve_ids;
  return j < ids.size() ? ids[j] : long(j) + 1;
}

pada_status pada_model_sigma2(const pada_model* model, double* out) {
  return guarded([&] {
    need(model != nullptr && out != nullptr,
         "pada_model_sigma2: null argument");
    *out = model->bundle.model.sigma2;
  });
}

pada_status pada_model_lag_span(const pada_model* model, size_t k,
                                int* out) {
  return guarded([&] {
    need(model != nullptr && out != nullptr,
         "pada_model_lag_span: null argument");
    need(k < size_t(model->bundle.model.bank.component_count()),
         "pada_model_lag_span: component index out of range");
    *out = model->bundle.model.bank.comps[k].lag_span();
  });
}

pada_status pada_model_sup_norm(const pada_model* model, size_t k,
                                double* out) {
  return guarded([&] {
    need(model != nullptr && out != nullptr,
         "pada_model_sup_norm: null argument");
    need(k < size_t(model->bundle.model.bank.component_count()),
         "pada_model_sup_norm: component index out of range");
    *out = model->bundle.model.bank.comps[k].sup_norm;
  });
}

pada_status pada_model_mean(const pada_model* model, double* out) {
  return guarded([&] {
    need(model != nullptr && out != nullptr,
         "pada_model_mean: null argument");
    const pada::VectorXd& mean = model->bundle.model.mean;
    for (long g = 0; g < mean.size(); ++g) out[g] = mean[g];
  });
}

pada_status pada_model_info_json(const pada_model* model, char** out) {
  return guarded([&] {
    need(model != nullptr && out != nullptr,
         "pada_model_info_json: null argument");
    const pada::FitModel& m = model->bundle.model;
    json comps = json::array();
    for (int k = 0; k < m.bank.component_count(); ++k) {
      const auto& c = m.bank.comps[size_t(k)];
      json entry{{"lag_span", c.lag_span()}, {"sup_norm", c.sup_norm}};
      if (k < int(m.diag.phase_objectives.size()))
        entry["phase_objective"] = m.diag.phase_objectives[size_t(k)];
      comps.push_back(entry);
    }
    json info{{"bandwidth_f", m.diag.bandwidth_f},
              {"bandwidth_mu", m.diag.bandwidth_mu},
              {"component_count", m.bank.component_count()},
              {"components", comps},
              {"curve_count", m.scores.curve_count},
              {"exact_scores", m.diag.exact_scores},
              {"fve_achieved", m.diag.fve_achieved},
              {"grid_size", m.grid.size()},
              {"lag_window", m.diag.lag_window},
              {"noise_clamped", m.diag.noise_clamped},
              {"sigma2", m.sigma2},
              {"total_variance", m.diag.total_variance}};
    *out = dup_string(info.dump(2) + "\n");
  });
}

/* ---- reconstruction and forecasting --------------------------------- */

pada_status pada_reconstruct(const pada_model* model, double* out) {
  return guarded([&] {
    need(model != nullptr && out != nullptr,
         "pada_reconstruct: null argument");
    const pada::FitModel& m = model->bundle.model;
    fill_rows(out, pada::reconstruct(m.mean, m.bank, m.scores));
  });
}

pada_status pada_forecast(const pada_model* model, int steps, double* out) {
  return guarded([&] {
    need(model != nullptr && out != nullptr,
         "pada_forecast: null argument");
    need(steps >= 1, "pada_forecast: steps must be positive");
    const pada::FitModel& m = model->bundle.model;
    pada::ScoreSet scores = m.scores;  // forecast extends the copy
    fill_rows(out, pada::forecast(m.bank, scores, score_models(m), steps,
                                  m.mean));
  });
}

pada_status pada_reconstruct_bands(const pada_model* model, double level,
                                   int draws, uint64_t seed, double* lower,
                                   double* center, double* upper) {
  return guarded([&] {
    need(model != nullptr && lower != nullptr && center != nullptr &&
             upper != nullptr,
         "pada_reconstruct_bands: null argument");
    const pada::FitModel& m = model->bundle.model;
    pada::BandRequest req;
    req.target = pada::BandTarget::reconstruction;
    req.level = level;
    req.draws = draws > 0 ? draws : m.cfg.band_draws;
    req.seed = seed;
    fill_bands(pada::credible_bands(m.scores, {}, m.bank, m.mean, m.sigma2,
                                    req),
               lower, center, upper);
  });
}

pada_status pada_forecast_bands(const pada_model* model, int steps,
                                double level, int draws, uint64_t seed,
                                double* lower, double* center,
                                double* upper) {
  return guarded([&] {
    need(model != nullptr && lower != nullptr && center != nullptr &&
             upper != nullptr,
         "pada_forecast_bands: null argument");
    need(steps >= 1, "pada_forecast_bands: steps must be positive");
    const pada::FitModel& m = model->bundle.model;
    pada::BandRequest req;
    req.target = pada::BandTarget::forecast;
    req.horizon = steps;
    req.level = level;
    req.draws = draws > 0 ? draws : m.cfg.band_draws;
    req.seed = seed;
    req.observation_noise = true;  // forecast bands cover observations
    fill_bands(pada::credible_bands(m.scores, score_models(m), m.bank,
                                    m.mean, m.sigma2, req),
               lower, center, upper);
  });
}

/* ---- benchmarking ---------------------------------------------------- */

pada_status pada_bench_run(const pada_config* cfg, char** json_out,
                           char** csv_out) {
  return guarded([&] {
    need(cfg != nullptr, "pada_bench_run: null config");
    need(json_out != nullptr || csv_out != nullptr,
         "pada_bench_run: no output requested");
    std::vector<pada::BenchMethod> methods;
    for (const auto& name : cfg->rc.methods)
      methods.push_back(pada::bench_method_from_name(name));
    pada::BenchReport report = pada::run_benchmark(
        cfg->rc.sim, methods, cfg->rc.reps, cfg->rc.model);
    if (json_out != nullptr)
      *json_out = dup_string(bench_report_json(report).dump(2) + "\n");
    if (csv_out != nullptr) *csv_out = dup_string(bench_report_csv(report));
  });
}

}  // extern "C"
