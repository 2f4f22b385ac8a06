#pragma once

#include <string>
#include <vector>

#include "pada/baselines.hpp"
#include "pada/simulate.hpp"

namespace pada {

// oracle returns the true curves, zero predicts the zero function; both are
// calibration rails for the harness itself.
enum class BenchMethod { pada, nonopt, static_fpca, oracle, zero };

std::string bench_method_name(BenchMethod m);
BenchMethod bench_method_from_name(const std::string& name);

struct MetricSummary {
  double mean = 0.0;
  double lo = 0.0;  // 2.5 percentile across reps
  double hi = 0.0;  // 97.5 percentile across reps
};

MetricSummary summarize_metric(const std::vector<double>& values);

struct MethodReport {
  BenchMethod method = BenchMethod::pada;
  int attempted = 0;
  int failed = 0;
  // one entry per successful rep
  std::vector<double> mse;
  std::vector<double> mspe;
  std::vector<double> sup_norm;  // max_k of the lag-0 filter norm
  std::vector<double> mean_lag;  // mean_k of the selected L_k
  MetricSummary mse_summary;
  MetricSummary mspe_summary;
  MetricSummary sup_summary;
  MetricSummary lag_summary;
};

struct BenchReport {
  SimSpec spec;
  ModelConfig cfg;
  int reps = 0;
  int forecast_span = 0;
  std::vector<MethodReport> methods;
};

// Monte Carlo over generate(): rep r reseeds the generator and the fit with
// spec.seed + r. Reconstruction MSE covers the training span; MSPE is
// rolling one-step forecasts over the appended future span, refitting
// scores (not filters) at each step. K is pinned to the generator's truth.
BenchReport run_benchmark(const SimSpec& spec,
                          const std::vector<BenchMethod>& methods, int reps,
                          const ModelConfig& cfg);

}  // namespace pada
