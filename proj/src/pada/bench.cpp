#include "pada/bench.hpp"

#include <algorithm>
#include <cmath>

#include "pada/reconstruct.hpp"

namespace pada {

std::string bench_method_name(BenchMethod m) {
  switch (m) {
    case BenchMethod::pada: return "pada";
    case BenchMethod::nonopt: return "nonopt";
    case BenchMethod::static_fpca: return "static";
    case BenchMethod::oracle: return "oracle";
    case BenchMethod::zero: return "zero";
  }
  fail(ErrorCode::invalid_argument, "bench_method_name: unknown method");
}

BenchMethod bench_method_from_name(const std::string& name) {
  if (name == "pada") return BenchMethod::pada;
  if (name == "nonopt") return BenchMethod::nonopt;
  if (name == "static") return BenchMethod::static_fpca;
  if (name == "oracle") return BenchMethod::oracle;
  if (name == "zero") return BenchMethod::zero;
  fail(ErrorCode::invalid_argument, "unknown benchmark method: " + name);
}

MetricSummary summarize_metric(const std::vector<double>& values) {
  MetricSummary s;
  if (values.empty()) return s;
  std::vector<double> v = values;
  std::sort(v.begin(), v.end());
  double acc = 0.0;
  for (double x : v) acc += x;
  s.mean = acc / double(v.size());
  auto quantile = [&](double q) {
    const double h = q * double(v.size() - 1);
    const long lo = long(std::floor(h));
    const long hi = std::min<long>(lo + 1, long(v.size()) - 1);
    const double w = h - double(lo);
    return (1.0 - w) * v[size_t(lo)] + w * v[size_t(hi)];
  };
  s.lo = quantile(0.025);
  s.hi = quantile(0.975);
  return s;
}

namespace {

struct RepMetrics {
  double mse = 0.0;
  double mspe = 0.0;
  double sup_norm = 0.0;
  double mean_lag = 0.0;
};

double mse_against_truth(const std::vector<VectorXd>& estimate,
                         const std::vector<VectorXd>& truth, long count,
                         const TimeGrid& grid) {
  double acc = 0.0;
  for (long j = 0; j < count; ++j) {
    VectorXd diff = estimate[size_t(j)] - truth[size_t(j)];
    acc += l2_inner(diff, diff, grid);
  }
  return acc / double(count);
}

FtsDataset front_span(const FtsDataset& data, int count) {
  FtsDataset out;
  out.curves.assign(data.curves.begin(), data.curves.begin() + count);
  out.noise_variance = data.noise_variance;
  return out;
}

std::vector<ArModel> fit_score_models(const ScoreSet& scores, int max_order) {
  std::vector<ArModel> models;
  for (const VectorXd& xi : scores.xi) models.push_back(fit_ar(xi, max_order));
  return models;
}

RepMetrics run_dynamic_method(const SimTruth& truth,
                              const SmoothedSurfaces& surfaces,
                              const FtsDataset& train, const ModelConfig& cfg,
                              bool optimize) {
  ModelConfig method_cfg = cfg;
  method_cfg.optimize_phase = optimize;
  FitModel fit = fit_pada_from(surfaces, train, method_cfg);

  RepMetrics m;
  std::vector<VectorXd> recon = reconstruct(fit.mean, fit.bank, fit.scores);
  m.mse = mse_against_truth(recon, truth.curves, train.curve_count(), fit.grid);
  for (const FilterComponent& comp : fit.bank.comps) {
    m.sup_norm = std::max(m.sup_norm, comp.sup_norm);
    m.mean_lag += double(comp.lag_span()) / double(fit.bank.component_count());
  }

  const int P = int(truth.curves.size()) - train.curve_count();
  double acc = 0.0;
  for (int p = 1; p <= P; ++p) {
    FtsDataset known = front_span(truth.data, train.curve_count() + p - 1);
    ScoreSet scores = refit_scores(fit, known, false);
    std::vector<ArModel> models =
        fit_score_models(scores, fit.cfg.ar_max_order);
    std::vector<VectorXd> pred = forecast(fit.bank, scores, models, 1, fit.mean);
    VectorXd diff =
        pred[0] - truth.curves[size_t(train.curve_count() + p - 1)];
    acc += l2_inner(diff, diff, fit.grid);
  }
  if (P > 0) m.mspe = acc / double(P);
  return m;
}

RepMetrics run_static_method(const SimTruth& truth,
                             const SmoothedSurfaces& surfaces,
                             const FtsDataset& train, const ModelConfig& cfg) {
  StaticFit fit = fit_static_from(surfaces, train, cfg);

  RepMetrics m;
  m.sup_norm = 1.0;  // unit-norm basis, no lag structure
  m.mean_lag = 0.0;
  std::vector<VectorXd> recon = static_reconstruct(fit);
  m.mse = mse_against_truth(recon, truth.curves, train.curve_count(), fit.grid);

  const int P = int(truth.curves.size()) - train.curve_count();
  double acc = 0.0;
  for (int p = 1; p <= P; ++p) {
    FtsDataset known = front_span(truth.data, train.curve_count() + p - 1);
    StaticFit rolled = fit;
    rolled.scores = static_scores(fit, known);
    std::vector<VectorXd> pred = static_forecast(rolled, 1);
    VectorXd diff =
        pred[0] - truth.curves[size_t(train.curve_count() + p - 1)];
    acc += l2_inner(diff, diff, fit.grid);
  }
  if (P > 0) m.mspe = acc / double(P);
  return m;
}

RepMetrics run_rail_method(const SimTruth& truth, const FtsDataset& train,
                           bool oracle) {
  RepMetrics m;
  const int J = train.curve_count();
  const int P = int(truth.curves.size()) - J;
  if (oracle) {
    const FilterComponent& comp = truth.bank.comps[0];
    m.sup_norm = comp.sup_norm;
    m.mean_lag = comp.lag_span();
    return m;  // exact curves: both errors are zero
  }
  double mse = 0.0;
  for (int j = 0; j < J; ++j)
    mse += l2_inner(truth.curves[size_t(j)], truth.curves[size_t(j)], truth.grid);
  m.mse = mse / double(J);
  double mspe = 0.0;
  for (int p = 1; p <= P; ++p) {
    const VectorXd& c = truth.curves[size_t(J + p - 1)];
    mspe += l2_inner(c, c, truth.grid);
  }
  if (P > 0) m.mspe = mspe / double(P);
  return m;
}

}  // namespace

BenchReport run_benchmark(const SimSpec& spec,
                          const std::vector<BenchMethod>& methods, int reps,
                          const ModelConfig& cfg) {
  spec.validate();
  require(reps >= 1, ErrorCode::invalid_argument,
          "run_benchmark: need at least one rep");
  require(!methods.empty(), ErrorCode::invalid_argument,
          "run_benchmark: no methods given");
  require(cfg.grid_size == spec.grid_size, ErrorCode::invalid_argument,
          "run_benchmark: estimator and generator grids must match");

  BenchReport report;
  report.spec = spec;
  report.cfg = cfg;
  report.reps = reps;
  report.forecast_span = spec.future_count;
  for (BenchMethod m : methods) {
    MethodReport mr;
    mr.method = m;
    report.methods.push_back(mr);
  }

  for (int r = 0; r < reps; ++r) {
    SimSpec rep_spec = spec;
    rep_spec.seed = spec.seed + uint64_t(r);
    SimTruth truth = generate(rep_spec);
    FtsDataset train = front_span(truth.data, spec.curve_count);

    ModelConfig rep_cfg = cfg;
    rep_cfg.seed = spec.seed + uint64_t(r);
    if (!rep_cfg.components) rep_cfg.components = spec.component_count();

    bool need_surfaces = false;
    for (BenchMethod m : methods)
      need_surfaces = need_surfaces || m == BenchMethod::pada ||
                      m == BenchMethod::nonopt || m == BenchMethod::static_fpca;
    std::optional<SmoothedSurfaces> surfaces;
    std::string surface_error;
    if (need_surfaces) {
      try {
        surfaces = smooth_surfaces(train, rep_cfg);
      } catch (const Error& e) {
        surface_error = e.what();
      }
    }

    for (size_t mi = 0; mi < methods.size(); ++mi) {
      MethodReport& mr = report.methods[mi];
      mr.attempted += 1;
      try {
        RepMetrics metrics;
        switch (methods[mi]) {
          case BenchMethod::pada:
          case BenchMethod::nonopt: {
            if (!surfaces) fail(ErrorCode::numeric, surface_error);
            metrics = run_dynamic_method(truth, *surfaces, train, rep_cfg,
                                         methods[mi] == BenchMethod::pada);
            break;
          }
          case BenchMethod::static_fpca: {
            if (!surfaces) fail(ErrorCode::numeric, surface_error);
            metrics = run_static_method(truth, *surfaces, train, rep_cfg);
            break;
          }
          case BenchMethod::oracle:
            metrics = run_rail_method(truth, train, true);
            break;
          case BenchMethod::zero:
            metrics = run_rail_method(truth, train, false);
            break;
        }
        mr.mse.push_back(metrics.mse);
        mr.mspe.push_back(metrics.mspe);
        mr.sup_norm.push_back(metrics.sup_norm);
        mr.mean_lag.push_back(metrics.mean_lag);
      } catch (const Error&) {
        mr.failed += 1;
      }
    }
  }

  for (MethodReport& mr : report.methods) {
    mr.mse_summary = summarize_metric(mr.mse);
    mr.mspe_summary = summarize_metric(mr.mspe);
    mr.sup_summary = summarize_metric(mr.sup_norm);
    mr.lag_summary = summarize_metric(mr.mean_lag);
  }
  return report;
}

}  // namespace pada
