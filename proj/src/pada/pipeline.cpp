#include "pada/pipeline.hpp"

#include <cmath>

#include "pada/filters_build.hpp"
#include "pada/phase_opt.hpp"

namespace pada {

double spectral_trace(const SpectralDensity& sd) {
  double acc = 0.0;
  for (int i = 0; i < sd.freqs.size(); ++i) {
    double tr = 0.0;
    for (int t = 0; t < sd.grid.size(); ++t)
      tr += sd.grid.weights()[size_t(t)] * sd.slice(i)(t, t).real();
    acc += sd.freqs.weights()[size_t(i)] * tr;
  }
  return acc;
}

int select_components(const VectorXd& component_variance, double total,
                      double fve, int max_components) {
  require(total > 0.0, ErrorCode::invalid_argument,
          "select_components: nonpositive total variance");
  require(fve > 0.0 && fve <= 1.0, ErrorCode::invalid_argument,
          "select_components: fve outside (0,1]");
  const int kmax = int(std::min<long>(max_components, component_variance.size()));
  require(kmax >= 1, ErrorCode::invalid_argument,
          "select_components: no components available");
  double acc = 0.0;
  for (int k = 0; k < kmax; ++k) {
    acc += std::max(component_variance[k], 0.0);
    if (acc >= fve * total) return k + 1;
  }
  return kmax;
}

namespace {

EigenSystem truncate_components(const EigenSystem& es, int k) {
  if (k == es.components) return es;
  EigenSystem out(es.grid, es.freqs);
  out.components = k;
  for (int i = 0; i < es.freqs.size(); ++i) {
    out.values.push_back(es.values[size_t(i)].head(k));
    out.functions.push_back(es.functions[size_t(i)].leftCols(k));
  }
  out.diag = es.diag;
  return out;
}

ScoreSet scores_from_posterior(const DesignStack& stack, double sigma2,
                               const WhittleSpectrum& wspec,
                               const ModelConfig& cfg, bool want_covariance,
                               bool* exact_used) {
  ScoreSet scores;
  scores.curve_count = stack.curve_count;
  scores.lag_span = stack.lag_span;
  if (stack.stacked_dim() <= cfg.posterior_dim_guard) {
    PosteriorSummary post =
        exact_posterior(stack, sigma2, wspec, cfg, want_covariance);
    scores.xi = post.mean;
    if (want_covariance) scores.joint_cov = post.covariance;
    if (exact_used != nullptr) *exact_used = true;
  } else {
    MapResult map = map_estimate(stack, sigma2, wspec, cfg);
    scores.xi = map.xi;
    if (exact_used != nullptr) *exact_used = false;
  }
  scores.validate();
  return scores;
}

}  // namespace

SmoothedSurfaces smooth_surfaces(const FtsDataset& data,
                                 const ModelConfig& cfg) {
  data.validate();
  cfg.validate();
  const int J = data.curve_count();
  TimeGrid grid = TimeGrid::uniform(cfg.grid_size);
  FrequencyGrid freqs(cfg.freq_half);

  const double bw_mu =
      cfg.bandwidth_mu ? *cfg.bandwidth_mu : cv_bandwidth_mu(data, grid);
  KernelSpec mu_spec{KernelFamily::epanechnikov, bw_mu};
  SmootherDiagnostics mean_diag;
  VectorXd mean = estimate_mean(data, mu_spec, grid, &mean_diag);
  std::vector<std::vector<double>> mean_at_obs =
      estimate_mean_at_observations(data, mu_spec, &mean_diag);

  const int lag_window =
      cfg.lag_window ? *cfg.lag_window
                     : std::max(1, int(std::lround(std::cbrt(double(J)))));
  require(lag_window < J, ErrorCode::invalid_argument,
          "smooth_surfaces: lag window must be smaller than the curve count");

  const double bw_f = cfg.bandwidth_f ? *cfg.bandwidth_f : 1.5 * bw_mu;
  KernelSpec f_spec{KernelFamily::epanechnikov, bw_f};
  RawCovProducts prod = collect_cov_products(data, mean_at_obs, lag_window);
  SmootherDiagnostics surface_diag;
  SpectralDensity sd = estimate_spectral_density(prod, f_spec, grid, freqs,
                                                 lag_window, &surface_diag);

  // a dataset that carries its noise level skips the estimator entirely
  NoiseEstimate noise;
  if (data.noise_variance) {
    noise.value = std::max(*data.noise_variance, 1e-8);
    noise.clamped = *data.noise_variance < 1e-8;
  } else {
    noise = estimate_noise_variance(data, mean_at_obs, mu_spec, grid);
  }

  return SmoothedSurfaces{std::move(grid),        std::move(freqs),
                          bw_mu,                  bw_f,
                          lag_window,             std::move(mean),
                          std::move(mean_at_obs), std::move(sd),
                          noise.value,            noise.clamped,
                          mean_diag,              surface_diag};
}

FitModel fit_pada(const FtsDataset& data, const ModelConfig& cfg) {
  return fit_pada_from(smooth_surfaces(data, cfg), data, cfg);
}

FitModel fit_pada_from(const SmoothedSurfaces& surfaces,
                       const FtsDataset& data, const ModelConfig& cfg) {
  const int J = data.curve_count();
  require(int(surfaces.mean_at_obs.size()) == J, ErrorCode::dimension_mismatch,
          "fit_pada: surfaces were built from different data");
  TimeGrid grid = surfaces.grid;
  FrequencyGrid freqs = surfaces.freqs;

  ModelConfig resolved = cfg;
  FitDiagnostics diag;
  resolved.bandwidth_mu = surfaces.bandwidth_mu;
  diag.bandwidth_mu = surfaces.bandwidth_mu;
  resolved.bandwidth_f = surfaces.bandwidth_f;
  diag.bandwidth_f = surfaces.bandwidth_f;
  resolved.lag_window = surfaces.lag_window;
  diag.lag_window = surfaces.lag_window;
  diag.mean_smoother = surfaces.mean_diag;
  diag.surface_smoother = surfaces.surface_diag;
  diag.noise_clamped = surfaces.noise_clamped;
  const VectorXd& mean = surfaces.mean;
  const double sigma2 = surfaces.sigma2;

  const int kmax = std::min(cfg.max_components, grid.size());
  EigenSystem aligned = align_phases(eigendecompose(surfaces.density, kmax));
  diag.component_variance = fve_integrals(aligned);
  diag.total_variance = spectral_trace(surfaces.density);
  const int K = cfg.components
                    ? *cfg.components
                    : select_components(diag.component_variance,
                                        diag.total_variance, cfg.fve, kmax);
  require(K >= 1 && K <= kmax, ErrorCode::invalid_argument,
          "fit_pada: component count outside [1, max_components]");
  resolved.components = K;
  diag.fve_achieved =
      diag.component_variance.head(K).sum() / diag.total_variance;
  EigenSystem es = truncate_components(aligned, K);
  diag.small_gap_frequencies = es.diag.small_gap_frequencies;
  diag.alignment_flags = es.diag.alignment_flags;

  std::vector<VectorXcd> phases;
  for (int k = 0; k < K; ++k) {
    PsiKernel psi = build_psi_kernel(es, k);
    if (cfg.optimize_phase) {
      PhaseResult r = optimize_phase(psi, cfg);
      phases.push_back(r.nu);
      diag.phase_objectives.push_back(r.objective);
    } else {
      VectorXcd ones = VectorXcd::Ones(freqs.size());
      phases.push_back(ones);
      diag.phase_objectives.push_back(phase_objective(psi, ones));
    }
  }

  FilterBank bank = build_filters(es, phases, cfg);
  for (const FilterComponent& comp : bank.comps) {
    diag.lag_spans.push_back(comp.lag_span());
    diag.sup_norms.push_back(comp.sup_norm);
  }

  WhittleSpectrum wspec = build_whittle_spectrum(bank, J);
  DesignStack stack = build_design_stack(data, surfaces.mean_at_obs, bank);
  ScoreSet scores = scores_from_posterior(stack, sigma2, wspec, cfg, true,
                                          &diag.exact_scores);

  return FitModel{std::move(grid),  std::move(freqs), mean,
                  std::move(bank),  std::move(wspec), sigma2,
                  std::move(scores), std::move(diag), resolved};
}

FitModel fit_nonoptimal(const FtsDataset& data, const ModelConfig& cfg) {
  ModelConfig frozen = cfg;
  frozen.optimize_phase = false;
  return fit_pada(data, frozen);
}

ScoreSet refit_scores(const FitModel& model, const FtsDataset& data,
                      bool want_covariance) {
  data.validate();
  std::vector<std::vector<double>> mean_at_obs;
  for (const SampledCurve& c : data.curves) {
    std::vector<double> row;
    for (double t : c.times)
      row.push_back(interp_linear(model.grid, model.mean, t));
    mean_at_obs.push_back(std::move(row));
  }
  DesignStack stack = build_design_stack(data, mean_at_obs, model.bank);
  WhittleSpectrum wspec =
      build_whittle_spectrum(model.bank, data.curve_count());
  return scores_from_posterior(stack, model.sigma2, wspec, model.cfg,
                               want_covariance, nullptr);
}

}  // namespace pada
