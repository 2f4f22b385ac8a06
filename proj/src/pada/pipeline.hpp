#pragma once

#include "pada/config.hpp"
#include "pada/posterior.hpp"
#include "pada/reconstruct.hpp"
#include "pada/smoothing.hpp"
#include "pada/whittle.hpp"

namespace pada {

struct FitDiagnostics {
  double bandwidth_mu = 0.0;
  double bandwidth_f = 0.0;
  int lag_window = 0;
  VectorXd component_variance;  // integral of eta_k, all computed components
  double total_variance = 0.0;  // spectral trace integral
  double fve_achieved = 0.0;
  std::vector<double> phase_objectives;
  std::vector<int> lag_spans;
  std::vector<double> sup_norms;
  bool noise_clamped = false;
  bool exact_scores = false;  // dense posterior used (else MAP, no covariance)
  int small_gap_frequencies = 0;
  int alignment_flags = 0;
  SmootherDiagnostics mean_smoother;
  SmootherDiagnostics surface_smoother;
};

// A complete fit: everything reconstruction, forecasting and band
// construction need downstream.
struct FitModel {
  TimeGrid grid;
  FrequencyGrid freqs;
  VectorXd mean;
  FilterBank bank;
  WhittleSpectrum wspec;
  double sigma2 = 0.0;
  ScoreSet scores;
  FitDiagnostics diag;
  ModelConfig cfg;  // resolved values (bandwidths, lag window, components)
};

// trapezoid integral over frequency of the pointwise operator trace
double spectral_trace(const SpectralDensity& sd);

// smallest K with cumulative component variance >= fve * total, capped
int select_components(const VectorXd& component_variance, double total,
                      double fve, int max_components);

// Shared first stage: bandwidths, smoothed mean, spectral density surface,
// noise variance. Every estimator (optimal, non-optimal, static baseline)
// starts from the same surfaces, so method comparisons isolate the filters.
struct SmoothedSurfaces {
  TimeGrid grid;
  FrequencyGrid freqs;
  double bandwidth_mu = 0.0;
  double bandwidth_f = 0.0;
  int lag_window = 0;
  VectorXd mean;
  std::vector<std::vector<double>> mean_at_obs;
  SpectralDensity density;
  double sigma2 = 0.0;
  bool noise_clamped = false;
  SmootherDiagnostics mean_diag;
  SmootherDiagnostics surface_diag;
};

SmoothedSurfaces smooth_surfaces(const FtsDataset& data,
                                 const ModelConfig& cfg);

// Full estimation path: smoothed mean and spectral density, per-frequency
// eigensystem, phase optimization, filter synthesis, Whittle prior, exact
// Gaussian score posterior (MAP fallback past the dimension guard).
FitModel fit_pada(const FtsDataset& data, const ModelConfig& cfg);
FitModel fit_pada_from(const SmoothedSurfaces& surfaces,
                       const FtsDataset& data, const ModelConfig& cfg);

// Same pipeline with the gauge frozen at nu == 1 (skips optimization).
FitModel fit_nonoptimal(const FtsDataset& data, const ModelConfig& cfg);

// Refit scores only: new data, frozen mean/filters/spectrum/noise. Used by
// rolling one-step forecast evaluation.
ScoreSet refit_scores(const FitModel& model, const FtsDataset& data,
                      bool want_covariance);

}  // namespace pada
