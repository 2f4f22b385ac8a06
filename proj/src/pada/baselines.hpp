#pragma once

#include "pada/ar.hpp"
#include "pada/pipeline.hpp"

namespace pada {

// Static FPCA with conditional-expectation scores: eigenpairs of the lag-0
// covariance surface (frequency integral of the spectral density), best
// linear score prediction under the working Gaussian model, VAR forecasting
// of the score panel. Serial dependence within the expansion is ignored,
// which is exactly what the dynamic method is benchmarked against.
struct StaticFit {
  TimeGrid grid;
  VectorXd mean;
  VectorXd eigenvalues;     // top K operator eigenvalues, descending
  MatrixXd eigenfunctions;  // grid_size x K, unit trapezoid norm
  MatrixXd scores;          // J x K
  double sigma2 = 0.0;
  VectorXd eigen_ladder;    // all computed eigenvalues, for FVE diagnostics
  ModelConfig cfg;          // resolved
};

StaticFit fit_static_fpca(const FtsDataset& data, const ModelConfig& cfg);
StaticFit fit_static_from(const SmoothedSurfaces& surfaces,
                          const FtsDataset& data, const ModelConfig& cfg);

// frequency integral of the spectral density: the lag-0 covariance surface
MatrixXd lag0_covariance(const SpectralDensity& density);

// conditional-expectation scores of new curves under a frozen fit
MatrixXd static_scores(const StaticFit& fit, const FtsDataset& data);

std::vector<VectorXd> static_reconstruct(const StaticFit& fit);

// VAR(<=max_order) forecast of the score panel mapped through the basis
std::vector<VectorXd> static_forecast(const StaticFit& fit, int steps,
                                      int max_order = 3);

}  // namespace pada
