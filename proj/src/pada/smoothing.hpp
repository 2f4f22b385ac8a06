#pragma once

#include <vector>

#include "pada/dataset.hpp"
#include "pada/grid.hpp"
#include "pada/kernels.hpp"

namespace pada {

enum class KernelFamily { epanechnikov };

struct KernelSpec {
  KernelFamily family = KernelFamily::epanechnikov;
  double bandwidth = 0.1;
};

// kernel profile K(d/B); normalization constants cancel in the smoothers
double kernel_weight(const KernelSpec& spec, double distance);

struct SmootherDiagnostics {
  int widened_cells = 0;        // cells that needed bandwidth doubling
  double max_bandwidth_used = 0.0;
  int empty_cells = 0;          // no data at all, value fell back to 0
};

// Local linear estimator of the mean on the grid; per-observation weight is
// 1/(J*N_j) so every curve counts equally regardless of sampling density.
VectorXd estimate_mean(const FtsDataset& data, const KernelSpec& spec,
                       const TimeGrid& grid,
                       SmootherDiagnostics* diag = nullptr);

// Same smoother evaluated at each curve's own observation times.
std::vector<std::vector<double>> estimate_mean_at_observations(
    const FtsDataset& data, const KernelSpec& spec,
    SmootherDiagnostics* diag = nullptr);

// 5-fold curve-wise cross validation over a geometric ladder of 8 bandwidths
// spanning [0.5, 4] x (grid spacing * mean(N)^(-1/5)). Ties pick the smaller
// bandwidth.
double cv_bandwidth_mu(const FtsDataset& data, const TimeGrid& grid);

// Raw demeaned cross products pooled by lag. Entry weight carries the
// 1/((J-|h|) M_jh) factor of the surface smoother; the Bartlett lag weight
// is applied at estimation time.
struct RawCovProducts {
  int curve_count = 0;
  int lag_window = 0;
  struct Entry {
    double t1, t2, value, weight;
  };
  std::vector<std::vector<Entry>> lags;        // index h + lag_window
  std::vector<std::vector<long>> pair_counts;  // M_jh over admissible j

  const std::vector<Entry>& lag(int h) const;
  std::vector<Entry>& lag(int h);
};

// mean_at_obs must align with data (one value per observation)
RawCovProducts collect_cov_products(
    const FtsDataset& data, const std::vector<std::vector<double>>& mean_at_obs,
    int L);

// Local surface smoother with Bartlett lag weights W_h = 1 - |h|/L. Returns
// (L/2pi) * d0 per frequency, Hermitian-symmetrized, conjugate-symmetric
// across +-omega by construction, and PSD-clipped per frequency.
SpectralDensity estimate_spectral_density(const RawCovProducts& prod,
                                          const KernelSpec& spec,
                                          const TimeGrid& grid,
                                          const FrequencyGrid& freqs, int L,
                                          SmootherDiagnostics* diag = nullptr);

struct NoiseEstimate {
  double value = 0.0;
  bool clamped = false;  // raw estimate was not positive
};

// Difference between the diagonal smooth including same-point pairs and the
// lag-0 surface smooth excluding them.
NoiseEstimate estimate_noise_variance(
    const FtsDataset& data, const std::vector<std::vector<double>>& mean_at_obs,
    const KernelSpec& spec, const TimeGrid& grid);

}  // namespace pada
