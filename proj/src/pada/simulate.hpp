#pragma once

#include "pada/dataset.hpp"
#include "pada/filter_bank.hpp"
#include "pada/kernels.hpp"

namespace pada {

enum class SimCase { case1, case2 };

// Synthetic stationary FTS: a dynamic KL expansion with exponentially
// decaying lag weights, a distinct orthonormal Fourier basis function per
// (component, lag) pair, and AR(1) scores. case1 is non-separable (K=1,
// L=1); case2 is serially weakly separable (K=3, L=0).
struct SimSpec {
  SimCase scase = SimCase::case1;
  int curve_count = 300;  // training span J
  int future_count = 0;   // extra curves appended for forecast scoring
  int n_min = 3;          // observations per curve, uniform on [n_min, n_max]
  int n_max = 5;
  int grid_size = 51;
  int freq_half = 64;
  double rho = 0.2;
  uint64_t seed = 1;

  int component_count() const { return scase == SimCase::case1 ? 1 : 3; }
  int lag_one_sided() const { return scase == SimCase::case1 ? 1 : 0; }
  void validate() const;
};

struct SimTruth {
  TimeGrid grid;
  FilterBank bank;               // true filters w_l phi_kl, true spectra
  ScoreSet scores;               // true scores covering all generated curves
  std::vector<VectorXd> curves;  // epsilon_j on the grid
  FtsDataset data;               // sparse noisy observations of every curve
  double signal_power = 0.0;     // E||epsilon_1||^2, analytic
  double noise_variance = 0.0;   // signal_power / 10
};

// w_l = sqrt(exp(-|l|/2) / sum), indexed l = -L..L; sum of squares is 1
VectorXd sim_lag_weights(int lag_one_sided);

// score marginal variance of component k (1-based): (1/k) / (1 - rho^2)
double sim_score_variance(const SimSpec& spec, int k);

SimTruth generate(const SimSpec& spec);

// Exact spectral density of the generator: sum_k g_k(w) a_k a_k^H with
// a_k(t|w) = sum_l w_l phi_kl(t) e^{-ilw} and g_k the AR(1) score density.
// Oracle input for estimation-error-free tests of the filter chain.
SpectralDensity population_spectral_density(const SimSpec& spec,
                                            const TimeGrid& grid,
                                            const FrequencyGrid& freqs);

}  // namespace pada
