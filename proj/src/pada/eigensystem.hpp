#pragma once

#include <vector>

#include "pada/kernels.hpp"

namespace pada {

// Per-frequency eigenpairs of the spectral density. Eigenvalues are operator
// eigenvalues (grid-weight scaling already applied); eigenfunctions have unit
// trapezoid L2 norm. Negative frequencies mirror the positive side by
// conjugation.
struct EigenSystem {
  TimeGrid grid;
  FrequencyGrid freqs;
  int components = 0;
  std::vector<VectorXd> values;      // per frequency index, size K, descending
  std::vector<MatrixXcd> functions;  // per frequency index, grid_size x K

  struct Diagnostics {
    int small_gap_frequencies = 0;  // eigenvalue gap under 1e-10 somewhere
    int alignment_flags = 0;        // continuity sweep hit a near-zero inner product
  } diag;

  EigenSystem(TimeGrid g, FrequencyGrid f) : grid(std::move(g)), freqs(std::move(f)) {}

  double value(int k, int freq_idx) const { return values[size_t(freq_idx)][k]; }
  VectorXcd function(int k, int freq_idx) const {
    return functions[size_t(freq_idx)].col(k);
  }
  // eta_k across the frequency grid
  VectorXd spectrum(int k) const;
  void validate() const;
};

EigenSystem eigendecompose(const SpectralDensity& sd, int K);

// Continuity phase alignment: anchor at omega = 0 (largest-magnitude entry
// made real positive), then sweep upward making consecutive inner products
// real positive. The filter-phase optimization later absorbs any leftover
// smooth drift, so filters do not depend on this gauge.
EigenSystem align_phases(const EigenSystem& es);

// trapezoid integral of eta_k over [-pi, pi], per component
VectorXd fve_integrals(const EigenSystem& es);

}  // namespace pada
