#pragma once

#include <vector>

#include "pada/filter_bank.hpp"
#include "pada/grid.hpp"

namespace pada {

// Score spectral densities evaluated on the Whittle frequency set
// {2 pi j / J; j = 1..J}, floored away from zero so the prior precision
// stays finite.
struct WhittleSpectrum {
  int curve_count = 0;
  std::vector<VectorXd> eta;

  int component_count() const { return int(eta.size()); }
  double omega(int j) const { return kTwoPi * (j + 1) / curve_count; }
  void validate() const;
};

// Periodic extension of the estimated eigenvalue functions from the
// symmetric frequency grid onto the Whittle set, with linear interpolation
// and the relative floor applied per component.
WhittleSpectrum build_whittle_spectrum(const std::vector<VectorXd>& eta,
                                       const FrequencyGrid& freqs, int J);
WhittleSpectrum build_whittle_spectrum(const FilterBank& bank, int J);

// log prior of one score series by direct DFT summation:
// -1/2 sum_j [ |xi_dft(w_j)|^2 / eta_k(w_j) + log eta_k(w_j) ]
double whittle_log_prior(const VectorXd& xi, const WhittleSpectrum& spec,
                         int k);

// The prior quadratic form is xi^T A xi with A symmetric Toeplitz;
// first_col[d] = sum_j cos(d w_j) / (2 pi n eta_k(w_j)), n = score length.
VectorXd whittle_precision_first_col(const WhittleSpectrum& spec, int k,
                                     int n);
MatrixXd whittle_precision_dense(const WhittleSpectrum& spec, int k, int n);
VectorXd toeplitz_apply(const VectorXd& first_col, const VectorXd& x);

}  // namespace pada
