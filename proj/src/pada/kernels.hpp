#pragma once

#include <vector>

#include "pada/grid.hpp"

namespace pada {

// In-place projection onto Hermitian matrices: K <- (K + K^H)/2.
void hermitian_symmetrize(MatrixXcd& k);

// Largest |K(t,s) - conj(K(s,t))| entry.
double hermitian_defect(const MatrixXcd& k);

// Clip negative eigenvalues of a Hermitian matrix to zero (PSD projection).
void psd_clip(MatrixXcd& k);

// Spectral density kernel sampled on grid x grid for every frequency of a
// symmetric FrequencyGrid. slice(i) is f(.,.|omega_i), i = 0..2s.
struct SpectralDensity {
  TimeGrid grid;
  FrequencyGrid freqs;
  std::vector<MatrixXcd> slices;

  SpectralDensity(TimeGrid g, FrequencyGrid f)
      : grid(std::move(g)), freqs(std::move(f)) {
    slices.assign(size_t(freqs.size()),
                  MatrixXcd::Zero(grid.size(), grid.size()));
  }

  const MatrixXcd& slice(int i) const { return slices[size_t(i)]; }
  MatrixXcd& slice(int i) { return slices[size_t(i)]; }

  // max over omega of the conjugate-symmetry defect f(t,s|-w) vs
  // conj(f(t,s|w))
  double conjugate_symmetry_defect() const;
  void validate() const;
};

}  // namespace pada
