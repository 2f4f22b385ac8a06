#pragma once

#include <vector>

#include "pada/config.hpp"
#include "pada/eigensystem.hpp"

namespace pada {

// Cross-frequency Gram kernel of one component's aligned eigenfunctions:
// m(i1, i2) = <psi_k(.|w_i1), psi_k(.|w_i2)>. Hermitian with unit diagonal.
struct PsiKernel {
  FrequencyGrid freqs;
  MatrixXcd m;

  explicit PsiKernel(FrequencyGrid f)
      : freqs(std::move(f)), m(MatrixXcd::Zero(freqs.size(), freqs.size())) {}
  void validate() const;
};

PsiKernel build_psi_kernel(const EigenSystem& es, int k);

// Feasible gauge vectors: unit modulus entries with nu(-w) = conj(nu(w)).
bool phase_feasible(const VectorXcd& nu, const FrequencyGrid& freqs,
                    double tol = 1e-10);

// Nearest feasible point: normalize moduli, then pair-average across +-w and
// renormalize. Zero-modulus entries tie-break to 1. Exact feasibility out.
VectorXcd project_phase(VectorXcd nu, const FrequencyGrid& freqs);

// Squared sup-norm of the lag-0 filter candidate under trapezoid quadrature:
// |(1/2pi) sum_i u_i nu_i psi(.|w_i)|^2 = nu^* U Psi U nu / (4 pi^2).
double phase_objective(const PsiKernel& psi, const VectorXcd& nu);

struct PhaseResult {
  VectorXcd nu;
  double objective = 0.0;
  // accepted objective values of the winning start, nondecreasing
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

// Projected gradient ascent of phase_objective over the feasible set, run
// from the all-ones start plus cfg.phase_restarts random feasible starts
// seeded by cfg.seed; the best final objective wins.
PhaseResult optimize_phase(const PsiKernel& psi, const ModelConfig& cfg);

}  // namespace pada
