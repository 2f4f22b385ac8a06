#include "pada/eigensystem.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace pada {

VectorXd EigenSystem::spectrum(int k) const {
  require(k >= 0 && k < components, ErrorCode::invalid_argument,
          "EigenSystem: component index out of range");
  VectorXd out(freqs.size());
  for (int i = 0; i < freqs.size(); ++i) out[i] = values[size_t(i)][k];
  return out;
}

void EigenSystem::validate() const {
  require(int(values.size()) == freqs.size() &&
              int(functions.size()) == freqs.size(),
          ErrorCode::dimension_mismatch,
          "EigenSystem: per-frequency storage does not match grid");
  for (int i = 0; i < freqs.size(); ++i) {
    require(values[size_t(i)].size() == components, ErrorCode::dimension_mismatch,
            "EigenSystem: eigenvalue count mismatch");
    require(functions[size_t(i)].rows() == grid.size() &&
                functions[size_t(i)].cols() == components,
            ErrorCode::dimension_mismatch,
            "EigenSystem: eigenfunction shape mismatch");
  }
}

EigenSystem eigendecompose(const SpectralDensity& sd, int K) {
  sd.validate();
  const int G = sd.grid.size();
  require(K >= 1 && K <= G, ErrorCode::invalid_argument,
          "eigendecompose: need 1 <= K <= grid size");
  const int S = sd.freqs.half_size();

  EigenSystem es(sd.grid, sd.freqs);
  es.components = K;
  es.values.assign(size_t(sd.freqs.size()), VectorXd::Zero(K));
  es.functions.assign(size_t(sd.freqs.size()), MatrixXcd::Zero(G, K));

  // weighted eigenproblem: D f D with D = sqrt of trapezoid weights turns
  // matrix eigenvalues into operator eigenvalues and D^-1 v into functions
  // with exact unit trapezoid norm
  VectorXd d(G), dinv(G);
  for (int i = 0; i < G; ++i) {
    d[i] = std::sqrt(sd.grid.weights()[size_t(i)]);
    dinv[i] = 1.0 / d[i];
  }

  int gap_count = K < G ? K : K - 1;
  for (int i = S; i < sd.freqs.size(); ++i) {
    MatrixXcd m = d.asDiagonal() * sd.slice(i) * d.asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(m);
    require(solver.info() == Eigen::Success, ErrorCode::numeric,
            "eigendecompose: eigensolver failed");
    // ascending order from Eigen; take the top K descending
    bool small_gap = false;
    for (int k = 0; k < K; ++k) {
      double ev = solver.eigenvalues()[G - 1 - k];
      es.values[size_t(i)][k] = ev > 0.0 ? ev : 0.0;
      es.functions[size_t(i)].col(k) =
          dinv.asDiagonal() * solver.eigenvectors().col(G - 1 - k);
      if (k < gap_count) {
        double next = solver.eigenvalues()[G - 2 - k];
        if (std::abs(ev - next) < 1e-10) small_gap = true;
      }
    }
    if (small_gap) ++es.diag.small_gap_frequencies;
    if (i > S) {
      int r = sd.freqs.reflect(i);
      es.values[size_t(r)] = es.values[size_t(i)];
      es.functions[size_t(r)] = es.functions[size_t(i)].conjugate();
    }
  }
  return es;
}

EigenSystem align_phases(const EigenSystem& es) {
  es.validate();
  EigenSystem out = es;
  const int S = es.freqs.half_size();

  for (int k = 0; k < es.components; ++k) {
    // anchor: largest-magnitude entry of psi_k(.|0) real positive
    {
      VectorXcd v = out.functions[size_t(S)].col(k);
      int arg = 0;
      double best = 0.0;
      for (int i = 0; i < v.size(); ++i)
        if (std::abs(v[i]) > best) {
          best = std::abs(v[i]);
          arg = i;
        }
      if (best > 0.0) {
        cplx rot = std::conj(v[arg]) / best;
        out.functions[size_t(S)].col(k) = v * rot;
      }
    }
    cplx carry = 1.0;
    VectorXcd prev = out.functions[size_t(S)].col(k);
    for (int i = S + 1; i < es.freqs.size(); ++i) {
      VectorXcd cur = out.functions[size_t(i)].col(k);
      cplx inner = l2_inner(prev, cur, es.grid);
      cplx rot;
      if (std::abs(inner) < 1e-8) {
        rot = carry;  // keep the previous rotation through the degenerate gap
        ++out.diag.alignment_flags;
      } else {
        rot = std::conj(inner) / std::abs(inner);
      }
      out.functions[size_t(i)].col(k) = cur * rot;
      carry = rot;
      prev = out.functions[size_t(i)].col(k);
    }
  }
  // negative side mirrors the aligned positive side
  for (int i = S + 1; i < es.freqs.size(); ++i) {
    int r = es.freqs.reflect(i);
    out.functions[size_t(r)] = out.functions[size_t(i)].conjugate();
    out.values[size_t(r)] = out.values[size_t(i)];
  }
  return out;
}

VectorXd fve_integrals(const EigenSystem& es) {
  VectorXd out = VectorXd::Zero(es.components);
  for (int k = 0; k < es.components; ++k)
    for (int i = 0; i < es.freqs.size(); ++i)
      out[k] += es.freqs.weights()[size_t(i)] * std::max(0.0, es.value(k, i));
  return out;
}

}  // namespace pada
