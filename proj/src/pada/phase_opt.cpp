#include "pada/phase_opt.hpp"

#include <cmath>

#include "pada/kernels.hpp"
#include "pada/rng.hpp"

namespace pada {

void PsiKernel::validate() const {
  require(m.rows() == freqs.size() && m.cols() == freqs.size(),
          ErrorCode::dimension_mismatch,
          "PsiKernel: matrix does not match frequency grid");
  require(hermitian_defect(m) <= 1e-10, ErrorCode::numeric,
          "PsiKernel: matrix is not Hermitian");
  for (int i = 0; i < m.rows(); ++i)
    require(std::abs(m(i, i) - cplx(1.0, 0.0)) <= 1e-8, ErrorCode::numeric,
            "PsiKernel: diagonal is not unit");
}

PsiKernel build_psi_kernel(const EigenSystem& es, int k) {
  es.validate();
  require(k >= 0 && k < es.components, ErrorCode::invalid_argument,
          "build_psi_kernel: component index out of range");
  const int G = es.grid.size();
  const int F = es.freqs.size();

  // scale rows by sqrt of trapezoid weights so B^H B is the Gram matrix
  VectorXd d(G);
  for (int i = 0; i < G; ++i) d[i] = std::sqrt(es.grid.weights()[size_t(i)]);
  MatrixXcd b(G, F);
  for (int i = 0; i < F; ++i)
    b.col(i) = d.asDiagonal() * es.functions[size_t(i)].col(k);

  PsiKernel out(es.freqs);
  out.m = b.adjoint() * b;
  hermitian_symmetrize(out.m);
  return out;
}

bool phase_feasible(const VectorXcd& nu, const FrequencyGrid& freqs,
                    double tol) {
  if (nu.size() != freqs.size()) return false;
  for (int i = 0; i < nu.size(); ++i)
    if (std::abs(std::abs(nu[i]) - 1.0) > tol) return false;
  for (int i = 0; i < nu.size(); ++i)
    if (std::abs(nu[i] - std::conj(nu[freqs.reflect(i)])) > tol) return false;
  return true;
}

namespace {

cplx unit_or_one(cplx z) {
  double r = std::abs(z);
  return r > 0.0 ? z / r : cplx(1.0, 0.0);
}

}  // namespace

VectorXcd project_phase(VectorXcd nu, const FrequencyGrid& freqs) {
  require(nu.size() == freqs.size(), ErrorCode::dimension_mismatch,
          "project_phase: vector does not match frequency grid");
  for (int i = 0; i < nu.size(); ++i) nu[i] = unit_or_one(nu[i]);
  const int z = freqs.zero_index();
  nu[z] = std::real(nu[z]) < 0.0 ? -1.0 : 1.0;
  for (int dpos = 1; dpos <= freqs.half_size(); ++dpos) {
    cplx avg = 0.5 * (nu[z + dpos] + std::conj(nu[z - dpos]));
    nu[z + dpos] = unit_or_one(avg);
    nu[z - dpos] = std::conj(nu[z + dpos]);
  }
  return nu;
}

double phase_objective(const PsiKernel& psi, const VectorXcd& nu) {
  require(nu.size() == psi.freqs.size(), ErrorCode::dimension_mismatch,
          "phase_objective: vector does not match frequency grid");
  VectorXcd w(nu.size());
  for (int i = 0; i < nu.size(); ++i)
    w[i] = psi.freqs.weights()[size_t(i)] * nu[i];
  return std::real(w.dot(psi.m * w)) / (4.0 * kPi * kPi);
}

namespace {

struct AscentOutcome {
  VectorXcd nu;
  double objective = 0.0;
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

AscentOutcome ascend(const MatrixXcd& q, const FrequencyGrid& freqs,
                     VectorXcd nu, int max_iter, double tol) {
  AscentOutcome out;
  auto value = [&](const VectorXcd& v) { return std::real(v.dot(q * v)); };
  double f = value(nu);
  out.trace.push_back(f);
  double alpha = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    VectorXcd g = 2.0 * (q * nu);
    double gmax = g.cwiseAbs().maxCoeff();
    if (gmax <= 0.0) {
      out.converged = true;
      break;
    }
    if (alpha <= 0.0) alpha = 1.0 / gmax;
    bool accepted = false;
    double fnew = f;
    VectorXcd cand;
    for (int half = 0; half < 60; ++half) {
      cand = project_phase(nu + alpha * g, freqs);
      fnew = value(cand);
      if (fnew > f) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      out.converged = true;  // no ascent direction survives: stationary
      break;
    }
    nu = cand;
    out.trace.push_back(fnew);
    ++out.iterations;
    double rel = (fnew - f) / std::max(std::abs(fnew), 1e-30);
    f = fnew;
    alpha *= 1.5;
    if (rel < tol) {
      out.converged = true;
      break;
    }
  }
  out.nu = nu;
  out.objective = f;
  return out;
}

}  // namespace

PhaseResult optimize_phase(const PsiKernel& psi, const ModelConfig& cfg) {
  psi.validate();
  const int F = psi.freqs.size();
  const int S = psi.freqs.half_size();
  const double scale = 1.0 / (4.0 * kPi * kPi);

  MatrixXcd q(F, F);
  for (int i = 0; i < F; ++i)
    for (int j = 0; j < F; ++j)
      q(i, j) = scale * psi.freqs.weights()[size_t(i)] * psi.m(i, j) *
                psi.freqs.weights()[size_t(j)];
  hermitian_symmetrize(q);

  PhaseResult best;
  best.objective = -1.0;
  for (int start = 0; start <= cfg.phase_restarts; ++start) {
    VectorXcd nu0(F);
    if (start == 0) {
      nu0.setConstant(cplx(1.0, 0.0));
    } else {
      RngStream rng(cfg.seed, 3000 + uint64_t(start));
      nu0[S] = rng.next_double() < 0.5 ? -1.0 : 1.0;
      for (int dpos = 1; dpos <= S; ++dpos) {
        double theta = kTwoPi * rng.next_double();
        nu0[S + dpos] = cplx(std::cos(theta), std::sin(theta));
        nu0[S - dpos] = std::conj(nu0[S + dpos]);
      }
    }
    AscentOutcome run =
        ascend(q, psi.freqs, nu0, cfg.phase_max_iter, cfg.phase_tol);
    if (run.objective > best.objective) {
      best.nu = run.nu;
      best.objective = run.objective;
      best.trace = std::move(run.trace);
      best.iterations = run.iterations;
      best.converged = run.converged;
    }
  }
  return best;
}

}  // namespace pada
