#include <doctest.h>

#include <cmath>
#include <functional>

#include "pada/eigensystem.hpp"
#include "pada/filters_build.hpp"
#include "pada/kernels.hpp"
#include "pada/phase_opt.hpp"
#include "pada/rng.hpp"

using namespace pada;

namespace {

// Single-component moving-average generator eps_j = sum_{|l|<=1} w_l e_l
// xi_{j+l} with AR(1) scores: rank-1 per frequency, eigenvector
// A(t|w) = sum_l w_l e_l(t) e^{-ilw}, eigenvalue = AR(1) spectral density.
// Its optimal filter bank is {w_l e_l} at lag l with sup norm w_0.
double ma_weight(int l) {
  double total = 1.0 + 2.0 * std::exp(-0.5);
  return std::sqrt(std::exp(-0.5 * std::abs(l)) / total);
}

double ar1_spectrum(double omega) {
  const double rho = 0.2;
  return 1.0 / (kTwoPi * (1.0 - 2.0 * rho * std::cos(omega) + rho * rho));
}

VectorXcd ma_eigenfunction(const TimeGrid& grid, double omega) {
  VectorXcd a = VectorXcd::Zero(grid.size());
  for (int l = -1; l <= 1; ++l) {
    cplx rot(std::cos(l * omega), -std::sin(l * omega));
    a += ma_weight(l) * rot *
         fourier_basis(grid, l + 1).cast<cplx>().eval();
  }
  return a;
}

SpectralDensity ma_spectral_density(int grid_size, int freq_half) {
  SpectralDensity sd(TimeGrid::uniform(grid_size), FrequencyGrid(freq_half));
  for (int i = 0; i < sd.freqs.size(); ++i) {
    VectorXcd a = ma_eigenfunction(sd.grid, sd.freqs.point(i));
    sd.slice(i) = ar1_spectrum(sd.freqs.point(i)) * (a * a.adjoint());
  }
  return sd;
}

// hand-built eigensystem with one component psi(.|w) = gauge(w) * shape
EigenSystem separable_system(const TimeGrid& grid, const FrequencyGrid& freqs,
                             const VectorXd& shape,
                             const std::function<cplx(double)>& gauge) {
  EigenSystem es(grid, freqs);
  es.components = 1;
  es.values.assign(size_t(freqs.size()), VectorXd::Ones(1));
  es.functions.assign(size_t(freqs.size()),
                      MatrixXcd::Zero(grid.size(), 1));
  for (int i = freqs.zero_index(); i < freqs.size(); ++i) {
    es.functions[size_t(i)].col(0) = gauge(freqs.point(i)) * shape.cast<cplx>();
    es.functions[size_t(freqs.reflect(i))] =
        es.functions[size_t(i)].conjugate();
  }
  return es;
}

VectorXcd random_feasible_gauge(const FrequencyGrid& freqs, uint64_t stream) {
  RngStream rng(7, stream);
  VectorXcd nu(freqs.size());
  for (int i = 0; i < freqs.size(); ++i)
    nu[i] = cplx(rng.next_normal(), rng.next_normal());
  return project_phase(nu, freqs);
}

double sign_matched_gap(const VectorXd& got, const VectorXd& want) {
  double plus = (got - want).cwiseAbs().maxCoeff();
  double minus = (got + want).cwiseAbs().maxCoeff();
  return std::min(plus, minus);
}

}  // namespace

TEST_CASE("eigendecompose recovers a rank-1 kernel") {
  TimeGrid grid = TimeGrid::uniform(21);
  FrequencyGrid freqs(8);
  VectorXd shape(grid.size());
  for (int i = 0; i < grid.size(); ++i)
    shape[i] = 2.0 + std::cos(kTwoPi * grid.point(i));
  shape /= l2_norm(shape, grid);

  SpectralDensity sd(grid, freqs);
  for (int i = 0; i < freqs.size(); ++i)
    sd.slice(i) = (shape * shape.transpose()).cast<cplx>();

  EigenSystem es = eigendecompose(sd, 2);
  for (int i = 0; i < freqs.size(); ++i) {
    CHECK(es.value(0, i) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(es.value(1, i)) < 1e-10);
    VectorXd psi = es.function(0, i).real();
    CHECK(es.function(0, i).imag().cwiseAbs().maxCoeff() < 1e-8);
    CHECK(sign_matched_gap(psi, shape) < 1e-8);
  }
}

TEST_CASE("eigendecompose handles zero and two-point Hermitian kernels") {
  TimeGrid grid({0.0, 1.0});
  FrequencyGrid freqs(2);

  SpectralDensity zero(grid, freqs);
  EigenSystem ez = eigendecompose(zero, 2);
  for (int i = 0; i < freqs.size(); ++i) {
    CHECK(ez.value(0, i) == 0.0);
    CHECK(ez.value(1, i) == 0.0);
  }

  SpectralDensity sd(grid, freqs);
  for (int i = 0; i < freqs.size(); ++i) {
    sd.slice(i)(0, 0) = 2.0;
    sd.slice(i)(0, 1) = cplx(0.0, 1.0);
    sd.slice(i)(1, 0) = cplx(0.0, -1.0);
    sd.slice(i)(1, 1) = 2.0;
  }
  // operator eigenvalues: matrix eigenvalues {3, 1} times the grid weight 1/2
  EigenSystem es = eigendecompose(sd, 2);
  for (int i = 0; i < freqs.size(); ++i) {
    CHECK(es.value(0, i) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(es.value(1, i) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(l2_norm(es.function(0, i), grid) - 1.0) < 1e-12);
    CHECK(std::abs(l2_norm(es.function(1, i), grid) - 1.0) < 1e-12);
  }

  // equal eigenvalues are flagged, one count per nonnegative frequency
  SpectralDensity flat(grid, freqs);
  for (int i = 0; i < freqs.size(); ++i)
    flat.slice(i) = MatrixXcd::Identity(2, 2);
  EigenSystem ef = eigendecompose(flat, 2);
  CHECK(ef.diag.small_gap_frequencies == freqs.half_size() + 1);
}

TEST_CASE("eigendecompose output is sorted, normalized and conjugate symmetric") {
  SpectralDensity sd = ma_spectral_density(31, 16);
  EigenSystem es = eigendecompose(sd, 3);
  es.validate();
  for (int i = 0; i < sd.freqs.size(); ++i) {
    CHECK(es.value(0, i) >= es.value(1, i));
    CHECK(es.value(1, i) >= es.value(2, i));
    CHECK(es.value(2, i) >= 0.0);
    CHECK(es.value(0, i) ==
          doctest::Approx(ar1_spectrum(sd.freqs.point(i))).epsilon(1e-8));
    CHECK(es.value(1, i) < 1e-10);
    for (int k = 0; k < 3; ++k)
      CHECK(std::abs(l2_norm(es.function(k, i), sd.grid) - 1.0) < 1e-8);
    int r = sd.freqs.reflect(i);
    CHECK((es.functions[size_t(r)] - es.functions[size_t(i)].conjugate())
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
}

TEST_CASE("align_phases is idempotent and absorbs smooth gauge changes") {
  EigenSystem es = align_phases(eigendecompose(ma_spectral_density(31, 16), 1));
  EigenSystem twice = align_phases(es);
  for (int i = 0; i < es.freqs.size(); ++i)
    CHECK((twice.functions[size_t(i)] - es.functions[size_t(i)])
              .cwiseAbs()
              .maxCoeff() < 1e-12);

  EigenSystem messed = es;
  const int z = es.freqs.zero_index();
  messed.functions[size_t(z)] *= -1.0;
  for (int i = z + 1; i < es.freqs.size(); ++i) {
    double w = es.freqs.point(i);
    double theta = 0.4 * w - 0.3 * w * w;
    messed.functions[size_t(i)] *= cplx(std::cos(theta), std::sin(theta));
    messed.functions[size_t(es.freqs.reflect(i))] =
        messed.functions[size_t(i)].conjugate();
  }
  EigenSystem fixed = align_phases(messed);
  for (int i = z + 1; i < es.freqs.size(); ++i) {
    cplx inner = l2_inner(fixed.function(0, i - 1), fixed.function(0, i),
                          es.grid);
    CHECK(std::abs(inner.imag()) < 1e-10);
    CHECK(inner.real() > 0.0);
  }
  // alignment is a canonical form: the perturbation is fully removed
  for (int i = 0; i < es.freqs.size(); ++i)
    CHECK((fixed.functions[size_t(i)] - es.functions[size_t(i)])
              .cwiseAbs()
              .maxCoeff() < 1e-10);
}

TEST_CASE("align_phases makes a separable system frequency constant") {
  TimeGrid grid = TimeGrid::uniform(21);
  FrequencyGrid freqs(16);
  VectorXd shape = fourier_basis(grid, 1);
  EigenSystem es = separable_system(grid, freqs, shape, [](double w) {
    return cplx(std::cos(w), std::sin(w));
  });
  EigenSystem aligned = align_phases(es);
  const VectorXcd ref = aligned.function(0, freqs.zero_index());
  for (int i = 0; i < freqs.size(); ++i)
    CHECK((aligned.function(0, i) - ref).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(aligned.diag.alignment_flags == 0);
}

TEST_CASE("build_psi_kernel matches closed forms") {
  TimeGrid grid = TimeGrid::uniform(21);
  FrequencyGrid freqs(8);
  VectorXd shape = fourier_basis(grid, 1);

  EigenSystem constant =
      separable_system(grid, freqs, shape, [](double) { return cplx(1.0); });
  PsiKernel pk = build_psi_kernel(constant, 0);
  pk.validate();
  CHECK((pk.m - MatrixXcd::Ones(freqs.size(), freqs.size()))
            .cwiseAbs()
            .maxCoeff() < 1e-10);

  EigenSystem separable = separable_system(grid, freqs, shape, [](double w) {
    return cplx(std::cos(w), std::sin(w));
  });
  PsiKernel pg = build_psi_kernel(separable, 0);
  for (int i = 0; i < freqs.size(); ++i)
    for (int j = 0; j < freqs.size(); ++j) {
      cplx gi(std::cos(freqs.point(i)), std::sin(freqs.point(i)));
      cplx gj(std::cos(freqs.point(j)), std::sin(freqs.point(j)));
      CHECK(std::abs(pg.m(i, j) - std::conj(gi) * gj) < 1e-12);
    }

  // orthogonal eigenfunctions at two frequencies give a zero entry
  EigenSystem mixed = constant;
  VectorXd other = fourier_basis(grid, 2);
  int hi = freqs.zero_index() + 3;
  mixed.functions[size_t(hi)].col(0) = other.cast<cplx>();
  mixed.functions[size_t(freqs.reflect(hi))].col(0) = other.cast<cplx>();
  PsiKernel pm = build_psi_kernel(mixed, 0);
  CHECK(std::abs(pm.m(freqs.zero_index(), hi)) < 1e-12);
}

TEST_CASE("optimize_phase solves the all-ones kernel exactly") {
  FrequencyGrid freqs(16);
  PsiKernel pk(freqs);
  pk.m = MatrixXcd::Ones(freqs.size(), freqs.size());
  ModelConfig cfg;
  PhaseResult res = optimize_phase(pk, cfg);
  CHECK(res.objective == doctest::Approx(1.0).epsilon(1e-6));
  double gap_plus = 0.0, gap_minus = 0.0;
  for (int i = 0; i < freqs.size(); ++i) {
    gap_plus = std::max(gap_plus, std::abs(res.nu[i] - cplx(1.0)));
    gap_minus = std::max(gap_minus, std::abs(res.nu[i] + cplx(1.0)));
  }
  CHECK(std::min(gap_plus, gap_minus) < 1e-8);
  CHECK(phase_feasible(res.nu, freqs, 1e-12));
  for (size_t i = 1; i < res.trace.size(); ++i)
    CHECK(res.trace[i] >= res.trace[i - 1]);
}

TEST_CASE("optimize_phase recovers the gauge of a rank-1 kernel") {
  FrequencyGrid freqs(16);
  PsiKernel pk(freqs);
  for (int i = 0; i < freqs.size(); ++i)
    for (int j = 0; j < freqs.size(); ++j) {
      cplx gi(std::cos(freqs.point(i)), std::sin(freqs.point(i)));
      cplx gj(std::cos(freqs.point(j)), std::sin(freqs.point(j)));
      pk.m(i, j) = std::conj(gi) * gj;
    }
  ModelConfig cfg;
  PhaseResult res = optimize_phase(pk, cfg);
  CHECK(res.objective == doctest::Approx(1.0).epsilon(1e-6));
  double gap_plus = 0.0, gap_minus = 0.0;
  for (int i = 0; i < freqs.size(); ++i) {
    cplx want(std::cos(freqs.point(i)), -std::sin(freqs.point(i)));
    gap_plus = std::max(gap_plus, std::abs(res.nu[i] - want));
    gap_minus = std::max(gap_minus, std::abs(res.nu[i] + want));
  }
  CHECK(std::min(gap_plus, gap_minus) < 1e-4);
}

TEST_CASE("optimize_phase on the identity kernel sees a constant objective") {
  FrequencyGrid freqs(64);
  PsiKernel pk(freqs);
  pk.m = MatrixXcd::Identity(freqs.size(), freqs.size());
  ModelConfig cfg;
  PhaseResult res = optimize_phase(pk, cfg);
  CHECK(phase_feasible(res.nu, freqs, 1e-12));
  for (int r = 0; r < 20; ++r) {
    VectorXcd nu = random_feasible_gauge(freqs, 100 + uint64_t(r));
    CHECK(std::abs(phase_objective(pk, nu) - res.objective) < 1e-12);
  }
  double cell = freqs.spacing() / kTwoPi;
  // endpoint half-weights make the sum of squared weights (2s - 1/2) cells
  double exact = cell * cell * (2.0 * freqs.half_size() - 0.5);
  CHECK(res.objective == doctest::Approx(exact).epsilon(1e-12));
  double plain = cell * cell * freqs.size();
  CHECK(std::abs(res.objective - plain) / plain < 0.02);
}

TEST_CASE("optimize_phase dominates the trivial and random gauges") {
  SpectralDensity sd = ma_spectral_density(31, 24);
  EigenSystem es = align_phases(eigendecompose(sd, 1));
  PsiKernel pk = build_psi_kernel(es, 0);
  ModelConfig cfg;
  PhaseResult res = optimize_phase(pk, cfg);
  CHECK(phase_feasible(res.nu, pk.freqs, 1e-12));
  for (size_t i = 1; i < res.trace.size(); ++i)
    CHECK(res.trace[i] >= res.trace[i - 1]);

  VectorXcd ones = VectorXcd::Constant(pk.freqs.size(), cplx(1.0));
  CHECK(res.objective >= phase_objective(pk, ones) - 1e-12);
  for (int r = 0; r < 20; ++r) {
    VectorXcd nu = random_feasible_gauge(pk.freqs, 200 + uint64_t(r));
    CHECK(res.objective >= phase_objective(pk, nu) - 1e-12);
  }
}

TEST_CASE("build_filters collapses a separable system to lag zero") {
  TimeGrid grid = TimeGrid::uniform(21);
  FrequencyGrid freqs(16);
  EigenSystem es(grid, freqs);
  es.components = 2;
  es.values.assign(size_t(freqs.size()), VectorXd::Ones(2));
  es.functions.assign(size_t(freqs.size()), MatrixXcd::Zero(grid.size(), 2));
  for (int i = 0; i < freqs.size(); ++i) {
    es.functions[size_t(i)].col(0) = fourier_basis(grid, 1).cast<cplx>();
    es.functions[size_t(i)].col(1) = fourier_basis(grid, 2).cast<cplx>();
  }
  ModelConfig cfg;
  std::vector<VectorXcd> phases(
      2, VectorXcd::Constant(freqs.size(), cplx(1.0)));
  FilterBank bank = build_filters(es, phases, cfg);
  REQUIRE(bank.component_count() == 2);
  for (int k = 0; k < 2; ++k) {
    const FilterComponent& c = bank.comps[size_t(k)];
    CHECK(c.lag_min == 0);
    CHECK(c.lag_count() == 1);
    CHECK(c.sup_norm == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sign_matched_gap(VectorXd(c.filter_at(0)),
                           fourier_basis(grid, k + 1)) < 1e-4);
    CHECK(c.energy(grid) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("full chain recovers the moving-average filter bank") {
  SpectralDensity sd = ma_spectral_density(51, 64);
  EigenSystem es = align_phases(eigendecompose(sd, 1));
  PsiKernel pk = build_psi_kernel(es, 0);
  ModelConfig cfg;
  PhaseResult res = optimize_phase(pk, cfg);

  const double w0 = ma_weight(0);
  CHECK(std::abs(res.objective - w0 * w0) < 0.05);

  FilterBank bank = build_filters(es, {res.nu}, cfg);
  REQUIRE(bank.component_count() == 1);
  const FilterComponent& c = bank.comps[0];
  CHECK(c.lag_min == -1);
  CHECK(c.lag_count() == 3);
  CHECK(std::abs(c.sup_norm - w0) < 0.05);
  CHECK(c.sup_norm >= 0.0);
  CHECK(c.sup_norm <= 1.0 + 1e-6);
  CHECK(c.energy(sd.grid) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(c.max_filter_norm(sd.grid) == doctest::Approx(c.sup_norm));

  // bank matches {w_l e_l} at lag l up to one global sign
  double best = 1e300;
  for (double sign : {1.0, -1.0}) {
    double gap = 0.0;
    for (int m = -1; m <= 1; ++m) {
      VectorXd want = sign * ma_weight(m) * fourier_basis(sd.grid, m + 1);
      gap = std::max(gap,
                     (VectorXd(c.filter_at(m)) - want).cwiseAbs().maxCoeff());
    }
    best = std::min(best, gap);
  }
  CHECK(best < 0.05);

  // spectrum travels with the component
  for (int i = 0; i < sd.freqs.size(); ++i)
    CHECK(c.spectrum[i] ==
          doctest::Approx(ar1_spectrum(sd.freqs.point(i))).epsilon(1e-6));
}

TEST_CASE("build_filters threshold and failure paths") {
  SpectralDensity sd = ma_spectral_density(31, 24);
  EigenSystem es = align_phases(eigendecompose(sd, 1));
  PsiKernel pk = build_psi_kernel(es, 0);
  ModelConfig cfg;
  PhaseResult res = optimize_phase(pk, cfg);

  ModelConfig loose = cfg;
  loose.epsilon_l = 0.999;
  FilterBank lazy = build_filters(es, {res.nu}, loose);
  CHECK(lazy.comps[0].lag_count() == 1);
  CHECK(lazy.comps[0].lag_min == 0);
  CHECK(lazy.comps[0].energy(sd.grid) == doctest::Approx(1.0).epsilon(1e-12));

  // a rough gauge spreads energy across the whole period: hard cap trips
  TimeGrid grid = TimeGrid::uniform(21);
  FrequencyGrid freqs(32);
  EigenSystem flat = separable_system(grid, freqs, fourier_basis(grid, 1),
                                      [](double) { return cplx(1.0); });
  VectorXcd rough = random_feasible_gauge(freqs, 9);
  CHECK_THROWS_AS(build_filters(flat, {rough}, cfg), Error);

  // a gauge violating conjugate symmetry produces complex filters
  VectorXcd bad = VectorXcd::Constant(freqs.size(), cplx(0.0, 1.0));
  CHECK_THROWS_AS(build_filters(flat, {bad}, cfg), Error);
}
