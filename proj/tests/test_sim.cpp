#include <cmath>
#include <vector>

#include "doctest.h"
#include "pada/pipeline.hpp"
#include "pada/reconstruct.hpp"
#include "pada/simulate.hpp"

using namespace pada;

namespace {

SimSpec case1_spec(int curves, int future = 0) {
  SimSpec spec;
  spec.scase = SimCase::case1;
  spec.curve_count = curves;
  spec.future_count = future;
  spec.seed = 11;
  return spec;
}

SimSpec case2_spec(int curves, int future = 0) {
  SimSpec spec;
  spec.scase = SimCase::case2;
  spec.curve_count = curves;
  spec.future_count = future;
  spec.n_min = 10;
  spec.n_max = 15;
  spec.seed = 12;
  return spec;
}

// stationary AR(1) variance ladder, rho = 0.2
constexpr double kVar1 = 1.041666666667;
constexpr double kSide1 = 0.523515634018;   // lag +-1 weight, L = 1
constexpr double kCenter1 = 0.672207380112; // lag 0 weight, L = 1

}  // namespace

TEST_CASE("lag weight ladder is symmetric and energy normalized") {
  VectorXd w0 = sim_lag_weights(0);
  REQUIRE(w0.size() == 1);
  CHECK(w0[0] == doctest::Approx(1.0).epsilon(1e-14));

  VectorXd w1 = sim_lag_weights(1);
  REQUIRE(w1.size() == 3);
  CHECK(std::abs(w1[0] - kSide1) < 1e-9);
  CHECK(std::abs(w1[1] - kCenter1) < 1e-9);
  CHECK(std::abs(w1[2] - kSide1) < 1e-9);

  for (int L = 0; L <= 4; ++L) {
    VectorXd w = sim_lag_weights(L);
    REQUIRE(w.size() == 2 * L + 1);
    CHECK(std::abs(w.squaredNorm() - 1.0) < 1e-12);
    for (int l = 1; l <= L; ++l) {
      CHECK(w[L - l] == doctest::Approx(w[L + l]).epsilon(1e-14));
      CHECK(w[L + l] < w[L + l - 1]);
    }
  }
  CHECK_THROWS_AS(sim_lag_weights(-1), Error);
}

TEST_CASE("score variances follow the one over k stationary ladder") {
  SimSpec spec = case2_spec(10);
  for (int k = 1; k <= 3; ++k)
    CHECK(std::abs(sim_score_variance(spec, k) - kVar1 / k) < 1e-9);
  CHECK_THROWS_AS(sim_score_variance(spec, 0), Error);
  CHECK_THROWS_AS(sim_score_variance(spec, 4), Error);

  SimSpec one = case1_spec(10);
  CHECK(one.component_count() == 1);
  CHECK(one.lag_one_sided() == 1);
  CHECK(case2_spec(10).component_count() == 3);
  CHECK(case2_spec(10).lag_one_sided() == 0);
  CHECK_THROWS_AS(sim_score_variance(one, 2), Error);
}

TEST_CASE("generated panel has coherent shapes, ranges, and powers") {
  SimSpec spec = case1_spec(40, 5);
  SimTruth truth = generate(spec);

  CHECK(truth.grid.size() == spec.grid_size);
  CHECK(int(truth.curves.size()) == 45);
  CHECK(truth.data.curve_count() == 45);
  CHECK(truth.scores.curve_count == 45);
  REQUIRE(truth.scores.xi.size() == 1);
  CHECK(truth.scores.xi[0].size() == 45 + 2);
  CHECK(truth.scores.lag_span[0] == 1);

  REQUIRE(truth.bank.component_count() == 1);
  const FilterComponent& comp = truth.bank.comps[0];
  CHECK(comp.lag_min == -1);
  CHECK(comp.filters.rows() == 51);
  CHECK(comp.filters.cols() == 3);
  VectorXd w = sim_lag_weights(1);
  for (int c = 0; c < 3; ++c) {
    VectorXd f = comp.filters.col(c);
    CHECK(std::abs(std::sqrt(l2_inner(f, f, truth.grid)) - w[c]) < 1e-9);
  }
  CHECK(comp.sup_norm == doctest::Approx(kCenter1).epsilon(1e-9));
  CHECK(comp.spectrum.minCoeff() > 0.0);

  CHECK(std::abs(truth.signal_power - kVar1) < 1e-9);
  CHECK(std::abs(truth.noise_variance - kVar1 / 10.0) < 1e-9);

  const double step = 1.0 / 50.0;
  for (const SampledCurve& c : truth.data.curves) {
    CHECK(int(c.times.size()) >= spec.n_min);
    CHECK(int(c.times.size()) <= spec.n_max);
    for (size_t z = 0; z < c.times.size(); ++z) {
      double cells = c.times[z] / step;
      CHECK(std::abs(cells - std::round(cells)) < 1e-9);
      if (z > 0) CHECK(c.times[z] > c.times[z - 1]);
    }
  }

  SimTruth t2 = generate(case2_spec(25));
  REQUIRE(t2.bank.component_count() == 3);
  for (const FilterComponent& c : t2.bank.comps) {
    CHECK(c.filters.cols() == 1);
    CHECK(c.lag_min == 0);
    VectorXd f = c.filters.col(0);
    CHECK(std::abs(l2_inner(f, f, t2.grid) - 1.0) < 1e-12);
    CHECK(c.sup_norm == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(std::abs(t2.signal_power - kVar1 * (1.0 + 0.5 + 1.0 / 3.0)) < 1e-9);
}

TEST_CASE("direct expansion and filter reconstruction agree exactly") {
  for (SimSpec spec : {case1_spec(30, 4), case2_spec(20, 2)}) {
    SimTruth truth = generate(spec);
    VectorXd zero_mean = VectorXd::Zero(truth.grid.size());
    std::vector<VectorXd> rec = reconstruct(zero_mean, truth.bank, truth.scores);
    REQUIRE(rec.size() == truth.curves.size());
    for (size_t j = 0; j < rec.size(); ++j)
      CHECK((rec[j] - truth.curves[j]).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("generator is a pure function of the spec") {
  SimSpec spec = case1_spec(20, 3);
  SimTruth a = generate(spec);
  SimTruth b = generate(spec);
  for (size_t j = 0; j < a.curves.size(); ++j) {
    CHECK((a.curves[j] - b.curves[j]).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.data.curves[j].times == b.data.curves[j].times);
    CHECK(a.data.curves[j].values == b.data.curves[j].values);
  }

  SimSpec other = spec;
  other.seed = spec.seed + 1;
  SimTruth c = generate(other);
  double moved = 0.0;
  for (size_t j = 0; j < a.curves.size(); ++j)
    moved += (a.curves[j] - c.curves[j]).cwiseAbs().maxCoeff();
  CHECK(moved > 0.0);
}

TEST_CASE("score series match the stationary AR law empirically") {
  SimSpec spec = case2_spec(20000);
  SimTruth truth = generate(spec);
  for (int k = 1; k <= 3; ++k) {
    const VectorXd& xi = truth.scores.xi[size_t(k - 1)];
    const double n = double(xi.size());
    const double mean = xi.mean();
    const double var = (xi.array() - mean).square().sum() / n;
    double lag1 = 0.0;
    for (long i = 0; i + 1 < xi.size(); ++i)
      lag1 += (xi[i] - mean) * (xi[i + 1] - mean);
    lag1 /= n * var;

    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(var - kVar1 / k) < 0.03 * kVar1 / k);
    CHECK(std::abs(lag1 - 0.2) < 0.03);
  }
}

TEST_CASE("observation noise has the declared variance") {
  SimSpec spec = case1_spec(2000);
  SimTruth truth = generate(spec);
  double sum = 0.0, sum2 = 0.0;
  long count = 0;
  for (int j = 0; j < truth.data.curve_count(); ++j) {
    const SampledCurve& c = truth.data.curves[size_t(j)];
    for (size_t z = 0; z < c.times.size(); ++z) {
      long idx = std::lround(c.times[z] * 50.0);
      double r = c.values[z] - truth.curves[size_t(j)][idx];
      sum += r;
      sum2 += r * r;
      ++count;
    }
  }
  const double mean = sum / double(count);
  const double var = sum2 / double(count) - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - truth.noise_variance) < 0.1 * truth.noise_variance);
}

TEST_CASE("population spectral density matches a hand built rank sum") {
  SimSpec spec = case1_spec(10);
  spec.grid_size = 11;
  spec.freq_half = 8;
  TimeGrid grid = TimeGrid::uniform(11);
  FrequencyGrid freqs(8);
  SpectralDensity sd = population_spectral_density(spec, grid, freqs);

  VectorXd w = sim_lag_weights(1);
  std::vector<VectorXd> basis = {fourier_basis(grid, 0), fourier_basis(grid, 1),
                                 fourier_basis(grid, 2)};
  for (int i = 0; i < freqs.size(); ++i) {
    const double omega = freqs.point(i);
    VectorXcd a = VectorXcd::Zero(grid.size());
    for (int l = -1; l <= 1; ++l)
      a += w[l + 1] * std::exp(cplx(0.0, -double(l) * omega)) *
           basis[size_t(l + 1)];
    const double g =
        1.0 / (kTwoPi * (1.0 - 0.4 * std::cos(omega) + 0.04));
    MatrixXcd hand = g * (a * a.adjoint());
    CHECK((sd.slice(i) - hand).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((sd.slice(i) - sd.slice(i).adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sd.slice(i));
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
  }
}

TEST_CASE("population spectral trace integrates to the signal power") {
  for (SimSpec spec : {case1_spec(10), case2_spec(10)}) {
    TimeGrid grid = TimeGrid::uniform(spec.grid_size);
    FrequencyGrid freqs(spec.freq_half);
    SpectralDensity sd = population_spectral_density(spec, grid, freqs);
    SimTruth truth = generate(spec);
    CHECK(std::abs(spectral_trace(sd) - truth.signal_power) < 1e-9);
  }
}
