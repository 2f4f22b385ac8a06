#include <doctest.h>

#include <cmath>

#include "pada/posterior.hpp"
#include "pada/rng.hpp"
#include "pada/whittle.hpp"

using namespace pada;

namespace {

WhittleSpectrum flat_spectrum(int J, int K, double value = 1.0) {
  WhittleSpectrum spec;
  spec.curve_count = J;
  for (int k = 0; k < K; ++k)
    spec.eta.push_back(VectorXd::Constant(J, value));
  return spec;
}

WhittleSpectrum random_spectrum(int J, int K, uint64_t stream) {
  RngStream rng(19, stream);
  WhittleSpectrum spec;
  spec.curve_count = J;
  for (int k = 0; k < K; ++k) {
    VectorXd e(J);
    for (int j = 0; j < J; ++j) e[j] = 0.5 + rng.next_double();
    spec.eta.push_back(std::move(e));
  }
  return spec;
}

// synthetic stack with dense random local designs, no bank involved
DesignStack random_stack(int J, std::vector<int> lags, uint64_t stream) {
  RngStream rng(23, stream);
  DesignStack st;
  st.curve_count = J;
  st.lag_span = std::move(lags);
  for (int j = 0; j < J; ++j) {
    int nj = 1 + int(rng.next_below(4));
    VectorXd y(nj);
    for (int z = 0; z < nj; ++z) y[z] = rng.next_normal();
    st.ytilde.push_back(std::move(y));
  }
  for (int l : st.lag_span) {
    std::vector<MatrixXd> blocks;
    for (int j = 0; j < J; ++j) {
      MatrixXd d(st.ytilde[size_t(j)].size(), 2 * l + 1);
      for (int r = 0; r < d.rows(); ++r)
        for (int c = 0; c < d.cols(); ++c) d(r, c) = rng.next_normal();
      blocks.push_back(std::move(d));
    }
    st.design.push_back(std::move(blocks));
  }
  return st;
}

std::vector<VectorXd> random_scores(const DesignStack& st, uint64_t stream) {
  RngStream rng(29, stream);
  std::vector<VectorXd> xis;
  for (int k = 0; k < st.component_count(); ++k) {
    VectorXd x(st.score_length(k));
    for (int i = 0; i < x.size(); ++i) x[i] = rng.next_normal();
    xis.push_back(std::move(x));
  }
  return xis;
}

double stacked_norm(const std::vector<VectorXd>& v) {
  double acc = 0.0;
  for (const VectorXd& x : v) acc += x.squaredNorm();
  return std::sqrt(acc);
}

}  // namespace

TEST_CASE("whittle_log_prior closed forms") {
  // zero scores leave only the log determinant part
  WhittleSpectrum spec = random_spectrum(12, 2, 1);
  double want = 0.0;
  for (int j = 0; j < 12; ++j) want -= 0.5 * std::log(spec.eta[1][j]);
  CHECK(whittle_log_prior(VectorXd::Zero(14), spec, 1) ==
        doctest::Approx(want).epsilon(1e-12));

  // single unit coefficient, flat spectrum: quadratic term is -1/(4 pi)
  WhittleSpectrum flat = flat_spectrum(4, 1);
  VectorXd xi = VectorXd::Zero(4);
  xi[0] = 1.0;
  CHECK(whittle_log_prior(xi, flat, 0) ==
        doctest::Approx(-1.0 / (4.0 * kPi)).epsilon(1e-12));
}

TEST_CASE("whittle prior DFT form equals the Toeplitz quadratic form") {
  for (uint64_t rep = 0; rep < 5; ++rep) {
    int J = 10 + int(rep);
    int L = int(rep % 3);
    WhittleSpectrum spec = random_spectrum(J, 1, 40 + rep);
    int n = J + 2 * L;
    RngStream rng(31, rep);
    VectorXd xi(n);
    for (int i = 0; i < n; ++i) xi[i] = rng.next_normal();

    double direct = whittle_log_prior(xi, spec, 0);
    MatrixXd a = whittle_precision_dense(spec, 0, n);
    double logdet = 0.0;
    for (int j = 0; j < J; ++j) logdet += std::log(spec.eta[0][j]);
    double quad = -0.5 * xi.dot(a * xi) - 0.5 * logdet;
    CHECK(direct == doctest::Approx(quad).epsilon(1e-10));

    VectorXd col = whittle_precision_first_col(spec, 0, n);
    CHECK((toeplitz_apply(col, xi) - a * xi).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("build_whittle_spectrum maps periodically and floors") {
  FrequencyGrid freqs(64);
  VectorXd eta(freqs.size());
  for (int i = 0; i < freqs.size(); ++i)
    eta[i] = 2.0 + std::cos(freqs.point(i));
  WhittleSpectrum spec = build_whittle_spectrum({eta}, freqs, 10);
  spec.validate();
  for (int j = 0; j < 10; ++j)
    CHECK(spec.eta[0][j] ==
          doctest::Approx(2.0 + std::cos(spec.omega(j))).epsilon(1e-2));

  // a spectrum touching zero is floored at 1e-6 of its maximum
  VectorXd dip(freqs.size());
  for (int i = 0; i < freqs.size(); ++i)
    dip[i] = std::max(0.0, std::cos(freqs.point(i)));
  WhittleSpectrum floored = build_whittle_spectrum({dip}, freqs, 7);
  double floor_value = 1e-6 * dip.maxCoeff();
  for (int j = 0; j < 7; ++j) CHECK(floored.eta[0][j] >= floor_value);
}

TEST_CASE("log_posterior closed forms and scaling") {
  DesignStack st = random_stack(8, {0, 1}, 5);
  WhittleSpectrum spec = random_spectrum(8, 2, 6);
  std::vector<VectorXd> zero = {VectorXd::Zero(8), VectorXd::Zero(10)};

  // zero scores and zero data leave the prior-only value
  DesignStack quiet = st;
  for (VectorXd& y : quiet.ytilde) y.setZero();
  double prior_only = whittle_log_prior(zero[0], spec, 0) +
                      whittle_log_prior(zero[1], spec, 1);
  CHECK(log_posterior(zero, quiet, 1.0, spec) ==
        doctest::Approx(prior_only).epsilon(1e-12));

  // doubling the noise variance halves the likelihood term exactly
  std::vector<VectorXd> xis = random_scores(st, 7);
  double prior = whittle_log_prior(xis[0], spec, 0) +
                 whittle_log_prior(xis[1], spec, 1);
  double lik1 = log_posterior(xis, st, 1.0, spec) - prior;
  double lik2 = log_posterior(xis, st, 2.0, spec) - prior;
  CHECK(lik1 == doctest::Approx(2.0 * lik2).epsilon(1e-12));

  CHECK_THROWS_AS(log_posterior(xis, st, 0.0, spec), Error);
}

TEST_CASE("log_posterior respects the lag indexing of curves") {
  DesignStack st;
  st.curve_count = 3;
  st.lag_span = {1};
  VectorXd xi(5);
  xi << 10, 20, 30, 40, 50;
  MatrixXd d(1, 3);
  d << 1, 2, 3;
  for (int j = 0; j < 3; ++j) {
    double pred = d(0, 0) * xi[j] + d(0, 1) * xi[j + 1] + d(0, 2) * xi[j + 2];
    st.ytilde.push_back(VectorXd::Constant(1, pred));
  }
  st.design.push_back({d, d, d});
  WhittleSpectrum spec = flat_spectrum(3, 1);
  // data reproduced exactly: only the prior term remains
  CHECK(log_posterior({xi}, st, 1.0, spec) ==
        doctest::Approx(whittle_log_prior(xi, spec, 0)).epsilon(1e-12));
}

TEST_CASE("posterior_gradient matches central finite differences") {
  for (uint64_t rep = 0; rep < 10; ++rep) {
    int J = 20;
    std::vector<int> lags = {int(rep % 2), int((rep + 1) % 2)};
    DesignStack st = random_stack(J, lags, 50 + rep);
    WhittleSpectrum spec = random_spectrum(J, 2, 60 + rep);
    std::vector<VectorXd> xis = random_scores(st, 70 + rep);

    std::vector<VectorXd> g = posterior_gradient(xis, st, 1.3, spec);
    double gnorm = stacked_norm(g);
    const double h = 1e-5;
    double worst = 0.0;
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < xis[size_t(k)].size(); ++i) {
        std::vector<VectorXd> up = xis, dn = xis;
        up[size_t(k)][i] += h;
        dn[size_t(k)][i] -= h;
        double fd = (log_posterior(up, st, 1.3, spec) -
                     log_posterior(dn, st, 1.3, spec)) /
                    (2.0 * h);
        worst = std::max(worst, std::abs(fd - g[size_t(k)][i]));
      }
    CHECK(worst / std::max(gnorm, 1e-12) < 1e-5);
  }
}

TEST_CASE("posterior_gradient without data is the pure prior term") {
  DesignStack st;
  st.curve_count = 6;
  st.lag_span = {1};
  for (int j = 0; j < 6; ++j) {
    st.ytilde.push_back(VectorXd(0));
  }
  st.design.push_back(std::vector<MatrixXd>(6, MatrixXd(0, 3)));
  WhittleSpectrum spec = random_spectrum(6, 1, 80);
  std::vector<VectorXd> xis = random_scores(st, 81);
  std::vector<VectorXd> g = posterior_gradient(xis, st, 1.0, spec);
  MatrixXd a = whittle_precision_dense(spec, 0, 8);
  CHECK((g[0] + a * xis[0]).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("two-curve hand posterior: mean, covariance and MAP agree") {
  // J=2, one observation each, unit constant filter, flat unit spectrum:
  // precision = (1 + 1/(2 pi)) I, mean = y / (1 + 1/(2 pi))
  DesignStack st;
  st.curve_count = 2;
  st.lag_span = {0};
  st.ytilde.push_back(VectorXd::Constant(1, 1.4));
  st.ytilde.push_back(VectorXd::Constant(1, -0.6));
  st.design.push_back({MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1)});
  WhittleSpectrum spec = flat_spectrum(2, 1);
  ModelConfig cfg;

  const double shrink = 1.0 / (1.0 + 1.0 / kTwoPi);
  PosteriorSummary post = exact_posterior(st, 1.0, spec, cfg, true);
  CHECK(post.mean[0][0] == doctest::Approx(1.4 * shrink).epsilon(1e-12));
  CHECK(post.mean[0][1] == doctest::Approx(-0.6 * shrink).epsilon(1e-12));
  REQUIRE(post.covariance.has_value());
  CHECK((*post.covariance)(0, 0) == doctest::Approx(shrink).epsilon(1e-12));
  CHECK(std::abs((*post.covariance)(0, 1)) < 1e-12);

  MapResult map = map_estimate(st, 1.0, spec, cfg);
  CHECK(map.converged);
  CHECK((map.xi[0] - post.mean[0]).cwiseAbs().maxCoeff() < 1e-8);

  // zero data keeps the MAP at the prior mode
  DesignStack quiet = st;
  for (VectorXd& y : quiet.ytilde) y.setZero();
  MapResult origin = map_estimate(quiet, 1.0, spec, cfg);
  CHECK(stacked_norm(origin.xi) == 0.0);
}

TEST_CASE("MAP matches the exact posterior mean on random instances") {
  ModelConfig cfg;
  cfg.map_tol = 1e-15;
  cfg.map_max_iter = 50000;
  for (uint64_t rep = 0; rep < 5; ++rep) {
    DesignStack st = random_stack(20, {int(rep % 2), 1}, 90 + rep);
    WhittleSpectrum spec = random_spectrum(20, 2, 95 + rep);
    PosteriorSummary post = exact_posterior(st, 0.8, spec, cfg, false);
    MapResult map = map_estimate(st, 0.8, spec, cfg);

    for (size_t i = 1; i < map.trace.size(); ++i)
      CHECK(map.trace[i] >= map.trace[i - 1]);

    double err = 0.0, scale = 0.0;
    for (int k = 0; k < 2; ++k) {
      err += (map.xi[size_t(k)] - post.mean[size_t(k)]).squaredNorm();
      scale += post.mean[size_t(k)].squaredNorm();
    }
    CHECK(std::sqrt(err / scale) < 1e-5);

    // first-order optimality at the exact mean
    std::vector<VectorXd> g = posterior_gradient(post.mean, st, 0.8, spec);
    CHECK(stacked_norm(g) <
          1e-6 * std::max(1.0, std::sqrt(scale)));
  }
}

TEST_CASE("exact_posterior covariance is symmetric PSD and prior-only is the prior inverse") {
  ModelConfig cfg;
  DesignStack st = random_stack(12, {0, 1}, 120);
  WhittleSpectrum spec = random_spectrum(12, 2, 121);
  PosteriorSummary post = exact_posterior(st, 1.1, spec, cfg, true);
  const MatrixXd& c = *post.covariance;
  CHECK((c - c.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(c);
  CHECK(eig.eigenvalues().minCoeff() > -1e-8);

  // no data: mean 0 and covariance equal to the prior precision inverse
  DesignStack empty;
  empty.curve_count = 10;
  empty.lag_span = {0};
  for (int j = 0; j < 10; ++j) empty.ytilde.push_back(VectorXd(0));
  empty.design.push_back(std::vector<MatrixXd>(10, MatrixXd(0, 1)));
  WhittleSpectrum sp = random_spectrum(10, 1, 122);
  PosteriorSummary prior_only = exact_posterior(empty, 1.0, sp, cfg, true);
  CHECK(prior_only.mean[0].cwiseAbs().maxCoeff() == 0.0);
  MatrixXd a = whittle_precision_dense(sp, 0, 10);
  CHECK((((*prior_only.covariance) * a) - MatrixXd::Identity(10, 10))
            .cwiseAbs()
            .maxCoeff() < 1e-8);

  ModelConfig tiny = cfg;
  tiny.posterior_dim_guard = 10;
  CHECK_THROWS_AS(exact_posterior(st, 1.1, spec, tiny, false), Error);
}
