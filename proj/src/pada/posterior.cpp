#include "pada/posterior.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace pada {

long DesignStack::stacked_dim() const {
  long n = 0;
  for (int k = 0; k < component_count(); ++k) n += score_length(k);
  return n;
}

long DesignStack::block_offset(int k) const {
  require(k >= 0 && k <= component_count(), ErrorCode::invalid_argument,
          "DesignStack: component index out of range");
  long n = 0;
  for (int i = 0; i < k; ++i) n += score_length(i);
  return n;
}

void DesignStack::validate() const {
  require(curve_count >= 1, ErrorCode::invalid_argument,
          "DesignStack: no curves");
  require(!lag_span.empty(), ErrorCode::invalid_argument,
          "DesignStack: no components");
  require(int(ytilde.size()) == curve_count, ErrorCode::dimension_mismatch,
          "DesignStack: one demeaned vector per curve required");
  require(design.size() == lag_span.size(), ErrorCode::dimension_mismatch,
          "DesignStack: one design list per component required");
  for (int k = 0; k < component_count(); ++k) {
    require(lag_span[size_t(k)] >= 0, ErrorCode::invalid_argument,
            "DesignStack: negative lag span");
    require(int(design[size_t(k)].size()) == curve_count,
            ErrorCode::dimension_mismatch,
            "DesignStack: one design block per curve required");
    for (int j = 0; j < curve_count; ++j) {
      const MatrixXd& d = design[size_t(k)][size_t(j)];
      require(d.rows() == ytilde[size_t(j)].size() &&
                  d.cols() == 2 * lag_span[size_t(k)] + 1,
              ErrorCode::dimension_mismatch,
              "DesignStack: design block shape mismatch");
    }
  }
}

DesignStack build_design_stack(const FtsDataset& data,
                               const std::vector<std::vector<double>>& mean_at_obs,
                               const FilterBank& bank) {
  data.validate();
  const int J = data.curve_count();
  require(int(mean_at_obs.size()) == J, ErrorCode::dimension_mismatch,
          "build_design_stack: one mean vector per curve required");
  require(bank.component_count() >= 1, ErrorCode::invalid_argument,
          "build_design_stack: empty filter bank");

  DesignStack st;
  st.curve_count = J;
  for (const FilterComponent& c : bank.comps)
    st.lag_span.push_back(c.lag_span());

  for (int j = 0; j < J; ++j) {
    const SampledCurve& curve = data.curves[size_t(j)];
    const int nj = int(curve.times.size());
    require(int(mean_at_obs[size_t(j)].size()) == nj,
            ErrorCode::dimension_mismatch,
            "build_design_stack: mean vector length mismatch");
    VectorXd y(nj);
    for (int z = 0; z < nj; ++z)
      y[z] = curve.values[size_t(z)] - mean_at_obs[size_t(j)][z];
    st.ytilde.push_back(std::move(y));
  }

  for (int k = 0; k < bank.component_count(); ++k) {
    const FilterComponent& c = bank.comps[size_t(k)];
    std::vector<MatrixXd> blocks;
    for (int j = 0; j < J; ++j) {
      const SampledCurve& curve = data.curves[size_t(j)];
      MatrixXd d(curve.times.size(), c.lag_count());
      for (int col = 0; col < c.lag_count(); ++col) {
        VectorXd f = c.filters.col(col);
        for (int z = 0; z < int(curve.times.size()); ++z)
          d(z, col) = interp_linear(bank.grid, f, curve.times[size_t(z)]);
      }
      blocks.push_back(std::move(d));
    }
    st.design.push_back(std::move(blocks));
  }
  st.validate();
  return st;
}

namespace {

void check_scores(const std::vector<VectorXd>& xis, const DesignStack& stack) {
  require(int(xis.size()) == stack.component_count(),
          ErrorCode::dimension_mismatch,
          "scores: one series per component required");
  for (int k = 0; k < stack.component_count(); ++k)
    require(xis[size_t(k)].size() == stack.score_length(k),
            ErrorCode::dimension_mismatch, "scores: series length mismatch");
}

// residual of curve j at the given scores
VectorXd curve_residual(const std::vector<VectorXd>& xis,
                        const DesignStack& stack, int j) {
  VectorXd r = stack.ytilde[size_t(j)];
  for (int k = 0; k < stack.component_count(); ++k) {
    const MatrixXd& d = stack.design[size_t(k)][size_t(j)];
    r -= d * xis[size_t(k)].segment(j, d.cols());
  }
  return r;
}

}  // namespace

double log_posterior(const std::vector<VectorXd>& xis,
                     const DesignStack& stack, double sigma2,
                     const WhittleSpectrum& spec) {
  stack.validate();
  check_scores(xis, stack);
  require(sigma2 > 0.0, ErrorCode::invalid_argument,
          "log_posterior: noise variance must be positive");
  double ll = 0.0;
  for (int j = 0; j < stack.curve_count; ++j)
    ll -= curve_residual(xis, stack, j).squaredNorm() / (2.0 * sigma2);
  for (int k = 0; k < stack.component_count(); ++k)
    ll += whittle_log_prior(xis[size_t(k)], spec, k);
  return ll;
}

std::vector<VectorXd> posterior_gradient(const std::vector<VectorXd>& xis,
                                         const DesignStack& stack,
                                         double sigma2,
                                         const WhittleSpectrum& spec) {
  stack.validate();
  check_scores(xis, stack);
  require(sigma2 > 0.0, ErrorCode::invalid_argument,
          "posterior_gradient: noise variance must be positive");
  std::vector<VectorXd> grad;
  for (int k = 0; k < stack.component_count(); ++k) {
    VectorXd a = whittle_precision_first_col(spec, k, stack.score_length(k));
    grad.push_back(-toeplitz_apply(a, xis[size_t(k)]));
  }
  for (int j = 0; j < stack.curve_count; ++j) {
    VectorXd r = curve_residual(xis, stack, j) / sigma2;
    for (int k = 0; k < stack.component_count(); ++k) {
      const MatrixXd& d = stack.design[size_t(k)][size_t(j)];
      grad[size_t(k)].segment(j, d.cols()) += d.transpose() * r;
    }
  }
  return grad;
}

namespace {

struct QuadraticModel {
  const DesignStack& stack;
  double sigma2;
  std::vector<VectorXd> prior_cols;  // Toeplitz first columns per k
  double log_eta_const = 0.0;

  QuadraticModel(const DesignStack& s, double s2, const WhittleSpectrum& spec)
      : stack(s), sigma2(s2) {
    for (int k = 0; k < s.component_count(); ++k) {
      prior_cols.push_back(
          whittle_precision_first_col(spec, k, s.score_length(k)));
      for (int j = 0; j < spec.curve_count; ++j)
        log_eta_const -= 0.5 * std::log(spec.eta[size_t(k)][j]);
    }
  }

  double objective(const std::vector<VectorXd>& xis) const {
    double v = log_eta_const;
    for (int j = 0; j < stack.curve_count; ++j)
      v -= curve_residual(xis, stack, j).squaredNorm() / (2.0 * sigma2);
    for (int k = 0; k < stack.component_count(); ++k)
      v -= 0.5 * xis[size_t(k)].dot(
                     toeplitz_apply(prior_cols[size_t(k)], xis[size_t(k)]));
    return v;
  }

  // y = (Gram/sigma2 + prior) x
  std::vector<VectorXd> precision_apply(
      const std::vector<VectorXd>& x) const {
    std::vector<VectorXd> y;
    for (int k = 0; k < stack.component_count(); ++k)
      y.push_back(toeplitz_apply(prior_cols[size_t(k)], x[size_t(k)]));
    for (int j = 0; j < stack.curve_count; ++j) {
      VectorXd t = VectorXd::Zero(stack.ytilde[size_t(j)].size());
      for (int k = 0; k < stack.component_count(); ++k) {
        const MatrixXd& d = stack.design[size_t(k)][size_t(j)];
        t += d * x[size_t(k)].segment(j, d.cols());
      }
      t /= sigma2;
      for (int k = 0; k < stack.component_count(); ++k) {
        const MatrixXd& d = stack.design[size_t(k)][size_t(j)];
        y[size_t(k)].segment(j, d.cols()) += d.transpose() * t;
      }
    }
    return y;
  }
};

}  // namespace

MapResult map_estimate(const DesignStack& stack, double sigma2,
                       const WhittleSpectrum& spec, const ModelConfig& cfg) {
  stack.validate();
  spec.validate();
  require(sigma2 > 0.0, ErrorCode::invalid_argument,
          "map_estimate: noise variance must be positive");
  require(spec.component_count() == stack.component_count() &&
              spec.curve_count == stack.curve_count,
          ErrorCode::dimension_mismatch,
          "map_estimate: spectrum does not match design");

  QuadraticModel model(stack, sigma2, spec);
  MapResult res;
  for (int k = 0; k < stack.component_count(); ++k)
    res.xi.push_back(VectorXd::Zero(stack.score_length(k)));

  double f = model.objective(res.xi);
  require(std::isfinite(f), ErrorCode::numeric,
          "map_estimate: non-finite objective");
  res.trace.push_back(f);

  for (int it = 0; it < cfg.map_max_iter; ++it) {
    std::vector<VectorXd> g = posterior_gradient(res.xi, stack, sigma2, spec);
    double gg = 0.0;
    for (const VectorXd& v : g) gg += v.squaredNorm();
    if (gg <= 0.0) {
      res.converged = true;
      break;
    }
    std::vector<VectorXd> pg = model.precision_apply(g);
    double gpg = 0.0;
    for (int k = 0; k < stack.component_count(); ++k)
      gpg += g[size_t(k)].dot(pg[size_t(k)]);
    if (!(gpg > 0.0)) {
      // flat direction: the quadratic cannot improve along the gradient
      res.converged = gg < 1e-20;
      break;
    }
    double alpha = gg / gpg;
    std::vector<VectorXd> next = res.xi;
    for (int k = 0; k < stack.component_count(); ++k)
      next[size_t(k)] += alpha * g[size_t(k)];
    double fnew = model.objective(next);
    require(std::isfinite(fnew), ErrorCode::numeric,
            "map_estimate: non-finite objective");
    if (fnew <= f) {
      res.converged = true;  // numerically stationary
      break;
    }
    res.xi = std::move(next);
    res.trace.push_back(fnew);
    ++res.iterations;
    double rel = (fnew - f) / std::max(std::abs(fnew), 1.0);
    f = fnew;
    if (rel < cfg.map_tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

long PosteriorSummary::stacked_dim() const {
  long n = 0;
  for (int l : lag_span) n += curve_count + 2 * l;
  return n;
}

long PosteriorSummary::block_offset(int k) const {
  long n = 0;
  for (int i = 0; i < k; ++i) n += curve_count + 2 * lag_span[size_t(i)];
  return n;
}

PosteriorSummary exact_posterior(const DesignStack& stack, double sigma2,
                                 const WhittleSpectrum& spec,
                                 const ModelConfig& cfg,
                                 bool want_covariance) {
  stack.validate();
  spec.validate();
  require(sigma2 > 0.0, ErrorCode::invalid_argument,
          "exact_posterior: noise variance must be positive");
  require(spec.component_count() == stack.component_count() &&
              spec.curve_count == stack.curve_count,
          ErrorCode::dimension_mismatch,
          "exact_posterior: spectrum does not match design");
  const long n = stack.stacked_dim();
  require(n <= cfg.posterior_dim_guard, ErrorCode::invalid_argument,
          "exact_posterior: stacked score dimension exceeds the dense-solve "
          "guard, use map_estimate");

  MatrixXd p = MatrixXd::Zero(n, n);
  VectorXd b = VectorXd::Zero(n);
  for (int k = 0; k < stack.component_count(); ++k) {
    long off = stack.block_offset(k);
    int nk = stack.score_length(k);
    p.block(off, off, nk, nk) += whittle_precision_dense(spec, k, nk);
  }
  for (int j = 0; j < stack.curve_count; ++j) {
    for (int k1 = 0; k1 < stack.component_count(); ++k1) {
      const MatrixXd& d1 = stack.design[size_t(k1)][size_t(j)];
      long off1 = stack.block_offset(k1);
      b.segment(off1 + j, d1.cols()) +=
          d1.transpose() * stack.ytilde[size_t(j)] / sigma2;
      for (int k2 = 0; k2 < stack.component_count(); ++k2) {
        const MatrixXd& d2 = stack.design[size_t(k2)][size_t(j)];
        long off2 = stack.block_offset(k2);
        p.block(off1 + j, off2 + j, d1.cols(), d2.cols()) +=
            d1.transpose() * d2 / sigma2;
      }
    }
  }

  Eigen::LDLT<MatrixXd> ldlt(p);
  require(ldlt.info() == Eigen::Success, ErrorCode::numeric,
          "exact_posterior: precision factorization failed");
  VectorXd mean = ldlt.solve(b);

  PosteriorSummary out;
  out.curve_count = stack.curve_count;
  out.lag_span = stack.lag_span;
  for (int k = 0; k < stack.component_count(); ++k)
    out.mean.push_back(
        mean.segment(stack.block_offset(k), stack.score_length(k)));
  out.precision = std::move(p);
  if (want_covariance) {
    MatrixXd cov = ldlt.solve(MatrixXd::Identity(n, n));
    cov = ((cov + cov.transpose()) / 2.0).eval();
    out.covariance = std::move(cov);
  }
  return out;
}

}  // namespace pada
