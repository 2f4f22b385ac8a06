#include "pada/ar.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace pada {

namespace {

constexpr double kTinyVariance = 1e-300;

// raw (uncentered) autocovariance, biased 1/n normalization
double autocov(const VectorXd& x, int h) {
  const long n = x.size();
  double acc = 0.0;
  for (long t = 0; t + h < n; ++t) acc += x[t] * x[t + h];
  return acc / double(n);
}

double spectral_radius(const MatrixXd& m) {
  Eigen::EigenSolver<MatrixXd> eig(m, false);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

bool ar_stationary(const VectorXd& coefficients) {
  const int p = int(coefficients.size());
  if (p == 0) return true;
  MatrixXd companion = MatrixXd::Zero(p, p);
  companion.row(0) = coefficients.transpose();
  if (p > 1) companion.block(1, 0, p - 1, p - 1).setIdentity();
  return spectral_radius(companion) < 1.0;
}

void ArModel::validate() const {
  require(order >= 0 && coefficients.size() == order,
          ErrorCode::invalid_argument, "ArModel: order/coefficient mismatch");
  require(innovation_variance >= 0.0, ErrorCode::invalid_argument,
          "ArModel: negative innovation variance");
  require(ar_stationary(coefficients), ErrorCode::numeric,
          "ArModel: companion spectral radius >= 1");
}

ArModel fit_ar(const VectorXd& xi, int max_order) {
  const long n = xi.size();
  require(n >= 10, ErrorCode::invalid_argument,
          "fit_ar: need at least 10 observations");
  require(max_order >= 0, ErrorCode::invalid_argument,
          "fit_ar: negative max order");
  const int pmax = std::min<long>(max_order, n - 2);

  VectorXd c(pmax + 1);
  for (int h = 0; h <= pmax; ++h) c[h] = autocov(xi, h);

  ArModel best;
  best.coefficients = VectorXd(0);
  best.innovation_variance = std::max(c[0], 0.0);
  if (c[0] <= kTinyVariance) return best;  // constant zero series
  double best_aic =
      double(n) * std::log(std::max(c[0], kTinyVariance));

  // Levinson-Durbin; reflection coefficients outside (-1,1) end the sweep
  VectorXd phi(pmax), prev(pmax);
  double sigma2 = c[0];
  for (int p = 1; p <= pmax; ++p) {
    if (sigma2 <= kTinyVariance) break;
    double kappa = c[p];
    for (int i = 1; i < p; ++i) kappa -= prev[i - 1] * c[p - i];
    kappa /= sigma2;
    if (!std::isfinite(kappa) || std::abs(kappa) >= 1.0) break;
    for (int i = 1; i < p; ++i)
      phi[i - 1] = prev[i - 1] - kappa * prev[p - i - 1];
    phi[p - 1] = kappa;
    sigma2 *= 1.0 - kappa * kappa;
    prev.head(p) = phi.head(p);

    double aic =
        double(n) * std::log(std::max(sigma2, kTinyVariance)) + 2.0 * p;
    if (aic < best_aic && ar_stationary(phi.head(p))) {
      best_aic = aic;
      best.order = p;
      best.coefficients = phi.head(p);
      best.innovation_variance = std::max(sigma2, 0.0);
    }
  }
  best.validate();
  return best;
}

namespace {

double extended_value(const VectorXd& history, const VectorXd& ext,
                      long pos) {
  // pos is 0-based over the concatenated series; negative reads as 0
  if (pos < 0) return 0.0;
  if (pos < history.size()) return history[pos];
  return ext[pos - history.size()];
}

VectorXd extend_impl(const ArModel& model, const VectorXd& history, int steps,
                     RngStream* rng) {
  require(steps >= 0, ErrorCode::invalid_argument,
          "ar_extend: negative step count");
  model.validate();
  VectorXd ext(steps);
  const double sd = std::sqrt(model.innovation_variance);
  for (int s = 0; s < steps; ++s) {
    double value = 0.0;
    for (int i = 1; i <= model.order; ++i)
      value += model.coefficients[i - 1] *
               extended_value(history, ext, history.size() + s - i);
    if (rng != nullptr) value += sd * rng->next_normal();
    ext[s] = value;
  }
  return ext;
}

}  // namespace

VectorXd ar_extend(const ArModel& model, const VectorXd& history, int steps) {
  return extend_impl(model, history, steps, nullptr);
}

VectorXd ar_extend_noisy(const ArModel& model, const VectorXd& history,
                         int steps, RngStream& rng) {
  return extend_impl(model, history, steps, &rng);
}

bool var_stationary(const std::vector<MatrixXd>& coefficients) {
  const int p = int(coefficients.size());
  if (p == 0) return true;
  const long k = coefficients[0].rows();
  MatrixXd companion = MatrixXd::Zero(p * k, p * k);
  for (int i = 0; i < p; ++i)
    companion.block(0, i * k, k, k) = coefficients[size_t(i)];
  if (p > 1)
    companion.block(k, 0, (p - 1) * k, (p - 1) * k).setIdentity();
  return spectral_radius(companion) < 1.0;
}

void VarModel::validate() const {
  require(order >= 0 && int(coefficients.size()) == order,
          ErrorCode::invalid_argument, "VarModel: order/coefficient mismatch");
  const long k = innovation_covariance.rows();
  require(innovation_covariance.cols() == k, ErrorCode::dimension_mismatch,
          "VarModel: covariance not square");
  for (const MatrixXd& a : coefficients)
    require(a.rows() == k && a.cols() == k, ErrorCode::dimension_mismatch,
            "VarModel: coefficient block shape");
  require(var_stationary(coefficients), ErrorCode::numeric,
          "VarModel: companion spectral radius >= 1");
}

VarModel fit_var(const MatrixXd& xi, int max_order) {
  const long n = xi.rows();
  const long k = xi.cols();
  require(n >= 10, ErrorCode::invalid_argument,
          "fit_var: need at least 10 rows");
  require(k >= 1, ErrorCode::invalid_argument, "fit_var: empty panel");
  require(max_order >= 0, ErrorCode::invalid_argument,
          "fit_var: negative max order");
  const int pmax = int(std::min<long>(max_order, n - 2));

  // Gamma_h = E[y_{t+h} y_t^T], raw 1/n normalization
  std::vector<MatrixXd> gamma;
  for (int h = 0; h <= pmax; ++h) {
    MatrixXd g = MatrixXd::Zero(k, k);
    for (long t = 0; t + h < n; ++t)
      g += xi.row(t + h).transpose() * xi.row(t);
    gamma.push_back(g / double(n));
  }

  auto safe_logdet = [&](const MatrixXd& s) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(s);
    double acc = 0.0;
    for (long i = 0; i < k; ++i)
      acc += std::log(std::max(eig.eigenvalues()[i], kTinyVariance));
    return acc;
  };

  VarModel best;
  best.innovation_covariance = gamma[0];
  double best_aic = double(n) * safe_logdet(gamma[0]);

  for (int p = 1; p <= pmax; ++p) {
    MatrixXd m(p * k, p * k);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) {
        int d = j - i;
        m.block(i * k, j * k, k, k) =
            d >= 0 ? gamma[size_t(d)] : MatrixXd(gamma[size_t(-d)].transpose());
      }
    MatrixXd rhs(p * k, k);
    for (int j = 0; j < p; ++j)
      rhs.block(j * k, 0, k, k) = gamma[size_t(j + 1)].transpose();

    Eigen::LDLT<MatrixXd> ldlt(m);
    MatrixXd sol = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !sol.allFinite()) {
      double ridge = 1e-8 * std::max(1.0, m.diagonal().cwiseAbs().maxCoeff());
      MatrixXd jittered =
          m + ridge * MatrixXd::Identity(p * k, p * k);
      sol = jittered.ldlt().solve(rhs);
      require(sol.allFinite(), ErrorCode::numeric,
              "fit_var: Yule-Walker system unsolvable");
    }

    std::vector<MatrixXd> coef;
    for (int i = 0; i < p; ++i)
      coef.push_back(sol.block(i * k, 0, k, k).transpose());
    if (!var_stationary(coef)) continue;

    MatrixXd sigma = gamma[0];
    for (int i = 0; i < p; ++i)
      sigma -= coef[size_t(i)] * gamma[size_t(i + 1)].transpose();
    sigma = ((sigma + sigma.transpose()) / 2.0).eval();

    double aic = double(n) * safe_logdet(sigma) + 2.0 * p * double(k * k);
    if (aic < best_aic) {
      best_aic = aic;
      best.order = p;
      best.coefficients = coef;
      best.innovation_covariance = sigma;
    }
  }
  best.validate();
  return best;
}

MatrixXd var_extend(const VarModel& model, const MatrixXd& history,
                    int steps) {
  require(steps >= 0, ErrorCode::invalid_argument,
          "var_extend: negative step count");
  model.validate();
  const long k = model.innovation_covariance.rows();
  require(history.cols() == k, ErrorCode::dimension_mismatch,
          "var_extend: history width != model dimension");
  MatrixXd ext = MatrixXd::Zero(steps, k);
  for (int s = 0; s < steps; ++s) {
    Eigen::RowVectorXd value = Eigen::RowVectorXd::Zero(k);
    for (int i = 1; i <= model.order; ++i) {
      long pos = history.rows() + s - i;
      if (pos < 0) continue;
      Eigen::RowVectorXd lagged = pos < history.rows()
                                      ? Eigen::RowVectorXd(history.row(pos))
                                      : Eigen::RowVectorXd(ext.row(pos - history.rows()));
      value += lagged * model.coefficients[size_t(i - 1)].transpose();
    }
    ext.row(s) = value;
  }
  return ext;
}

}  // namespace pada
