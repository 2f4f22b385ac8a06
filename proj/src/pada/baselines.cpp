#include "pada/baselines.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace pada {

MatrixXd lag0_covariance(const SpectralDensity& density) {
  const int g = density.grid.size();
  MatrixXcd acc = MatrixXcd::Zero(g, g);
  for (int i = 0; i < density.freqs.size(); ++i)
    acc += density.freqs.weights()[size_t(i)] * density.slice(i);
  // conjugate symmetry across +-omega cancels the imaginary part
  MatrixXd c = acc.real();
  return ((c + c.transpose()) / 2.0).eval();
}

namespace {

VectorXd blup_scores(const VectorXd& eigenvalues, const MatrixXd& design,
                     double sigma2, const VectorXd& ytilde) {
  // xi = Lambda Phi^T (Phi Lambda Phi^T + sigma2 I)^-1 ytilde
  MatrixXd gain = design * eigenvalues.asDiagonal() * design.transpose();
  gain.diagonal().array() += sigma2;
  VectorXd sol = gain.ldlt().solve(ytilde);
  require(sol.allFinite(), ErrorCode::numeric,
          "static scores: singular prediction system");
  return eigenvalues.asDiagonal() * design.transpose() * sol;
}

MatrixXd eigen_design(const StaticFit& fit, const SampledCurve& curve) {
  MatrixXd d(curve.size(), fit.eigenfunctions.cols());
  for (int z = 0; z < curve.size(); ++z)
    for (int k = 0; k < fit.eigenfunctions.cols(); ++k)
      d(z, k) = interp_linear(fit.grid, fit.eigenfunctions.col(k),
                              curve.times[size_t(z)]);
  return d;
}

}  // namespace

StaticFit fit_static_fpca(const FtsDataset& data, const ModelConfig& cfg) {
  return fit_static_from(smooth_surfaces(data, cfg), data, cfg);
}

StaticFit fit_static_from(const SmoothedSurfaces& surfaces,
                          const FtsDataset& data, const ModelConfig& cfg) {
  const int J = data.curve_count();
  require(int(surfaces.mean_at_obs.size()) == J, ErrorCode::dimension_mismatch,
          "fit_static_fpca: surfaces were built from different data");
  const TimeGrid& grid = surfaces.grid;
  const int g = grid.size();

  // operator eigenpairs of c0 through the weighted symmetric form
  MatrixXd c0 = lag0_covariance(surfaces.density);
  VectorXd d = grid.weights_vec().cwiseSqrt();
  MatrixXd b = d.asDiagonal() * c0 * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(b);
  require(eig.info() == Eigen::Success, ErrorCode::numeric,
          "fit_static_fpca: covariance eigendecomposition failed");
  VectorXd ladder = eig.eigenvalues().reverse().cwiseMax(0.0);

  const int kmax = std::min(cfg.max_components, g);
  const int K = cfg.components
                    ? *cfg.components
                    : select_components(ladder, b.trace(), cfg.fve, kmax);
  require(K >= 1 && K <= kmax, ErrorCode::invalid_argument,
          "fit_static_fpca: component count outside [1, max_components]");

  MatrixXd basis(g, K);
  for (int k = 0; k < K; ++k) {
    VectorXd phi = eig.eigenvectors().col(g - 1 - k).cwiseQuotient(d);
    int arg = 0;
    phi.cwiseAbs().maxCoeff(&arg);
    if (phi[arg] < 0.0) phi = -phi;
    basis.col(k) = phi;
  }

  ModelConfig resolved = cfg;
  resolved.bandwidth_mu = surfaces.bandwidth_mu;
  resolved.bandwidth_f = surfaces.bandwidth_f;
  resolved.lag_window = surfaces.lag_window;
  resolved.components = K;

  StaticFit fit{grid,
                surfaces.mean,
                ladder.head(K),
                std::move(basis),
                MatrixXd(J, K),
                surfaces.sigma2,
                std::move(ladder),
                resolved};
  for (int j = 0; j < J; ++j) {
    const SampledCurve& curve = data.curves[size_t(j)];
    VectorXd ytilde(curve.size());
    for (int z = 0; z < curve.size(); ++z)
      ytilde[z] = curve.values[size_t(z)] - surfaces.mean_at_obs[size_t(j)][size_t(z)];
    fit.scores.row(j) =
        blup_scores(fit.eigenvalues, eigen_design(fit, curve), fit.sigma2, ytilde)
            .transpose();
  }
  return fit;
}

MatrixXd static_scores(const StaticFit& fit, const FtsDataset& data) {
  data.validate();
  MatrixXd out(data.curve_count(), fit.eigenfunctions.cols());
  for (int j = 0; j < data.curve_count(); ++j) {
    const SampledCurve& curve = data.curves[size_t(j)];
    VectorXd ytilde(curve.size());
    for (int z = 0; z < curve.size(); ++z)
      ytilde[z] = curve.values[size_t(z)] -
                  interp_linear(fit.grid, fit.mean, curve.times[size_t(z)]);
    out.row(j) =
        blup_scores(fit.eigenvalues, eigen_design(fit, curve), fit.sigma2, ytilde)
            .transpose();
  }
  return out;
}

std::vector<VectorXd> static_reconstruct(const StaticFit& fit) {
  std::vector<VectorXd> out;
  out.reserve(size_t(fit.scores.rows()));
  for (int j = 0; j < fit.scores.rows(); ++j)
    out.push_back(fit.mean + fit.eigenfunctions * fit.scores.row(j).transpose());
  return out;
}

std::vector<VectorXd> static_forecast(const StaticFit& fit, int steps,
                                      int max_order) {
  require(steps >= 1, ErrorCode::invalid_argument,
          "static_forecast: horizon must be positive");
  VarModel model = fit_var(fit.scores, max_order);
  MatrixXd ext = var_extend(model, fit.scores, steps);
  std::vector<VectorXd> out;
  out.reserve(size_t(steps));
  for (int p = 0; p < steps; ++p)
    out.push_back(fit.mean + fit.eigenfunctions * ext.row(p).transpose());
  return out;
}

}  // namespace pada
