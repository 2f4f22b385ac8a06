#include "pada/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

namespace pada {

namespace {

void check_bank_scores(const FilterBank& bank, const ScoreSet& scores,
                       const VectorXd& mean) {
  scores.validate();
  require(bank.component_count() == scores.component_count(),
          ErrorCode::dimension_mismatch,
          "reconstruct: bank and scores disagree on component count");
  require(mean.size() == bank.grid.size(), ErrorCode::dimension_mismatch,
          "reconstruct: mean length != grid size");
  for (int k = 0; k < bank.component_count(); ++k) {
    const FilterComponent& comp = bank.comps[size_t(k)];
    require(comp.filters.rows() == bank.grid.size(),
            ErrorCode::dimension_mismatch,
            "reconstruct: filter rows != grid size");
    require(comp.lag_span() == scores.lag_span[size_t(k)],
            ErrorCode::dimension_mismatch,
            "reconstruct: lag span of scores != lag span of filters");
  }
}

template <typename ScoreAt>
VectorXd compose_curve(const VectorXd& mean, const FilterBank& bank, long j,
                       ScoreAt&& score_at) {
  VectorXd out = mean;
  for (int k = 0; k < bank.component_count(); ++k) {
    const FilterComponent& comp = bank.comps[size_t(k)];
    for (int c = 0; c < comp.lag_count(); ++c)
      out += comp.filters.col(c) * score_at(k, j + comp.lag_min + c);
  }
  return out;
}

// sorted ascending, type-7 interpolated quantile
double quantile_sorted(const std::vector<double>& v, double q) {
  const double h = q * double(v.size() - 1);
  const long lo = long(std::floor(h));
  const long hi = std::min<long>(lo + 1, long(v.size()) - 1);
  const double w = h - double(lo);
  return (1.0 - w) * v[size_t(lo)] + w * v[size_t(hi)];
}

}  // namespace

std::vector<VectorXd> reconstruct(const VectorXd& mean, const FilterBank& bank,
                                  const ScoreSet& scores) {
  check_bank_scores(bank, scores, mean);
  std::vector<VectorXd> out;
  out.reserve(size_t(scores.curve_count));
  for (long j = 1; j <= scores.curve_count; ++j)
    out.push_back(compose_curve(mean, bank, j, [&](int k, long idx) {
      return scores.at(k, int(idx));
    }));
  return out;
}

std::vector<VectorXd> forecast(const FilterBank& bank, ScoreSet& scores,
                               const std::vector<ArModel>& models, int steps,
                               const VectorXd& mean) {
  check_bank_scores(bank, scores, mean);
  require(steps >= 1, ErrorCode::invalid_argument,
          "forecast: horizon must be positive");
  require(int(models.size()) == scores.component_count(),
          ErrorCode::dimension_mismatch,
          "forecast: one AR model per component required");

  scores.forecast_ext.clear();
  for (int k = 0; k < scores.component_count(); ++k)
    scores.forecast_ext.push_back(
        ar_extend(models[size_t(k)], scores.xi[size_t(k)], steps));

  auto score_at = [&](int k, long idx) {
    const long last = scores.curve_count + scores.lag_span[size_t(k)];
    if (idx <= last) return scores.at(k, int(idx));
    return scores.forecast_ext[size_t(k)][idx - last - 1];
  };
  std::vector<VectorXd> out;
  out.reserve(size_t(steps));
  for (long p = 1; p <= steps; ++p)
    out.push_back(compose_curve(mean, bank, scores.curve_count + p, score_at));
  return out;
}

void CurveBand::validate() const {
  const long g = t.size();
  require(center.size() == g && lower.size() == g && upper.size() == g,
          ErrorCode::dimension_mismatch, "CurveBand: field length mismatch");
  for (long i = 0; i < g; ++i)
    require(lower[i] <= center[i] && center[i] <= upper[i],
            ErrorCode::invalid_argument,
            "CurveBand: quantiles do not bracket the center");
}

std::vector<CurveBand> credible_bands(const ScoreSet& scores,
                                      const std::vector<ArModel>& models,
                                      const FilterBank& bank,
                                      const VectorXd& mean, double sigma2,
                                      const BandRequest& req) {
  check_bank_scores(bank, scores, mean);
  require(req.level > 0.0 && req.level < 1.0, ErrorCode::invalid_argument,
          "credible_bands: level outside (0,1)");
  require(req.draws >= 2, ErrorCode::invalid_argument,
          "credible_bands: need at least 2 draws");
  require(sigma2 >= 0.0, ErrorCode::invalid_argument,
          "credible_bands: negative noise variance");
  require(scores.joint_cov.has_value(), ErrorCode::invalid_argument,
          "credible_bands: posterior covariance required");
  const bool fc = req.target == BandTarget::forecast;
  if (fc) {
    require(req.horizon >= 1, ErrorCode::invalid_argument,
            "credible_bands: forecast horizon must be positive");
    require(int(models.size()) == scores.component_count(),
            ErrorCode::dimension_mismatch,
            "credible_bands: one AR model per component required");
  }

  const int K = scores.component_count();
  const long dim = scores.stacked_dim();
  const long G = bank.grid.size();
  const int S = req.draws;

  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(*scores.joint_cov);
  require(eig.info() == Eigen::Success, ErrorCode::numeric,
          "credible_bands: covariance eigendecomposition failed");
  MatrixXd root = eig.eigenvectors() *
                  eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                  eig.eigenvectors().transpose();

  VectorXd stacked_mean(dim);
  for (int k = 0; k < K; ++k)
    stacked_mean.segment(scores.block_offset(k), scores.xi[size_t(k)].size()) =
        scores.xi[size_t(k)];

  // per-draw streams stay live: score normals first, then AR innovations
  std::vector<RngStream> streams;
  streams.reserve(size_t(S));
  MatrixXd z(dim, S);
  for (int s = 0; s < S; ++s) {
    streams.emplace_back(req.seed, 4000 + uint64_t(s));
    for (long i = 0; i < dim; ++i) z(i, s) = streams.back().next_normal();
  }
  MatrixXd samples = root * z;
  samples.colwise() += stacked_mean;

  std::vector<MatrixXd> ext(static_cast<size_t>(K));       // draw paths, S x horizon
  std::vector<VectorXd> ext_mean(static_cast<size_t>(K));  // conditional-mean extension
  if (fc) {
    for (int k = 0; k < K; ++k) {
      ext[size_t(k)].resize(S, req.horizon);
      ext_mean[size_t(k)] =
          ar_extend(models[size_t(k)], scores.xi[size_t(k)], req.horizon);
    }
    for (int s = 0; s < S; ++s)
      for (int k = 0; k < K; ++k) {
        VectorXd hist = samples.col(s).segment(scores.block_offset(k),
                                               scores.xi[size_t(k)].size());
        ext[size_t(k)].row(s) =
            ar_extend_noisy(models[size_t(k)], hist, req.horizon, streams[size_t(s)])
                .transpose();
      }
  }

  auto mean_at = [&](int k, long idx) {
    const long last = scores.curve_count + scores.lag_span[size_t(k)];
    if (idx <= last) return scores.at(k, int(idx));
    return ext_mean[size_t(k)][idx - last - 1];
  };
  auto draw_at = [&](int s, int k, long idx) {
    const long last = scores.curve_count + scores.lag_span[size_t(k)];
    if (idx <= last)
      return samples(scores.block_offset(k) + idx - 1 + scores.lag_span[size_t(k)],
                     s);
    return ext[size_t(k)](s, int(idx - last - 1));
  };

  const long first = fc ? scores.curve_count + 1 : 1;
  const long count = fc ? req.horizon : scores.curve_count;
  const double alpha = 1.0 - req.level;
  const double sd = std::sqrt(sigma2);

  std::vector<CurveBand> out;
  out.reserve(size_t(count));
  MatrixXd buffer(S, G);
  for (long pos = first; pos < first + count; ++pos) {
    for (int s = 0; s < S; ++s)
      buffer.row(s) = compose_curve(mean, bank, pos, [&](int k, long idx) {
                        return draw_at(s, k, idx);
                      }).transpose();
    if (req.observation_noise) {
      RngStream noise(req.seed, 5000 + uint64_t(pos));
      for (int s = 0; s < S; ++s)
        for (long g = 0; g < G; ++g) buffer(s, g) += sd * noise.next_normal();
    }

    CurveBand band;
    band.series_index = pos;
    band.t = Eigen::Map<const VectorXd>(bank.grid.points().data(), G);
    band.center = compose_curve(mean, bank, pos, mean_at);
    band.lower.resize(G);
    band.upper.resize(G);
    std::vector<double> column(static_cast<size_t>(S));
    for (long g = 0; g < G; ++g) {
      for (int s = 0; s < S; ++s) column[size_t(s)] = buffer(s, g);
      std::sort(column.begin(), column.end());
      band.lower[g] =
          std::min(quantile_sorted(column, alpha / 2.0), band.center[g]);
      band.upper[g] =
          std::max(quantile_sorted(column, 1.0 - alpha / 2.0), band.center[g]);
    }
    band.validate();
    out.push_back(std::move(band));
  }
  return out;
}

}  // namespace pada
