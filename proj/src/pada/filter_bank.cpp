#include "pada/filter_bank.hpp"

#include <cmath>

namespace pada {

int FilterComponent::lag_span() const {
  require(lag_min <= 0 && lag_max() == -lag_min, ErrorCode::invalid_argument,
          "FilterComponent: lag range is not symmetric about 0");
  return -lag_min;
}

const MatrixXd::ConstColXpr FilterComponent::filter_at(int lag) const {
  require(lag >= lag_min && lag <= lag_max(), ErrorCode::invalid_argument,
          "FilterComponent: lag outside stored range");
  return filters.col(lag - lag_min);
}

double FilterComponent::energy(const TimeGrid& grid) const {
  double acc = 0.0;
  for (int c = 0; c < filters.cols(); ++c) {
    VectorXd f = filters.col(c);
    acc += l2_inner(f, f, grid);
  }
  return acc;
}

double FilterComponent::max_filter_norm(const TimeGrid& grid) const {
  double best = 0.0;
  for (int c = 0; c < filters.cols(); ++c) {
    VectorXd f = filters.col(c);
    best = std::max(best, l2_norm(f, grid));
  }
  return best;
}

FilterComponent shift_filter(const FilterComponent& c, int h) {
  FilterComponent out = c;
  out.lag_min = c.lag_min + h;
  return out;
}

long ScoreSet::stacked_dim() const {
  long n = 0;
  for (const auto& v : xi) n += v.size();
  return n;
}

long ScoreSet::block_offset(int k) const {
  require(k >= 0 && k < component_count(), ErrorCode::invalid_argument,
          "ScoreSet: component index out of range");
  long off = 0;
  for (int i = 0; i < k; ++i) off += xi[size_t(i)].size();
  return off;
}

double ScoreSet::at(int k, int series_index) const {
  const VectorXd& v = xi[size_t(k)];
  int l = lag_span[size_t(k)];
  long pos = long(series_index) - 1 + l;
  require(pos >= 0 && pos < v.size(), ErrorCode::invalid_argument,
          "ScoreSet: series index outside stored range");
  return v[pos];
}

void ScoreSet::validate() const {
  require(xi.size() == lag_span.size(), ErrorCode::dimension_mismatch,
          "ScoreSet: per-component fields differ in length");
  for (size_t k = 0; k < xi.size(); ++k) {
    require(lag_span[k] >= 0, ErrorCode::invalid_argument,
            "ScoreSet: negative lag span");
    require(xi[k].size() == long(curve_count) + 2 * lag_span[k],
            ErrorCode::dimension_mismatch,
            "ScoreSet: score vector length != J + 2L");
  }
  if (joint_cov) {
    require(joint_cov->rows() == stacked_dim() &&
                joint_cov->cols() == stacked_dim(),
            ErrorCode::dimension_mismatch,
            "ScoreSet: covariance shape != stacked dimension");
  }
  if (!forecast_ext.empty())
    require(forecast_ext.size() == xi.size(), ErrorCode::dimension_mismatch,
            "ScoreSet: forecast extension count != component count");
}

}  // namespace pada
