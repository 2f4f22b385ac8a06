#include "pada/grid.hpp"

#include <algorithm>
#include <cmath>

namespace pada {

TimeGrid::TimeGrid(std::vector<double> points) : pts_(std::move(points)) {
  require(pts_.size() >= 2, ErrorCode::invalid_argument,
          "TimeGrid: need at least 2 points");
  for (size_t i = 0; i < pts_.size(); ++i) {
    require(pts_[i] >= 0.0 && pts_[i] <= 1.0, ErrorCode::invalid_argument,
            "TimeGrid: points must lie in [0,1]");
    if (i > 0)
      require(pts_[i] > pts_[i - 1], ErrorCode::invalid_argument,
              "TimeGrid: points must be strictly increasing");
  }
  size_t n = pts_.size();
  w_.assign(n, 0.0);
  for (size_t i = 0; i + 1 < n; ++i) {
    double h = 0.5 * (pts_[i + 1] - pts_[i]);
    w_[i] += h;
    w_[i + 1] += h;
  }
}

TimeGrid TimeGrid::uniform(int size) {
  require(size >= 2, ErrorCode::invalid_argument,
          "TimeGrid::uniform: need at least 2 points");
  std::vector<double> p(size);
  for (int i = 0; i < size; ++i) p[i] = double(i) / double(size - 1);
  p.back() = 1.0;
  return TimeGrid(std::move(p));
}

double TimeGrid::spacing() const {
  double h = pts_[1] - pts_[0];
  for (size_t i = 1; i + 1 < pts_.size(); ++i)
    require(std::abs((pts_[i + 1] - pts_[i]) - h) < 1e-12,
            ErrorCode::invalid_argument, "TimeGrid::spacing: grid not uniform");
  return h;
}

VectorXd TimeGrid::weights_vec() const {
  return Eigen::Map<const VectorXd>(w_.data(), long(w_.size()));
}

FrequencyGrid::FrequencyGrid(int half_size) : s_(half_size) {
  require(s_ >= 1, ErrorCode::invalid_argument,
          "FrequencyGrid: half size must be >= 1");
  int n = 2 * s_ + 1;
  pts_.resize(n);
  for (int i = 0; i < n; ++i) pts_[i] = double(i - s_) * (kPi / s_);
  double dw = kPi / s_;
  w_.assign(n, dw);
  w_.front() = 0.5 * dw;
  w_.back() = 0.5 * dw;
}

double l2_inner(const VectorXd& f, const VectorXd& g, const TimeGrid& grid) {
  require(f.size() == grid.size() && g.size() == grid.size(),
          ErrorCode::dimension_mismatch, "l2_inner: size mismatch with grid");
  double acc = 0.0;
  for (int i = 0; i < grid.size(); ++i) acc += grid.weights()[i] * f[i] * g[i];
  return acc;
}

cplx l2_inner(const VectorXcd& f, const VectorXcd& g, const TimeGrid& grid) {
  require(f.size() == grid.size() && g.size() == grid.size(),
          ErrorCode::dimension_mismatch, "l2_inner: size mismatch with grid");
  cplx acc = 0.0;
  for (int i = 0; i < grid.size(); ++i)
    acc += grid.weights()[i] * std::conj(f[i]) * g[i];
  return acc;
}

double l2_norm(const VectorXd& f, const TimeGrid& grid) {
  return std::sqrt(std::max(0.0, l2_inner(f, f, grid)));
}

double l2_norm(const VectorXcd& f, const TimeGrid& grid) {
  return std::sqrt(std::max(0.0, l2_inner(f, f, grid).real()));
}

double fourier_basis_at(int index, double t) {
  require(index >= 0, ErrorCode::invalid_argument,
          "fourier_basis_at: index must be nonnegative");
  if (index == 0) return 1.0;
  const double root2 = std::sqrt(2.0);
  int q = (index + 1) / 2;
  double ang = kTwoPi * q * t;
  return index % 2 == 1 ? root2 * std::cos(ang) : root2 * std::sin(ang);
}

VectorXd fourier_basis(const TimeGrid& grid, int index) {
  VectorXd out(grid.size());
  for (int i = 0; i < grid.size(); ++i)
    out[i] = fourier_basis_at(index, grid.point(i));
  return out;
}

double interp_linear(const TimeGrid& grid, const VectorXd& values, double t) {
  require(values.size() == grid.size(), ErrorCode::dimension_mismatch,
          "interp_linear: size mismatch with grid");
  const auto& p = grid.points();
  if (t <= p.front()) return values[0];
  if (t >= p.back()) return values[grid.size() - 1];
  auto it = std::upper_bound(p.begin(), p.end(), t);
  int hi = int(it - p.begin());
  int lo = hi - 1;
  double u = (t - p[lo]) / (p[hi] - p[lo]);
  return (1.0 - u) * values[lo] + u * values[hi];
}

}  // namespace pada
