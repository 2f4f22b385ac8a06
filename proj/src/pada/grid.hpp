#pragma once

#include <vector>

#include "pada/common.hpp"

namespace pada {

// Evaluation grid on [0,1]. All L2 inner products and norms in the library
// use the trapezoid weights attached here, so every energy bookkeeping
// identity holds under one quadrature convention.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> points);
  static TimeGrid uniform(int size);

  int size() const { return int(pts_.size()); }
  double point(int i) const { return pts_[i]; }
  const std::vector<double>& points() const { return pts_; }
  const std::vector<double>& weights() const { return w_; }
  double spacing() const;  // uniform grids only

  VectorXd weights_vec() const;

 private:
  std::vector<double> pts_;
  std::vector<double> w_;
};

// Symmetric frequency grid omega_i = i*pi/s for i = -s..s. Trapezoid weights
// give the endpoints +-pi half weight, so the weights sum to 2*pi exactly and
// filter synthesis aliases with period 2s.
class FrequencyGrid {
 public:
  explicit FrequencyGrid(int half_size);

  int half_size() const { return s_; }
  int size() const { return 2 * s_ + 1; }
  double point(int i) const { return pts_[i]; }  // i = 0..2s maps to -s..s
  const std::vector<double>& points() const { return pts_; }
  const std::vector<double>& weights() const { return w_; }
  double spacing() const { return kPi / s_; }
  // index of -omega_i
  int reflect(int i) const { return 2 * s_ - i; }
  int zero_index() const { return s_; }

 private:
  int s_;
  std::vector<double> pts_;
  std::vector<double> w_;
};

double l2_inner(const VectorXd& f, const VectorXd& g, const TimeGrid& grid);
// conjugate-linear in the first argument
cplx l2_inner(const VectorXcd& f, const VectorXcd& g, const TimeGrid& grid);
double l2_norm(const VectorXd& f, const TimeGrid& grid);
double l2_norm(const VectorXcd& f, const TimeGrid& grid);

// piecewise-linear evaluation of grid samples at an arbitrary t in [0,1]
double interp_linear(const TimeGrid& grid, const VectorXd& values, double t);

// Orthonormal Fourier basis on [0,1]: index 0 is the constant, odd index
// 2q-1 is sqrt(2)cos(2 pi q t), even index 2q is sqrt(2)sin(2 pi q t).
double fourier_basis_at(int index, double t);
VectorXd fourier_basis(const TimeGrid& grid, int index);

}  // namespace pada
