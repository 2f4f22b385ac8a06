#pragma once

#include <vector>

#include "pada/common.hpp"
#include "pada/rng.hpp"

namespace pada {

// Zero-mean autoregression fitted by Yule-Walker. Score series are centered
// by construction, so no intercept is carried and iterated forecasts decay
// toward zero.
struct ArModel {
  int order = 0;
  VectorXd coefficients;  // a_1..a_p
  double innovation_variance = 0.0;

  void validate() const;
};

// companion-matrix spectral radius < 1
bool ar_stationary(const VectorXd& coefficients);

// Yule-Walker fits for p = 0..max_order, AIC selection; non-stationary fits
// are dropped, leaving white noise (order 0) as the worst case.
ArModel fit_ar(const VectorXd& xi, int max_order);

// Iterated conditional-mean extension by `steps`. Lags reaching before the
// start of the history read as 0.
VectorXd ar_extend(const ArModel& model, const VectorXd& history, int steps);

// Sample-path extension: one innovation draw per step.
VectorXd ar_extend_noisy(const ArModel& model, const VectorXd& history,
                         int steps, RngStream& rng);

// Zero-mean vector autoregression, rows of the panel are time steps.
struct VarModel {
  int order = 0;
  std::vector<MatrixXd> coefficients;  // A_1..A_p
  MatrixXd innovation_covariance;

  void validate() const;
};

bool var_stationary(const std::vector<MatrixXd>& coefficients);

// Multivariate Yule-Walker with AIC order selection; a singular block
// Toeplitz system gets a 1e-8 ridge. One column reduces to fit_ar.
VarModel fit_var(const MatrixXd& xi, int max_order);

MatrixXd var_extend(const VarModel& model, const MatrixXd& history, int steps);

}  // namespace pada
