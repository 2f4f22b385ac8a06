#pragma once

#include <vector>

#include "pada/ar.hpp"
#include "pada/filter_bank.hpp"

namespace pada {

// X_j(t) = mu(t) + sum_k sum_{|l|<=L_k} phi_kl(t) xi_{(j+l)k} for j = 1..J.
std::vector<VectorXd> reconstruct(const VectorXd& mean, const FilterBank& bank,
                                  const ScoreSet& scores);

// Extends every score series `steps` beyond its last stored position by
// iterated AR prediction (filling scores.forecast_ext), then assembles the
// curves X_{J+1}..X_{J+steps}. Lag terms past the horizon land inside the
// extension because position J+p+l never exceeds J+L_k+steps.
std::vector<VectorXd> forecast(const FilterBank& bank, ScoreSet& scores,
                               const std::vector<ArModel>& models, int steps,
                               const VectorXd& mean);

struct CurveBand {
  long series_index = 0;  // 1-based curve position, J+p for forecasts
  VectorXd t;
  VectorXd center;
  VectorXd lower;
  VectorXd upper;

  void validate() const;
};

enum class BandTarget { reconstruction, forecast };

struct BandRequest {
  BandTarget target = BandTarget::reconstruction;
  int horizon = 0;  // forecast steps; ignored for reconstruction
  double level = 0.95;
  int draws = 1000;
  // sample Y = X + noise instead of the latent X
  bool observation_noise = false;
  uint64_t seed = 1;
};

// Pointwise credible bands from the exact Gaussian score posterior
// (scores.joint_cov required). Forecast targets propagate each draw through
// the fitted AR with innovation noise; parameter estimates are held fixed.
std::vector<CurveBand> credible_bands(const ScoreSet& scores,
                                      const std::vector<ArModel>& models,
                                      const FilterBank& bank,
                                      const VectorXd& mean, double sigma2,
                                      const BandRequest& req);

}  // namespace pada
