#pragma once

#include <optional>
#include <vector>

#include "pada/config.hpp"
#include "pada/dataset.hpp"
#include "pada/filter_bank.hpp"
#include "pada/whittle.hpp"

namespace pada {

// Per-curve local design blocks: design[k][j] has entry (z, c) equal to
// phi_{k, -L_k + c}(t_jz). Curve j pairs with score positions
// j .. j + 2L_k of the 0-based score vector of length J + 2L_k.
struct DesignStack {
  int curve_count = 0;
  std::vector<int> lag_span;
  std::vector<VectorXd> ytilde;
  std::vector<std::vector<MatrixXd>> design;

  int component_count() const { return int(lag_span.size()); }
  int score_length(int k) const {
    return curve_count + 2 * lag_span[size_t(k)];
  }
  long stacked_dim() const;
  long block_offset(int k) const;
  void validate() const;
};

// mean_at_obs[j] holds the fitted mean at curve j's observation times.
DesignStack build_design_stack(const FtsDataset& data,
                               const std::vector<std::vector<double>>& mean_at_obs,
                               const FilterBank& bank);

// Gaussian log likelihood plus the Whittle log priors (additive constants
// included, so values are comparable across calls).
double log_posterior(const std::vector<VectorXd>& xis,
                     const DesignStack& stack, double sigma2,
                     const WhittleSpectrum& spec);

std::vector<VectorXd> posterior_gradient(const std::vector<VectorXd>& xis,
                                         const DesignStack& stack,
                                         double sigma2,
                                         const WhittleSpectrum& spec);

struct MapResult {
  std::vector<VectorXd> xi;
  std::vector<double> trace;  // nondecreasing log posterior values
  int iterations = 0;
  bool converged = false;
};

// Gradient ascent from zero scores with exact line search; the objective is
// a concave quadratic, so every accepted step increases it.
MapResult map_estimate(const DesignStack& stack, double sigma2,
                       const WhittleSpectrum& spec, const ModelConfig& cfg);

struct PosteriorSummary {
  int curve_count = 0;
  std::vector<int> lag_span;
  std::vector<VectorXd> mean;
  MatrixXd precision;  // stacked score precision, symmetric
  std::optional<MatrixXd> covariance;

  long stacked_dim() const;
  long block_offset(int k) const;
};

// The posterior is exactly Gaussian: precision = Gram/sigma2 + prior
// blocks, mean solves the normal equations. Covariance is computed only on
// request (dense inverse).
PosteriorSummary exact_posterior(const DesignStack& stack, double sigma2,
                                 const WhittleSpectrum& spec,
                                 const ModelConfig& cfg,
                                 bool want_covariance);

}  // namespace pada
