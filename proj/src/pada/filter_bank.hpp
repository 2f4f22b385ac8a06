#pragma once

#include <optional>
#include <vector>

#include "pada/grid.hpp"

namespace pada {

// Functional filters of one dynamic component: column c holds
// phi_{k,lag_min+c} sampled on the time grid. Scores pair with curves through
// the lag index, so re-indexing (shift_filter) must travel with the score
// series that consumes it.
struct FilterComponent {
  int lag_min = 0;
  MatrixXd filters;    // grid_size x lag count
  VectorXcd phase;     // gauge nu_k on the frequency grid
  VectorXd spectrum;   // eta_k on the frequency grid
  double sup_norm = 0.0;

  int lag_count() const { return int(filters.cols()); }
  int lag_max() const { return lag_min + lag_count() - 1; }
  // symmetric spans only; lag 0 must be a column
  int lag_span() const;
  const MatrixXd::ConstColXpr filter_at(int lag) const;

  double energy(const TimeGrid& grid) const;
  double max_filter_norm(const TimeGrid& grid) const;
};

// Shift every lag index by h. Same object, scores re-indexed the same way.
FilterComponent shift_filter(const FilterComponent& c, int h);

struct FilterBank {
  TimeGrid grid;
  FrequencyGrid freqs;
  std::vector<FilterComponent> comps;

  FilterBank(TimeGrid g, FrequencyGrid f)
      : grid(std::move(g)), freqs(std::move(f)) {}
  int component_count() const { return int(comps.size()); }
};

// Dynamic score series per component. xi[k] has length J + 2*L_k and covers
// series indices (1-L_k)..(J+L_k); entry for index j is xi[k][j-1+L_k].
struct ScoreSet {
  int curve_count = 0;
  std::vector<int> lag_span;
  std::vector<VectorXd> xi;
  // covariance of the stacked score vector (component blocks in order)
  std::optional<MatrixXd> joint_cov;
  // AR forecasts appended by the prediction stage, length P per component
  std::vector<VectorXd> forecast_ext;

  int component_count() const { return int(xi.size()); }
  long stacked_dim() const;
  long block_offset(int k) const;
  double at(int k, int series_index) const;
  void validate() const;
};

}  // namespace pada
