#pragma once

#include <cstdint>
#include <optional>

#include "pada/common.hpp"

namespace pada {

// Statistical and numerical knobs for one fit. Optional fields are derived
// from the data when unset (bandwidths by cross-validation, lag window by the
// J^(1/3) rule, component count by fraction of variance explained).
struct ModelConfig {
  int grid_size = 51;
  int freq_half = 64;  // frequency grid is 2*freq_half + 1 points on [-pi,pi]

  std::optional<double> bandwidth_mu;
  std::optional<double> bandwidth_f;  // default couples to 1.5 * bandwidth_mu
  std::optional<int> lag_window;
  std::optional<int> components;
  double fve = 0.85;
  int max_components = 8;

  double epsilon_l = 0.2;  // allowed energy loss when truncating filter lags

  bool optimize_phase = true;  // false keeps the alignment gauge nu == 1
  int phase_restarts = 4;
  int phase_max_iter = 2000;
  double phase_tol = 1e-9;

  int map_max_iter = 5000;
  double map_tol = 1e-8;
  long posterior_dim_guard = 20000;

  int ar_max_order = 10;
  int band_draws = 1000;

  uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

}  // namespace pada
