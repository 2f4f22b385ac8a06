#include "pada/config.hpp"

namespace pada {

void ModelConfig::validate() const {
  require(grid_size >= 2, ErrorCode::invalid_argument,
          "config: grid_size must be >= 2");
  require(freq_half >= 1, ErrorCode::invalid_argument,
          "config: freq_half must be >= 1");
  if (bandwidth_mu)
    require(*bandwidth_mu > 0.0, ErrorCode::invalid_argument,
            "config: bandwidth_mu must be positive");
  if (bandwidth_f)
    require(*bandwidth_f > 0.0, ErrorCode::invalid_argument,
            "config: bandwidth_f must be positive");
  if (lag_window)
    require(*lag_window >= 1, ErrorCode::invalid_argument,
            "config: lag_window must be >= 1");
  if (components)
    require(*components >= 1, ErrorCode::invalid_argument,
            "config: components must be >= 1");
  require(fve > 0.0 && fve <= 1.0, ErrorCode::invalid_argument,
          "config: fve must lie in (0,1]");
  require(max_components >= 1, ErrorCode::invalid_argument,
          "config: max_components must be >= 1");
  require(epsilon_l > 0.0 && epsilon_l < 1.0, ErrorCode::invalid_argument,
          "config: epsilon_l must lie in (0,1)");
  require(phase_restarts >= 0, ErrorCode::invalid_argument,
          "config: phase_restarts must be >= 0");
  require(phase_max_iter >= 1 && map_max_iter >= 1,
          ErrorCode::invalid_argument, "config: iteration caps must be >= 1");
  require(phase_tol > 0.0 && map_tol > 0.0, ErrorCode::invalid_argument,
          "config: tolerances must be positive");
  require(posterior_dim_guard >= 1, ErrorCode::invalid_argument,
          "config: posterior_dim_guard must be >= 1");
  require(ar_max_order >= 0, ErrorCode::invalid_argument,
          "config: ar_max_order must be >= 0");
  require(band_draws >= 2, ErrorCode::invalid_argument,
          "config: band_draws must be >= 2");
  require(threads >= 0, ErrorCode::invalid_argument,
          "config: threads must be >= 0");
}

}  // namespace pada
