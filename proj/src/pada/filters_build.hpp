#pragma once

#include <vector>

#include "pada/config.hpp"
#include "pada/eigensystem.hpp"
#include "pada/filter_bank.hpp"

namespace pada {

// Synthesize functional filters from an aligned eigensystem and one gauge
// vector per component: phi_l(t) = (1/2pi) sum_w u_w nu(w) psi(t|w) e^{+ilw}.
// The +ilw kernel pairs with eigenvectors acting on the second kernel
// argument, so phi_l multiplies the score at series index j + l.
// The lag window is re-centered on the max-norm filter, grown symmetrically
// until retained energy reaches 1 - cfg.epsilon_l, then renormalized to unit
// retained energy.
FilterBank build_filters(const EigenSystem& es,
                         const std::vector<VectorXcd>& phases,
                         const ModelConfig& cfg);

}  // namespace pada
