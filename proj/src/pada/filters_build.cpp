#include "pada/filters_build.hpp"

#include <cmath>

namespace pada {

FilterBank build_filters(const EigenSystem& es,
                         const std::vector<VectorXcd>& phases,
                         const ModelConfig& cfg) {
  es.validate();
  require(int(phases.size()) == es.components, ErrorCode::dimension_mismatch,
          "build_filters: one gauge vector per component required");
  const int G = es.grid.size();
  const int F = es.freqs.size();
  const int S = es.freqs.half_size();
  // filters are 2S-periodic in the lag on this grid; (-S, S] is one period
  const int period = 2 * S;
  const int hard_cap = S / 2;

  FilterBank bank(es.grid, es.freqs);
  for (int k = 0; k < es.components; ++k) {
    require(phases[size_t(k)].size() == F, ErrorCode::dimension_mismatch,
            "build_filters: gauge vector does not match frequency grid");
    MatrixXcd psi(G, F);
    VectorXcd coef(F);
    for (int i = 0; i < F; ++i) {
      psi.col(i) = es.functions[size_t(i)].col(k);
      coef[i] = es.freqs.weights()[size_t(i)] * phases[size_t(k)][i];
    }

    std::vector<VectorXd> period_filters(static_cast<size_t>(period));
    std::vector<double> norms(static_cast<size_t>(period));
    double residue = 0.0;
    for (int l = -S + 1; l <= S; ++l) {
      VectorXcd rot(F);
      for (int i = 0; i < F; ++i) {
        double ang = double(l) * es.freqs.points()[size_t(i)];
        rot[i] = coef[i] * cplx(std::cos(ang), std::sin(ang));
      }
      VectorXcd phi = (psi * rot) / kTwoPi;
      residue = std::max(residue, phi.imag().cwiseAbs().maxCoeff());
      size_t p = size_t(l + S - 1);
      period_filters[p] = phi.real();
      norms[p] = l2_norm(period_filters[p], es.grid);
    }
    require(residue < 1e-6, ErrorCode::numeric,
            "build_filters: filters are not real, conjugate symmetry of the "
            "eigensystem or gauge is broken");

    // smallest lag wins ties, scanning one full period
    int best_lag = -S + 1;
    double best_norm = norms[0];
    for (int l = -S + 2; l <= S; ++l)
      if (norms[size_t(l + S - 1)] > best_norm) {
        best_norm = norms[size_t(l + S - 1)];
        best_lag = l;
      }

    // shifted lag m reads the periodic array at m + best_lag
    auto at_shifted = [&](int m) -> size_t {
      int l = m + best_lag;
      while (l <= -S) l += period;
      while (l > S) l -= period;
      return size_t(l + S - 1);
    };

    int lag_span = 0;
    double energy = norms[at_shifted(0)] * norms[at_shifted(0)];
    while (energy < 1.0 - cfg.epsilon_l) {
      ++lag_span;
      require(lag_span <= hard_cap, ErrorCode::numeric,
              "build_filters: lag window exceeded the hard cap, gauge "
              "optimization failed to concentrate filter energy");
      energy += norms[at_shifted(lag_span)] * norms[at_shifted(lag_span)] +
                norms[at_shifted(-lag_span)] * norms[at_shifted(-lag_span)];
    }

    const double rescale = 1.0 / std::sqrt(energy);
    FilterComponent comp;
    comp.lag_min = -lag_span;
    comp.filters.resize(G, 2 * lag_span + 1);
    for (int m = -lag_span; m <= lag_span; ++m)
      comp.filters.col(m + lag_span) = period_filters[at_shifted(m)] * rescale;
    comp.phase = phases[size_t(k)];
    comp.spectrum = es.spectrum(k);
    comp.sup_norm = norms[at_shifted(0)] * rescale;
    bank.comps.push_back(std::move(comp));
  }
  return bank;
}

}  // namespace pada
