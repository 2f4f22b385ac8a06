#include "pada/simulate.hpp"

#include <cmath>

#include "pada/rng.hpp"

namespace pada {

void SimSpec::validate() const {
  require(curve_count >= 2, ErrorCode::invalid_argument,
          "SimSpec: need at least 2 curves");
  require(future_count >= 0, ErrorCode::invalid_argument,
          "SimSpec: negative future count");
  require(n_min >= 1 && n_min <= n_max && n_max <= grid_size,
          ErrorCode::invalid_argument,
          "SimSpec: observation count range outside [1, grid_size]");
  require(grid_size >= 2, ErrorCode::invalid_argument,
          "SimSpec: grid too small");
  require(freq_half >= 1, ErrorCode::invalid_argument,
          "SimSpec: frequency half-size must be positive");
  require(std::abs(rho) < 1.0, ErrorCode::invalid_argument,
          "SimSpec: AR coefficient must be inside the unit circle");
}

VectorXd sim_lag_weights(int lag_one_sided) {
  require(lag_one_sided >= 0, ErrorCode::invalid_argument,
          "sim_lag_weights: negative lag span");
  const int L = lag_one_sided;
  VectorXd raw(2 * L + 1);
  for (int l = -L; l <= L; ++l) raw[l + L] = std::exp(-std::abs(l) / 2.0);
  return (raw / raw.sum()).cwiseSqrt();
}

double sim_score_variance(const SimSpec& spec, int k) {
  require(k >= 1 && k <= spec.component_count(), ErrorCode::invalid_argument,
          "sim_score_variance: component out of range");
  return (1.0 / k) / (1.0 - spec.rho * spec.rho);
}

namespace {

// AR(1) score spectral density of component k (1-based)
double score_density(const SimSpec& spec, int k, double w) {
  const double denom = 1.0 - 2.0 * spec.rho * std::cos(w) + spec.rho * spec.rho;
  return (1.0 / k) / (kTwoPi * denom);
}

// sequential Fourier basis assignment across (k,l) pairs
int pair_basis_index(const SimSpec& spec, int k, int l) {
  const int L = spec.lag_one_sided();
  return (k - 1) * (2 * L + 1) + (l + L);
}

}  // namespace

SimTruth generate(const SimSpec& spec) {
  spec.validate();
  TimeGrid grid = TimeGrid::uniform(spec.grid_size);
  FrequencyGrid freqs(spec.freq_half);
  const int K = spec.component_count();
  const int L = spec.lag_one_sided();
  const int total = spec.curve_count + spec.future_count;
  const VectorXd w = sim_lag_weights(L);

  // scores: one stream per component, 200-step stationary burn-in
  ScoreSet scores;
  scores.curve_count = total;
  for (int k = 1; k <= K; ++k) {
    RngStream rng(spec.seed, uint64_t(k));
    const double sd = std::sqrt(1.0 / k);
    double state = 0.0;
    for (int b = 0; b < 200; ++b) state = spec.rho * state + sd * rng.next_normal();
    VectorXd xi(total + 2 * L);
    for (long i = 0; i < xi.size(); ++i) {
      state = spec.rho * state + sd * rng.next_normal();
      xi[i] = state;
    }
    scores.lag_span.push_back(L);
    scores.xi.push_back(std::move(xi));
  }

  FilterBank bank(grid, freqs);
  for (int k = 1; k <= K; ++k) {
    FilterComponent comp;
    comp.lag_min = -L;
    comp.filters.resize(grid.size(), 2 * L + 1);
    for (int l = -L; l <= L; ++l)
      comp.filters.col(l + L) =
          w[l + L] * fourier_basis(grid, pair_basis_index(spec, k, l));
    comp.phase = VectorXcd::Ones(freqs.size());
    comp.spectrum.resize(freqs.size());
    for (int i = 0; i < freqs.size(); ++i)
      comp.spectrum[i] = score_density(spec, k, freqs.point(i));
    comp.sup_norm = w[L];
    bank.comps.push_back(std::move(comp));
  }

  // curves assembled directly from the expansion (reconstruct() is the
  // independent path the tests cross-check against)
  std::vector<VectorXd> curves;
  curves.reserve(size_t(total));
  for (long j = 1; j <= total; ++j) {
    VectorXd c = VectorXd::Zero(grid.size());
    for (int k = 1; k <= K; ++k)
      for (int l = -L; l <= L; ++l)
        c += bank.comps[size_t(k - 1)].filters.col(l + L) *
             scores.xi[size_t(k - 1)][j - 1 + l + L];
    curves.push_back(std::move(c));
  }

  double signal_power = 0.0;
  for (int k = 1; k <= K; ++k) signal_power += sim_score_variance(spec, k);
  const double noise_variance = signal_power / 10.0;
  const double noise_sd = std::sqrt(noise_variance);

  FtsDataset data;
  for (long j = 1; j <= total; ++j) {
    RngStream times_rng(spec.seed, 1000 + uint64_t(j));
    RngStream noise_rng(spec.seed, 2000 + uint64_t(j));
    const int nj =
        spec.n_min + int(times_rng.next_below(uint64_t(spec.n_max - spec.n_min + 1)));
    std::vector<int> idx = times_rng.sample_without_replacement(spec.grid_size, nj);
    SampledCurve sc;
    for (int z = 0; z < nj; ++z) {
      sc.times.push_back(grid.point(idx[size_t(z)]));
      sc.values.push_back(curves[size_t(j - 1)][idx[size_t(z)]] +
                          noise_sd * noise_rng.next_normal());
    }
    data.curves.push_back(std::move(sc));
  }
  data.validate();
  scores.validate();

  return SimTruth{std::move(grid), std::move(bank),   std::move(scores),
                  std::move(curves), std::move(data), signal_power,
                  noise_variance};
}

SpectralDensity population_spectral_density(const SimSpec& spec,
                                            const TimeGrid& grid,
                                            const FrequencyGrid& freqs) {
  spec.validate();
  const int K = spec.component_count();
  const int L = spec.lag_one_sided();
  const VectorXd w = sim_lag_weights(L);

  std::vector<VectorXd> basis;
  for (int k = 1; k <= K; ++k)
    for (int l = -L; l <= L; ++l)
      basis.push_back(fourier_basis(grid, pair_basis_index(spec, k, l)));

  SpectralDensity sd(grid, freqs);
  for (int i = 0; i < freqs.size(); ++i) {
    const double omega = freqs.point(i);
    for (int k = 1; k <= K; ++k) {
      VectorXcd a = VectorXcd::Zero(grid.size());
      for (int l = -L; l <= L; ++l)
        a += w[l + L] * std::exp(cplx(0.0, -l * omega)) *
             basis[size_t((k - 1) * (2 * L + 1) + (l + L))];
      sd.slice(i) += score_density(spec, k, omega) * (a * a.adjoint());
    }
  }
  return sd;
}

}  // namespace pada
