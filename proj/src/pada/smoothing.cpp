#include "pada/smoothing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace pada {

double kernel_weight(const KernelSpec& spec, double distance) {
  require(spec.bandwidth > 0.0, ErrorCode::invalid_argument,
          "kernel: bandwidth must be positive");
  double u = distance / spec.bandwidth;
  switch (spec.family) {
    case KernelFamily::epanechnikov: {
      double v = 1.0 - u * u;
      return v > 0.0 ? 0.75 * v : 0.0;
    }
  }
  return 0.0;
}

namespace {

constexpr int kMaxWidenings = 40;

struct PooledObs {
  std::vector<double> t, y, w;

  void push(double tt, double yy, double ww) {
    t.push_back(tt);
    y.push_back(yy);
    w.push_back(ww);
  }
  void sort_by_time() {
    std::vector<int> order(t.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return t[a] < t[b]; });
    PooledObs s;
    s.t.reserve(t.size());
    for (int i : order) s.push(t[i], y[i], w[i]);
    *this = std::move(s);
  }
};

PooledObs pool_observations(const FtsDataset& data, int skip_fold,
                            int fold_count) {
  PooledObs p;
  int j = 0;
  for (const auto& c : data.curves) {
    bool skip = skip_fold >= 0 && (j % fold_count) == skip_fold;
    ++j;
    if (skip) continue;
    double w = 1.0 / double(c.size());  // the global 1/J factor cancels
    for (int z = 0; z < c.size(); ++z) p.push(c.times[z], c.values[z], w);
  }
  return p;
}

// local linear fit at one point; widens the bandwidth on singular normal
// equations
double local_linear_at(const PooledObs& pool, const KernelSpec& spec, double t,
                       SmootherDiagnostics* diag) {
  if (pool.t.empty()) {
    if (diag) ++diag->empty_cells;
    return 0.0;
  }
  double b = spec.bandwidth;
  KernelSpec cur = spec;
  for (int attempt = 0; attempt <= kMaxWidenings; ++attempt) {
    cur.bandwidth = b;
    auto lo = std::lower_bound(pool.t.begin(), pool.t.end(), t - b);
    auto hi = std::upper_bound(pool.t.begin(), pool.t.end(), t + b);
    double a00 = 0, a01 = 0, a11 = 0, r0 = 0, r1 = 0;
    for (auto it = lo; it != hi; ++it) {
      int i = int(it - pool.t.begin());
      double u = (pool.t[i] - t) / b;
      double q = pool.w[i] * kernel_weight(cur, pool.t[i] - t);
      if (q <= 0.0) continue;
      a00 += q;
      a01 += q * u;
      a11 += q * u * u;
      r0 += q * pool.y[i];
      r1 += q * u * pool.y[i];
    }
    double det = a00 * a11 - a01 * a01;
    if (a00 > 0.0 && det > 1e-12 * a00 * a00) {
      if (diag) {
        if (attempt > 0) ++diag->widened_cells;
        diag->max_bandwidth_used = std::max(diag->max_bandwidth_used, b);
      }
      return (a11 * r0 - a01 * r1) / det;
    }
    b *= 2.0;
  }
  // everything is in support by now; fall back to the weighted mean
  double sw = 0, sy = 0;
  for (size_t i = 0; i < pool.t.size(); ++i) {
    sw += pool.w[i];
    sy += pool.w[i] * pool.y[i];
  }
  if (diag) ++diag->widened_cells;
  return sw > 0 ? sy / sw : 0.0;
}

}  // namespace

VectorXd estimate_mean(const FtsDataset& data, const KernelSpec& spec,
                       const TimeGrid& grid, SmootherDiagnostics* diag) {
  data.validate();
  PooledObs pool = pool_observations(data, -1, 1);
  double tmin = *std::min_element(pool.t.begin(), pool.t.end());
  double tmax = *std::max_element(pool.t.begin(), pool.t.end());
  require(tmax > tmin, ErrorCode::invalid_argument,
          "estimate_mean: need at least 2 distinct observation times");
  pool.sort_by_time();
  VectorXd mu(grid.size());
  for (int i = 0; i < grid.size(); ++i)
    mu[i] = local_linear_at(pool, spec, grid.point(i), diag);
  return mu;
}

std::vector<std::vector<double>> estimate_mean_at_observations(
    const FtsDataset& data, const KernelSpec& spec,
    SmootherDiagnostics* diag) {
  data.validate();
  PooledObs pool = pool_observations(data, -1, 1);
  pool.sort_by_time();
  std::vector<std::vector<double>> out(data.curves.size());
  for (size_t j = 0; j < data.curves.size(); ++j) {
    const auto& c = data.curves[j];
    out[j].resize(size_t(c.size()));
    for (int z = 0; z < c.size(); ++z)
      out[j][size_t(z)] = local_linear_at(pool, spec, c.times[z], diag);
  }
  return out;
}

double cv_bandwidth_mu(const FtsDataset& data, const TimeGrid& grid) {
  data.validate();
  const int folds = 5;
  double mean_n = double(data.observation_count()) / data.curve_count();
  double b0 = grid.spacing() * std::pow(mean_n, -0.2);
  std::vector<double> candidates(8);
  double ratio = std::pow(4.0 / 0.5, 1.0 / 7.0);
  for (int i = 0; i < 8; ++i)
    candidates[size_t(i)] = 0.5 * b0 * std::pow(ratio, i);

  std::vector<PooledObs> train_pools(folds);
  for (int f = 0; f < folds; ++f) {
    train_pools[size_t(f)] = pool_observations(data, f, folds);
    train_pools[size_t(f)].sort_by_time();
  }

  double best_b = candidates[0];
  double best_err = std::numeric_limits<double>::infinity();
  for (double b : candidates) {
    KernelSpec spec{KernelFamily::epanechnikov, b};
    double sse = 0.0, sw = 0.0;
    for (int j = 0; j < data.curve_count(); ++j) {
      const auto& c = data.curves[size_t(j)];
      const PooledObs& pool = train_pools[size_t(j % folds)];
      if (pool.t.empty()) continue;
      double w = 1.0 / double(c.size());
      for (int z = 0; z < c.size(); ++z) {
        double pred = local_linear_at(pool, spec, c.times[z], nullptr);
        double e = c.values[size_t(z)] - pred;
        sse += w * e * e;
        sw += w;
      }
    }
    double err = sw > 0 ? sse / sw : std::numeric_limits<double>::infinity();
    if (err < best_err - 1e-15) {
      best_err = err;
      best_b = b;
    }
  }
  return best_b;
}

const std::vector<RawCovProducts::Entry>& RawCovProducts::lag(int h) const {
  require(h >= -lag_window && h <= lag_window, ErrorCode::invalid_argument,
          "RawCovProducts: lag outside window");
  return lags[size_t(h + lag_window)];
}

std::vector<RawCovProducts::Entry>& RawCovProducts::lag(int h) {
  require(h >= -lag_window && h <= lag_window, ErrorCode::invalid_argument,
          "RawCovProducts: lag outside window");
  return lags[size_t(h + lag_window)];
}

RawCovProducts collect_cov_products(
    const FtsDataset& data, const std::vector<std::vector<double>>& mean_at_obs,
    int L) {
  data.validate();
  int J = data.curve_count();
  require(L >= 0 && L < J, ErrorCode::invalid_argument,
          "collect_cov_products: need 0 <= L < J");
  require(int(mean_at_obs.size()) == J, ErrorCode::dimension_mismatch,
          "collect_cov_products: mean values misaligned with data");
  for (int j = 0; j < J; ++j)
    require(int(mean_at_obs[size_t(j)].size()) == data.curves[size_t(j)].size(),
            ErrorCode::dimension_mismatch,
            "collect_cov_products: mean values misaligned with data");

  RawCovProducts out;
  out.curve_count = J;
  out.lag_window = L;
  out.lags.assign(size_t(2 * L + 1), {});
  out.pair_counts.assign(size_t(2 * L + 1), {});

  for (int h = -L; h <= L; ++h) {
    auto& list = out.lag(h);
    auto& counts = out.pair_counts[size_t(h + L)];
    int jlo = std::max(1, 1 - h), jhi = std::min(J, J - h);
    for (int j = jlo; j <= jhi; ++j) {
      const auto& ca = data.curves[size_t(j + h - 1)];
      const auto& cb = data.curves[size_t(j - 1)];
      long m = (h != 0) ? long(ca.size()) * cb.size()
                        : long(cb.size()) * (cb.size() - 1);
      counts.push_back(m);
      if (m <= 0) continue;
      double w = 1.0 / (double(J - std::abs(h)) * double(m));
      const auto& ma = mean_at_obs[size_t(j + h - 1)];
      const auto& mb = mean_at_obs[size_t(j - 1)];
      for (int z1 = 0; z1 < ca.size(); ++z1) {
        double da = ca.values[size_t(z1)] - ma[size_t(z1)];
        for (int z2 = 0; z2 < cb.size(); ++z2) {
          if (h == 0 && z1 == z2) continue;
          double db = cb.values[size_t(z2)] - mb[size_t(z2)];
          list.push_back(
              {ca.times[size_t(z1)], cb.times[size_t(z2)], da * db, w});
        }
      }
    }
  }
  return out;
}

namespace {

// symmetric 3x3 accumulator stored as the lower triangle
struct Cell3 {
  double a00 = 0, a10 = 0, a11 = 0, a20 = 0, a21 = 0, a22 = 0;
};

bool solve_row0(const Cell3& c, std::array<double, 3>& row0) {
  Eigen::Matrix3d a;
  a << c.a00, c.a10, c.a20, c.a10, c.a11, c.a21, c.a20, c.a21, c.a22;
  double det = a.determinant();
  if (!(c.a00 > 0.0) || std::abs(det) <= 1e-12 * std::pow(c.a00, 3)) return false;
  Eigen::Matrix3d inv = a.inverse();
  row0 = {inv(0, 0), inv(0, 1), inv(0, 2)};
  return true;
}

struct GridWindow {
  int lo, hi;  // half open
};

GridWindow window(const std::vector<double>& pts, double center, double b) {
  auto lo = std::lower_bound(pts.begin(), pts.end(), center - b);
  auto hi = std::upper_bound(pts.begin(), pts.end(), center + b);
  return {int(lo - pts.begin()), int(hi - pts.begin())};
}

}  // namespace

SpectralDensity estimate_spectral_density(const RawCovProducts& prod,
                                          const KernelSpec& spec,
                                          const TimeGrid& grid,
                                          const FrequencyGrid& freqs, int L,
                                          SmootherDiagnostics* diag) {
  require(L == prod.lag_window, ErrorCode::invalid_argument,
          "estimate_spectral_density: L must match the collected lag window");
  require(L >= 1, ErrorCode::invalid_argument,
          "estimate_spectral_density: need L >= 1");
  const int G = grid.size();
  const int S = freqs.half_size();
  const auto& pts = grid.points();

  auto bartlett = [&](int h) { return 1.0 - double(std::abs(h)) / L; };

  // omega-independent normal matrices and per-lag moment vectors; the design
  // is shared by every frequency, so assembly runs once over the products
  const double B = spec.bandwidth;
  std::vector<Cell3> acc(size_t(G) * G);
  std::vector<double> moments(size_t(G) * G * size_t(2 * L + 1) * 3, 0.0);
  auto mom = [&](int cell, int hidx) -> double* {
    return &moments[(size_t(cell) * size_t(2 * L + 1) + size_t(hidx)) * 3];
  };

  for (int h = -L; h <= L; ++h) {
    double wh = bartlett(h);
    if (wh <= 0.0) continue;
    int hidx = h + L;
    for (const auto& e : prod.lag(h)) {
      GridWindow wa = window(pts, e.t1, B);
      GridWindow wb = window(pts, e.t2, B);
      double base = wh * e.weight;
      for (int a = wa.lo; a < wa.hi; ++a) {
        double u1 = (e.t1 - pts[size_t(a)]) / B;
        double k1 = kernel_weight(spec, e.t1 - pts[size_t(a)]);
        if (k1 <= 0.0) continue;
        for (int b = wb.lo; b < wb.hi; ++b) {
          double k2 = kernel_weight(spec, e.t2 - pts[size_t(b)]);
          if (k2 <= 0.0) continue;
          double u2 = (e.t2 - pts[size_t(b)]) / B;
          double q = base * k1 * k2;
          int cell = a * G + b;
          Cell3& c = acc[size_t(cell)];
          c.a00 += q;
          c.a10 += q * u1;
          c.a11 += q * u1 * u1;
          c.a20 += q * u2;
          c.a21 += q * u1 * u2;
          c.a22 += q * u2 * u2;
          double* m = mom(cell, hidx);
          double qv = q * e.value;
          m[0] += qv;
          m[1] += qv * u1;
          m[2] += qv * u2;
        }
      }
    }
  }

  // singular cells re-scan the products with a doubled bandwidth
  auto assemble_cell_wide = [&](int a, int b, double bw, Cell3& c,
                                std::vector<std::array<double, 3>>& m) {
    c = Cell3{};
    m.assign(size_t(2 * L + 1), {0.0, 0.0, 0.0});
    KernelSpec wide{spec.family, bw};
    for (int h = -L; h <= L; ++h) {
      double wh = bartlett(h);
      if (wh <= 0.0) continue;
      for (const auto& e : prod.lag(h)) {
        double k1 = kernel_weight(wide, e.t1 - pts[size_t(a)]);
        if (k1 <= 0.0) continue;
        double k2 = kernel_weight(wide, e.t2 - pts[size_t(b)]);
        if (k2 <= 0.0) continue;
        double u1 = (e.t1 - pts[size_t(a)]) / bw;
        double u2 = (e.t2 - pts[size_t(b)]) / bw;
        double q = wh * e.weight * k1 * k2;
        c.a00 += q;
        c.a10 += q * u1;
        c.a11 += q * u1 * u1;
        c.a20 += q * u2;
        c.a21 += q * u1 * u2;
        c.a22 += q * u2 * u2;
        double qv = q * e.value;
        auto& mm = m[size_t(h + L)];
        mm[0] += qv;
        mm[1] += qv * u1;
        mm[2] += qv * u2;
      }
    }
  };

  // cos/sin tables on the nonnegative side of the frequency grid
  std::vector<double> ctab(size_t(L + 1) * size_t(S + 1));
  std::vector<double> stab(size_t(L + 1) * size_t(S + 1));
  for (int h = 0; h <= L; ++h)
    for (int i = 0; i <= S; ++i) {
      double w = freqs.point(S + i);
      ctab[size_t(h) * size_t(S + 1) + size_t(i)] = std::cos(h * w);
      stab[size_t(h) * size_t(S + 1) + size_t(i)] = std::sin(h * w);
    }

  SpectralDensity sd(grid, freqs);
  const double scale = double(L) / kTwoPi;

  for (int a = 0; a < G; ++a) {
    for (int b = 0; b < G; ++b) {
      int cell = a * G + b;
      std::array<double, 3> row0{};
      bool ok = solve_row0(acc[size_t(cell)], row0);
      std::vector<std::array<double, 3>> wide_m;
      if (!ok) {
        double bw = B;
        Cell3 c;
        for (int attempt = 0; attempt < kMaxWidenings && !ok; ++attempt) {
          bw *= 2.0;
          assemble_cell_wide(a, b, bw, c, wide_m);
          ok = solve_row0(c, row0);
        }
        if (diag) {
          ++diag->widened_cells;
          if (ok)
            diag->max_bandwidth_used = std::max(diag->max_bandwidth_used, bw);
        }
        if (!ok) {
          if (diag) ++diag->empty_cells;
          for (int i = 0; i <= S; ++i) sd.slice(S + i)(a, b) = 0.0;
          continue;
        }
      }
      auto momentum = [&](int hidx, int comp) -> double {
        if (!wide_m.empty()) return wide_m[size_t(hidx)][size_t(comp)];
        return mom(cell, hidx)[comp];
      };
      for (int i = 0; i <= S; ++i) {
        double re0 = 0, re1 = 0, re2 = 0, im0 = 0, im1 = 0, im2 = 0;
        for (int h = 0; h <= L; ++h) {
          double cw = ctab[size_t(h) * size_t(S + 1) + size_t(i)];
          double sw = stab[size_t(h) * size_t(S + 1) + size_t(i)];
          double p0, p1, p2, q0, q1, q2;
          if (h == 0) {
            p0 = momentum(L, 0);
            p1 = momentum(L, 1);
            p2 = momentum(L, 2);
            q0 = q1 = q2 = 0.0;
          } else {
            p0 = momentum(L + h, 0) + momentum(L - h, 0);
            p1 = momentum(L + h, 1) + momentum(L - h, 1);
            p2 = momentum(L + h, 2) + momentum(L - h, 2);
            q0 = momentum(L + h, 0) - momentum(L - h, 0);
            q1 = momentum(L + h, 1) - momentum(L - h, 1);
            q2 = momentum(L + h, 2) - momentum(L - h, 2);
          }
          re0 += cw * p0;
          re1 += cw * p1;
          re2 += cw * p2;
          im0 += sw * q0;
          im1 += sw * q1;
          im2 += sw * q2;
        }
        double dre = row0[0] * re0 + row0[1] * re1 + row0[2] * re2;
        double dim = row0[0] * im0 + row0[1] * im1 + row0[2] * im2;
        sd.slice(S + i)(a, b) = scale * cplx(dre, dim);
      }
    }
  }

  // enforce the exact symmetries: Hermitian per slice, real at omega = 0,
  // PSD by eigenvalue clipping, negative side defined as the conjugate
  for (int i = 0; i <= S; ++i) {
    MatrixXcd& sl = sd.slice(S + i);
    hermitian_symmetrize(sl);
    if (i == 0) sl = sl.real().cast<cplx>();
    psd_clip(sl);
    hermitian_symmetrize(sl);
    if (i == 0) sl = sl.real().cast<cplx>();
    if (i > 0) sd.slice(S - i) = sl.conjugate();
  }
  return sd;
}

NoiseEstimate estimate_noise_variance(
    const FtsDataset& data, const std::vector<std::vector<double>>& mean_at_obs,
    const KernelSpec& spec, const TimeGrid& grid) {
  data.validate();
  bool has_pair = false;
  for (const auto& c : data.curves) has_pair = has_pair || c.size() >= 2;
  require(has_pair, ErrorCode::invalid_argument,
          "estimate_noise_variance: need a curve with at least 2 points");

  // diagonal smooth of squared demeaned observations, same-point pairs kept
  PooledObs sq;
  for (size_t j = 0; j < data.curves.size(); ++j) {
    const auto& c = data.curves[j];
    double w = 1.0 / double(c.size());
    for (int z = 0; z < c.size(); ++z) {
      double d = c.values[size_t(z)] - mean_at_obs[j][size_t(z)];
      sq.push(c.times[size_t(z)], d * d, w);
    }
  }
  sq.sort_by_time();
  VectorXd vhat(grid.size());
  for (int i = 0; i < grid.size(); ++i)
    vhat[i] = local_linear_at(sq, spec, grid.point(i), nullptr);

  // lag-0 surface smooth without same-point pairs, evaluated on the diagonal
  RawCovProducts prod = collect_cov_products(data, mean_at_obs, 0);
  const auto& entries = prod.lag(0);
  VectorXd c0diag(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    double t = grid.point(i);
    double bw = spec.bandwidth;
    bool solved = false;
    for (int attempt = 0; attempt <= kMaxWidenings && !solved; ++attempt) {
      KernelSpec cur{spec.family, bw};
      Cell3 c;
      std::array<double, 3> m{};
      for (const auto& e : entries) {
        double k1 = kernel_weight(cur, e.t1 - t);
        if (k1 <= 0.0) continue;
        double k2 = kernel_weight(cur, e.t2 - t);
        if (k2 <= 0.0) continue;
        double u1 = (e.t1 - t) / bw;
        double u2 = (e.t2 - t) / bw;
        double q = e.weight * k1 * k2;
        c.a00 += q;
        c.a10 += q * u1;
        c.a11 += q * u1 * u1;
        c.a20 += q * u2;
        c.a21 += q * u1 * u2;
        c.a22 += q * u2 * u2;
        double qv = q * e.value;
        m[0] += qv;
        m[1] += qv * u1;
        m[2] += qv * u2;
      }
      std::array<double, 3> row0{};
      if (solve_row0(c, row0)) {
        c0diag[i] = row0[0] * m[0] + row0[1] * m[1] + row0[2] * m[2];
        solved = true;
      } else {
        bw *= 2.0;
      }
    }
    if (!solved) c0diag[i] = vhat[i];  // degenerate data, contributes zero
  }

  double raw = 0.0;
  for (int i = 0; i < grid.size(); ++i)
    raw += grid.weights()[i] * (vhat[i] - c0diag[i]);

  NoiseEstimate out;
  if (raw > 0.0) {
    out.value = raw;
  } else {
    out.value = 1e-8;
    out.clamped = true;
  }
  return out;
}

}  // namespace pada
