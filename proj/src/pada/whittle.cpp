#include "pada/whittle.hpp"

#include <cmath>

namespace pada {

void WhittleSpectrum::validate() const {
  require(curve_count >= 2, ErrorCode::invalid_argument,
          "WhittleSpectrum: need at least two curves");
  require(!eta.empty(), ErrorCode::invalid_argument,
          "WhittleSpectrum: no components");
  for (const VectorXd& e : eta) {
    require(e.size() == curve_count, ErrorCode::dimension_mismatch,
            "WhittleSpectrum: spectrum length must equal curve count");
    require(e.minCoeff() > 0.0, ErrorCode::numeric,
            "WhittleSpectrum: spectrum must be positive after flooring");
  }
}

WhittleSpectrum build_whittle_spectrum(const std::vector<VectorXd>& eta,
                                       const FrequencyGrid& freqs, int J) {
  require(J >= 2, ErrorCode::invalid_argument,
          "build_whittle_spectrum: need at least two curves");
  WhittleSpectrum out;
  out.curve_count = J;
  for (const VectorXd& e : eta) {
    require(e.size() == freqs.size(), ErrorCode::dimension_mismatch,
            "build_whittle_spectrum: spectrum does not match frequency grid");
    double top = e.cwiseAbs().maxCoeff();
    double floor_value = std::max(1e-6 * top, 1e-12);
    VectorXd v(J);
    for (int j = 0; j < J; ++j) {
      // map 2 pi (j+1)/J into (-pi, pi] by periodicity
      double w = kTwoPi * (j + 1) / J;
      if (w > kPi) w -= kTwoPi;
      double pos = (w + kPi) / freqs.spacing();
      int lo = std::min(int(pos), freqs.size() - 2);
      double u = pos - lo;
      double val = (1.0 - u) * e[lo] + u * e[lo + 1];
      v[j] = std::max(val, floor_value);
    }
    out.eta.push_back(std::move(v));
  }
  out.validate();
  return out;
}

WhittleSpectrum build_whittle_spectrum(const FilterBank& bank, int J) {
  std::vector<VectorXd> eta;
  for (const FilterComponent& c : bank.comps) eta.push_back(c.spectrum);
  return build_whittle_spectrum(eta, bank.freqs, J);
}

double whittle_log_prior(const VectorXd& xi, const WhittleSpectrum& spec,
                         int k) {
  spec.validate();
  require(k >= 0 && k < spec.component_count(), ErrorCode::invalid_argument,
          "whittle_log_prior: component index out of range");
  const int n = int(xi.size());
  require(n >= spec.curve_count, ErrorCode::dimension_mismatch,
          "whittle_log_prior: score series shorter than curve count");
  const VectorXd& eta = spec.eta[size_t(k)];
  double acc = 0.0;
  for (int j = 0; j < spec.curve_count; ++j) {
    double w = spec.omega(j);
    cplx dft = 0.0;
    for (int m = 1; m <= n; ++m)
      dft += xi[m - 1] * cplx(std::cos(m * w), std::sin(m * w));
    double mag2 = std::norm(dft) / (kTwoPi * n);
    acc += mag2 / eta[j] + std::log(eta[j]);
  }
  return -0.5 * acc;
}

VectorXd whittle_precision_first_col(const WhittleSpectrum& spec, int k,
                                     int n) {
  spec.validate();
  require(k >= 0 && k < spec.component_count(), ErrorCode::invalid_argument,
          "whittle_precision_first_col: component index out of range");
  require(n >= 1, ErrorCode::invalid_argument,
          "whittle_precision_first_col: empty score series");
  const VectorXd& eta = spec.eta[size_t(k)];
  VectorXd col = VectorXd::Zero(n);
  for (int j = 0; j < spec.curve_count; ++j) {
    double w = spec.omega(j);
    double scale = 1.0 / (kTwoPi * n * eta[j]);
    for (int d = 0; d < n; ++d) col[d] += std::cos(d * w) * scale;
  }
  return col;
}

MatrixXd whittle_precision_dense(const WhittleSpectrum& spec, int k, int n) {
  VectorXd col = whittle_precision_first_col(spec, k, n);
  MatrixXd a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a(r, c) = col[std::abs(r - c)];
  return a;
}

VectorXd toeplitz_apply(const VectorXd& first_col, const VectorXd& x) {
  const int n = int(x.size());
  require(first_col.size() == n, ErrorCode::dimension_mismatch,
          "toeplitz_apply: size mismatch");
  VectorXd y = VectorXd::Zero(n);
  for (int r = 0; r < n; ++r) {
    double acc = 0.0;
    for (int c = 0; c < n; ++c) acc += first_col[std::abs(r - c)] * x[c];
    y[r] = acc;
  }
  return y;
}

}  // namespace pada
