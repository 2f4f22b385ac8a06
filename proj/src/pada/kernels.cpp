#include "pada/kernels.hpp"

#include <Eigen/Eigenvalues>

namespace pada {

void hermitian_symmetrize(MatrixXcd& k) {
  require(k.rows() == k.cols(), ErrorCode::dimension_mismatch,
          "hermitian_symmetrize: matrix not square");
  k = 0.5 * (k + k.adjoint()).eval();
}

double hermitian_defect(const MatrixXcd& k) {
  require(k.rows() == k.cols(), ErrorCode::dimension_mismatch,
          "hermitian_defect: matrix not square");
  return (k - k.adjoint()).cwiseAbs().maxCoeff();
}

void psd_clip(MatrixXcd& k) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(k);
  require(es.info() == Eigen::Success, ErrorCode::numeric,
          "psd_clip: eigensolver failed");
  VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  k = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

double SpectralDensity::conjugate_symmetry_defect() const {
  double worst = 0.0;
  int n = freqs.size();
  for (int i = 0; i < n; ++i) {
    const MatrixXcd& a = slices[size_t(i)];
    const MatrixXcd& b = slices[size_t(freqs.reflect(i))];
    worst = std::max(worst, (a - b.conjugate()).cwiseAbs().maxCoeff());
  }
  return worst;
}

void SpectralDensity::validate() const {
  require(int(slices.size()) == freqs.size(), ErrorCode::dimension_mismatch,
          "SpectralDensity: slice count != frequency count");
  for (const auto& s : slices)
    require(s.rows() == grid.size() && s.cols() == grid.size(),
            ErrorCode::dimension_mismatch,
            "SpectralDensity: slice shape != grid");
}

}  // namespace pada
