#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace pada {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  io,
  parse,
  numeric,
  checksum,
  unknown_key,
};

// All core routines signal failure through this type; the C boundary maps
// code to a status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace pada
