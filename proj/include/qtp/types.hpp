#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qtp {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Numerical contract shared by every module.  Identities derived in exact
// arithmetic are enforced at 1e-12; positivity gets slack for eigensolver
// round-off; cross-checks against the brute-force oracles run at 1e-10.
inline constexpr double kUnitaryTol = 1e-12;
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kNormTol = 1e-12;
inline constexpr double kEigenFloor = -1e-10;
inline constexpr double kOracleTol = 1e-10;
inline constexpr int kMaxDim = 64;

// Hot kernels ship in two builds: an OpenMP one and a plain serial one kept
// as a reference.  Results are independent of the thread count either way;
// see the notes in channel.cpp on deterministic reductions.
enum class ExecPolicy { Serial, Parallel };

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DimensionError : ValidationError {
  using ValidationError::ValidationError;
};

struct ParseError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised when a resource is not maximally entangled on its support and the
// sender-side blocks therefore do not exist.
struct UnsolvableResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when an input state has amplitude outside the subspace a
// partial-support resource can carry.
struct SupportViolationError : ValidationError {
  using ValidationError::ValidationError;
};

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("max_abs_diff: shape mismatch");
  return max_abs(Matrix(a - b));
}

}  // namespace qtp
