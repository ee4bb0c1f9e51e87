#pragma once

// Dense complex linear algebra underneath the whole library: validated
// state/operator types, Kronecker products, partial traces, Schmidt
// decomposition and Haar-distributed sampling.  Dimensions stay small
// (qudits up to kMaxDim), so everything is dense and exact-ish; Eigen does
// the factorizations.

#include <array>
#include <cstdint>

#include "qtp/types.hpp"

namespace qtp::linalg {

// Derives an independent 64-bit sub-seed from (seed, stream).  Every random
// consumer in the library owns a stream id, so one seed pins the whole run
// while parallel consumers never share an engine.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Normalized pure state.  Construction rejects vectors whose norm deviates
// from 1 by more than kNormTol; `normalized` instead renormalizes inputs
// with a defect below `max_defect` (the CLI's lenient path).
class StateVector {
 public:
  explicit StateVector(Vector amplitudes);
  static StateVector normalized(Vector amplitudes, double max_defect = 1e-6);

  int dim() const { return static_cast<int>(v_.size()); }
  const Vector& vec() const { return v_; }
  Complex amp(int i) const { return v_(i); }

 private:
  struct Trusted {};
  StateVector(Vector v, Trusted) : v_(std::move(v)) {}
  Vector v_;
};

// Density operator with its subsystem factorization, typically {n} or {n,n}.
// Construction enforces Hermiticity and unit trace at 1e-12 and eigenvalues
// above kEigenFloor.  `trusted` skips the checks for operators produced by
// the library's own algebra (outputs of channels, twirls, ...).
class DensityOperator {
 public:
  DensityOperator(Matrix m, std::vector<int> dims);
  static DensityOperator trusted(Matrix m, std::vector<int> dims);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& mat() const { return m_; }
  const std::vector<int>& dims() const { return dims_; }

 private:
  DensityOperator() = default;
  Matrix m_;
  std::vector<int> dims_;
};

// Unitary with defect max|UU† - I| <= kUnitaryTol enforced on construction.
class UnitaryOperator {
 public:
  explicit UnitaryOperator(Matrix u);
  static UnitaryOperator trusted(Matrix u);

  int dim() const { return static_cast<int>(u_.rows()); }
  const Matrix& mat() const { return u_; }
  double defect() const;

 private:
  UnitaryOperator() = default;
  Matrix u_;
};

// Kronecker product, (a ⊗ b)[(i*rb+k), (j*cb+l)] = a(i,j) b(k,l).
Matrix tensor(const Matrix& a, const Matrix& b);
Vector tensor(const Vector& a, const Vector& b);

// Partial trace of an operator on a d0 ⊗ d1 space; keep is 0 or 1.
Matrix partial_trace(const Matrix& m, int d0, int d1, int keep);
DensityOperator partial_trace(const DensityOperator& op, int keep);

struct SchmidtDecomposition {
  RealVector coefficients;  // descending, sum of squares = 1
  Matrix left;              // columns are the H_A Schmidt vectors
  Matrix right;             // columns are the H_B Schmidt vectors
};

// Schmidt decomposition of a pure state on d0 ⊗ d1:
// psi = sum_i coefficients[i] * left.col(i) ⊗ right.col(i).
SchmidtDecomposition schmidt_decompose(const StateVector& psi, int d0, int d1);

// Haar-uniform pure state: complex Gaussian vector, normalized.
StateVector haar_random_state(int dim, std::uint64_t seed);

// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
// of the R diagonal folded into Q, which fixes the QR gauge.
UnitaryOperator haar_random_unitary(int dim, std::uint64_t seed);

// Random full-rank density operator, G G† / tr(G G†) with Ginibre G.
// Test and self-check helper, not part of the physics surface.
DensityOperator random_density(int dim, std::uint64_t seed);
DensityOperator random_density(int dim, std::uint64_t seed,
                               std::vector<int> dims);

}  // namespace qtp::linalg
