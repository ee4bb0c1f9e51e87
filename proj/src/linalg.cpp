#include "qtp/linalg.hpp"

#include <cmath>
#include <random>
#include <utility>

#include <unsupported/Eigen/KroneckerProduct>

namespace qtp::linalg {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the seed advanced by a golden-ratio step per
  // stream; distinct streams decorrelate even for adjacent ids.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim)
    throw DimensionError("dimension out of range [1, " +
                         std::to_string(kMaxDim) + "]: " +
                         std::to_string(dim));
}

std::mt19937_64 engine_for(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(derive_seed(seed, stream));
}

Matrix ginibre(int dim, std::mt19937_64& eng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = Complex(gauss(eng), gauss(eng));
  return g;
}

}  // namespace

StateVector::StateVector(Vector amplitudes) : v_(std::move(amplitudes)) {
  check_dim(static_cast<int>(v_.size()));
  const double defect = std::abs(v_.norm() - 1.0);
  if (defect > kNormTol)
    throw ValidationError("state vector norm defect " +
                          std::to_string(defect));
}

StateVector StateVector::normalized(Vector amplitudes, double max_defect) {
  check_dim(static_cast<int>(amplitudes.size()));
  const double norm = amplitudes.norm();
  if (norm == 0.0 || std::abs(norm - 1.0) > max_defect)
    throw ValidationError("state vector norm " + std::to_string(norm) +
                          " outside the renormalizable band");
  return StateVector(amplitudes / norm, Trusted{});
}

DensityOperator::DensityOperator(Matrix m, std::vector<int> dims)
    : m_(std::move(m)), dims_(std::move(dims)) {
  if (m_.rows() != m_.cols()) throw DimensionError("density operator not square");
  long prod = 1;
  for (int d : dims_) {
    check_dim(d);
    prod *= d;
  }
  if (dims_.empty() || prod != m_.rows())
    throw DimensionError("subsystem dims do not factor the operator");
  if (max_abs_diff(m_, m_.adjoint()) > kHermitianTol)
    throw ValidationError("density operator not Hermitian within 1e-12");
  if (std::abs(m_.trace() - Complex(1.0, 0.0)) > kTraceTol)
    throw ValidationError("density operator trace deviates from 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < kEigenFloor)
    throw ValidationError("density operator has eigenvalue below -1e-10");
}

DensityOperator DensityOperator::trusted(Matrix m, std::vector<int> dims) {
  DensityOperator op;
  op.m_ = std::move(m);
  op.dims_ = std::move(dims);
  return op;
}

UnitaryOperator::UnitaryOperator(Matrix u) : u_(std::move(u)) {
  if (u_.rows() != u_.cols()) throw DimensionError("unitary not square");
  check_dim(static_cast<int>(u_.rows()));
  if (defect() > kUnitaryTol)
    throw ValidationError("unitarity defect " + std::to_string(defect()));
}

UnitaryOperator UnitaryOperator::trusted(Matrix u) {
  UnitaryOperator op;
  op.u_ = std::move(u);
  return op;
}

double UnitaryOperator::defect() const {
  Matrix id = Matrix::Identity(u_.rows(), u_.cols());
  return max_abs(Matrix(u_ * u_.adjoint() - id));
}

Matrix tensor(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(a, b);
}

Vector tensor(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Matrix partial_trace(const Matrix& m, int d0, int d1, int keep) {
  if (m.rows() != m.cols() || m.rows() != static_cast<long>(d0) * d1)
    throw DimensionError("partial_trace: dims do not factor the operator");
  if (keep != 0 && keep != 1)
    throw DimensionError("partial_trace: keep must be 0 or 1");
  if (keep == 0) {
    Matrix out = Matrix::Zero(d0, d0);
    for (int i = 0; i < d0; ++i)
      for (int j = 0; j < d0; ++j)
        for (int k = 0; k < d1; ++k) out(i, j) += m(i * d1 + k, j * d1 + k);
    return out;
  }
  Matrix out = Matrix::Zero(d1, d1);
  for (int k = 0; k < d1; ++k)
    for (int l = 0; l < d1; ++l)
      for (int i = 0; i < d0; ++i) out(k, l) += m(i * d1 + k, i * d1 + l);
  return out;
}

DensityOperator partial_trace(const DensityOperator& op, int keep) {
  if (op.dims().size() != 2)
    throw DimensionError("partial_trace needs a two-subsystem operator");
  const int d0 = op.dims()[0], d1 = op.dims()[1];
  Matrix out = partial_trace(op.mat(), d0, d1, keep);
  return DensityOperator::trusted(std::move(out), {keep == 0 ? d0 : d1});
}

SchmidtDecomposition schmidt_decompose(const StateVector& psi, int d0,
                                       int d1) {
  if (psi.dim() != d0 * d1)
    throw DimensionError("schmidt_decompose: dims do not factor the state");
  // Reshape into the d0 x d1 coefficient matrix C, psi = sum C_ij |ij>.
  Matrix c(d0, d1);
  for (int i = 0; i < d0; ++i)
    for (int j = 0; j < d1; ++j) c(i, j) = psi.amp(i * d1 + j);
  Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SchmidtDecomposition out;
  out.coefficients = svd.singularValues();
  out.left = svd.matrixU();
  // C = U S V†, so the H_B vectors are the conjugated columns of V.
  out.right = svd.matrixV().conjugate();
  return out;
}

StateVector haar_random_state(int dim, std::uint64_t seed) {
  check_dim(dim);
  auto eng = engine_for(seed, 0x57A7EULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(gauss(eng), gauss(eng));
  const double norm = v.norm();
  if (norm == 0.0) return haar_random_state(dim, derive_seed(seed, 1));
  v /= norm;
  return StateVector(std::move(v));
}

UnitaryOperator haar_random_unitary(int dim, std::uint64_t seed) {
  check_dim(dim);
  auto eng = engine_for(seed, 0x0417ULL);
  Matrix g = ginibre(dim, eng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fold the R-diagonal phases into Q; without this the distribution
  // inherits the QR sign gauge and is not Haar.
  for (int i = 0; i < dim; ++i) {
    const Complex d = r(i, i);
    const double a = std::abs(d);
    q.col(i) *= (a == 0.0) ? Complex(1.0, 0.0) : d / a;
  }
  return UnitaryOperator::trusted(std::move(q));
}

DensityOperator random_density(int dim, std::uint64_t seed) {
  return random_density(dim, seed, {dim});
}

DensityOperator random_density(int dim, std::uint64_t seed,
                               std::vector<int> dims) {
  check_dim(dim);
  auto eng = engine_for(seed, 0xD45EULL);
  Matrix g = ginibre(dim, eng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace();
  return DensityOperator::trusted(std::move(rho), std::move(dims));
}

}  // namespace qtp::linalg
