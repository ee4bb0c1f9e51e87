#include "qtp/pure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace qtp::pure {

namespace {

constexpr double kEntryTol = 1e-12;

void check_table_dims(int n1, int n2) {
  if (n1 < 1 || n1 > kMaxDim || n2 < 1 || n2 > n1)
    throw DimensionError("phase table needs 1 <= N2 <= N1 <= " +
                         std::to_string(kMaxDim));
}

// Support map of a maximally entangled resource: sigma[j] = the column
// carrying row j, phase[j] = the phase of that entry.  Throws when the
// structure is not one unimodular-up-to-scale entry per row with distinct
// columns and equal moduli 1/sqrt(N2).
struct SupportMap {
  std::vector<int> sigma;
  std::vector<Complex> phase;
};

SupportMap detect_support(const ResourceCoefficients& res) {
  const int n2 = res.n2(), n1 = res.n1();
  if (n2 < 1 || n2 > n1)
    throw DimensionError("resource needs 1 <= N2 <= N3 and N3 = N1");
  if (std::abs(res.a.norm() - 1.0) > 1e-9)
    throw ValidationError("resource amplitudes must normalize to 1");
  SupportMap map;
  map.sigma.assign(n2, -1);
  map.phase.assign(n2, Complex(1.0, 0.0));
  const double want = 1.0 / std::sqrt(static_cast<double>(n2));
  std::vector<char> used(n1, 0);
  RealVector weights(n2);
  for (int j = 0; j < n2; ++j) {
    int col = -1;
    for (int k = 0; k < n1; ++k) {
      if (std::abs(res.a(j, k)) <= kEntryTol) continue;
      if (col >= 0)
        throw UnsolvableResourceError(
            "resource row " + std::to_string(j) +
            " has more than one amplitude; not diagonal on any support");
      col = k;
    }
    if (col < 0)
      throw UnsolvableResourceError("resource row " + std::to_string(j) +
                                    " is zero; defect 1");
    if (used[col])
      throw UnsolvableResourceError(
          "resource columns collide; not diagonal on any support");
    used[col] = 1;
    map.sigma[j] = col;
    const Complex entry = res.a(j, col);
    weights(j) = std::norm(entry);
    map.phase[j] = entry / std::abs(entry);
  }
  for (int j = 0; j < n2; ++j) {
    if (std::abs(std::abs(res.a(j, map.sigma[j])) - want) > 1e-9) {
      const auto verdict = maximality_necessity_check(weights);
      throw UnsolvableResourceError(
          "resource is not maximally entangled on its support; defect " +
          std::to_string(verdict.defect));
    }
  }
  return map;
}

}  // namespace

PhaseTable::PhaseTable(int n1, int n2, std::vector<Complex> entries)
    : n1_(n1), n2_(n2), c_(std::move(entries)) {
  check_table_dims(n1, n2);
  if (c_.size() != static_cast<size_t>(n1) * n1 * n2)
    throw DimensionError("phase table needs N1*N1*N2 entries");
  for (const Complex& z : c_)
    if (std::abs(std::abs(z) - 1.0) > kEntryTol)
      throw ValidationError("phase table entry is not unimodular");
}

PhaseTable PhaseTable::ones(int n1, int n2) {
  check_table_dims(n1, n2);
  return PhaseTable(
      n1, n2,
      std::vector<Complex>(static_cast<size_t>(n1) * n1 * n2, Complex(1, 0)));
}

PhaseTable PhaseTable::fourier(int n1, int n2) {
  check_table_dims(n1, n2);
  std::vector<Complex> c(static_cast<size_t>(n1) * n1 * n2);
  for (int s = 0; s < n1; ++s)
    for (int i = 0; i < n1; ++i) {
      const Complex z =
          std::polar(1.0, -2.0 * std::numbers::pi * ((s * i) % n1) / n1);
      for (int t = 0; t < n2; ++t)
        c[(static_cast<size_t>(s) * n1 + i) * n2 + t] = z;
    }
  return PhaseTable(n1, n2, std::move(c));
}

PhaseTable PhaseTable::pauli_n2() { return fourier(2, 2); }

PhaseTable PhaseTable::preset(const std::string& name, int n1, int n2) {
  if (name == "ones") return ones(n1, n2);
  if (name == "fourier") return fourier(n1, n2);
  if (name == "pauli-n2") {
    if (n1 != 2 || n2 != 2)
      throw ParseError("preset pauli-n2 is defined for N1 = N2 = 2");
    return pauli_n2();
  }
  throw ParseError("unknown phase preset: " + name);
}

Complex PhaseTable::at(int s, int i, int t) const {
  if (s < 0 || s >= n1_ || i < 0 || i >= n1_ || t < 0 || t >= n2_)
    throw DimensionError("phase table index out of range");
  return c_[(static_cast<size_t>(s) * n1_ + i) * n2_ + t];
}

ResourceCoefficients diagonal_resource(int n) {
  if (n < 1 || n > kMaxDim)
    throw DimensionError("diagonal resource dimension out of range");
  ResourceCoefficients res;
  res.a = Matrix::Identity(n, n) / std::sqrt(static_cast<double>(n));
  return res;
}

ResourceCoefficients partial_support_resource(int n1,
                                              std::vector<int> support) {
  if (n1 < 1 || n1 > kMaxDim)
    throw DimensionError("resource dimension out of range");
  if (support.empty() || support.size() > static_cast<size_t>(n1))
    throw DimensionError("support size must be in [1, N1]");
  std::sort(support.begin(), support.end());
  for (size_t j = 0; j < support.size(); ++j) {
    if (support[j] < 0 || support[j] >= n1)
      throw DimensionError("support index out of range");
    if (j > 0 && support[j] == support[j - 1])
      throw ValidationError("support indices must be distinct");
  }
  const int n2 = static_cast<int>(support.size());
  ResourceCoefficients res;
  res.a = Matrix::Zero(n2, n1);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n2));
  for (int j = 0; j < n2; ++j) res.a(j, support[j]) = amp;
  return res;
}

const Matrix& SenderBlocks::block(int s, int t) const {
  if (s < 0 || s >= n1 || t < 0 || t >= n2)
    throw DimensionError("sender block index out of range");
  return blocks[static_cast<size_t>(s) * n2 + t];
}

SenderBlocks solve_sender_blocks(const ResourceCoefficients& res,
                                 const PhaseTable& c) {
  const int n1 = res.n1(), n2 = res.n2();
  if (c.n1() != n1 || c.n2() != n2)
    throw DimensionError("phase table shape does not match the resource");
  const SupportMap map = detect_support(res);

  SenderBlocks out;
  out.n1 = n1;
  out.n2 = n2;
  out.support = map.sigma;
  out.blocks.reserve(static_cast<size_t>(n1) * n2);
  const double root = 1.0 / std::sqrt(static_cast<double>(n1));
  for (int s = 0; s < n1; ++s)
    for (int t = 0; t < n2; ++t) {
      Matrix b = Matrix::Zero(n2, n1);
      for (int p = 0; p < n2; ++p) {
        const int q = ((p - t) % n2 + n2) % n2;
        const int i = map.sigma[q];
        // Row phases of the resource are cancelled here so that every
        // branch carries the bare table phase.
        b(p, i) = root * c.at(s, i, t) * std::conj(map.phase[p]);
      }
      out.blocks.push_back(std::move(b));
    }
  return out;
}

MaiResiduals mai_residuals(const ResourceCoefficients& res,
                           const SenderBlocks& blocks) {
  const int n1 = blocks.n1, n2 = blocks.n2;
  if (res.n1() != n1 || res.n2() != n2)
    throw DimensionError("mai_residuals: resource/block shape mismatch");
  const Matrix a_op = res.a.transpose();  // N1 x N2 operator
  const double lambda_sq = 1.0 / (static_cast<double>(n1) * n2);

  MaiResiduals r{0.0, 0.0, 0.0, lambda_sq};
  for (int s = 0; s < n1; ++s)
    for (int t = 0; t < n2; ++t)
      for (int sp = 0; sp < n1; ++sp)
        for (int tp = 0; tp < n2; ++tp) {
          const Complex tr =
              (blocks.block(s, t) * blocks.block(sp, tp).adjoint()).trace();
          const double want = (s == sp && t == tp) ? 1.0 : 0.0;
          r.trace_orthogonality =
              std::max(r.trace_orthogonality, std::abs(tr - want));
        }

  const Matrix gram = a_op.adjoint() * a_op;  // N2 x N2
  const Matrix eye1 = Matrix::Identity(n1, n1);
  for (int s = 0; s < n1; ++s)
    for (int t = 0; t < n2; ++t) {
      const Matrix& b = blocks.block(s, t);
      r.isometry = std::max(
          r.isometry,
          max_abs(Matrix(b.adjoint() * gram * b - lambda_sq * eye1)));
    }

  Matrix proj = Matrix::Zero(n1, n1);
  for (int col : blocks.support) proj(col, col) = 1.0;
  r.resource_maximality =
      max_abs(Matrix(a_op * a_op.adjoint() - proj / static_cast<double>(n2)));
  return r;
}

UnitaryOperator assemble_unitary(const SenderBlocks& blocks) {
  const int n1 = blocks.n1, n2 = blocks.n2;
  if (n1 != n2)
    throw DimensionError(
        "assemble_unitary needs a full resource (N2 = N1); partial-support "
        "blocks only span an isometry");
  const long d = static_cast<long>(n1) * n2;
  Matrix u(d, d);
  for (int s = 0; s < n1; ++s)
    for (int t = 0; t < n2; ++t)
      for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
          u(static_cast<long>(s) * n2 + t, static_cast<long>(i) * n2 + j) =
              blocks.block(s, t)(j, i);
  return UnitaryOperator(std::move(u));  // throws when not unitary
}

UnitaryOperator correction_operator(int s, int t, const PhaseTable& c,
                                    int n1) {
  std::vector<int> full(n1);
  for (int k = 0; k < n1; ++k) full[k] = k;
  return correction_operator(s, t, c, n1, full);
}

UnitaryOperator correction_operator(int s, int t, const PhaseTable& c, int n1,
                                    const std::vector<int>& support) {
  const int n2 = static_cast<int>(support.size());
  if (c.n1() != n1 || c.n2() != n2)
    throw DimensionError("correction: phase table shape mismatch");
  if (s < 0 || s >= n1 || t < 0 || t >= n2)
    throw DimensionError("correction index out of range");
  Matrix o = Matrix::Zero(n1, n1);
  std::vector<char> in_support(n1, 0);
  for (int col : support) in_support[col] = 1;
  for (int k = 0; k < n1; ++k)
    if (!in_support[k]) o(k, k) = 1.0;
  for (int q = 0; q < n2; ++q) {
    const int from = support[(q + t) % n2];
    o(support[q], from) = std::conj(c.at(s, support[q], t));
  }
  return UnitaryOperator(std::move(o));
}

std::vector<Outcome> teleport_pure(const StateVector& psi0,
                                   const ResourceCoefficients& res,
                                   const PhaseTable& c) {
  const int n1 = res.n1(), n2 = res.n2();
  if (psi0.dim() != n1)
    throw DimensionError("input dimension does not match the resource");
  const SenderBlocks blocks = solve_sender_blocks(res, c);

  std::vector<char> in_support(n1, 0);
  for (int col : blocks.support) in_support[col] = 1;
  for (int k = 0; k < n1; ++k)
    if (!in_support[k] && std::abs(psi0.amp(k)) > 1e-12)
      throw SupportViolationError(
          "input has amplitude outside the resource support");

  const Matrix a_op = res.a.transpose();
  std::vector<Outcome> table;
  table.reserve(static_cast<size_t>(n1) * n2);
  for (int s = 0; s < n1; ++s)
    for (int t = 0; t < n2; ++t) {
      Outcome oc;
      oc.s = s;
      oc.t = t;
      Vector branch = a_op * (blocks.block(s, t) * psi0.vec());
      oc.probability = branch.squaredNorm();
      branch /= branch.norm();
      oc.uncorrected = branch;
      oc.corrected =
          correction_operator(s, t, c, n1, blocks.support).mat() * branch;
      oc.recovery_overlap = std::abs(psi0.vec().dot(oc.corrected));
      table.push_back(std::move(oc));
    }
  return table;
}

NecessityVerdict maximality_necessity_check(const RealVector& lambdas) {
  const int n = static_cast<int>(lambdas.size());
  if (n < 1 || n > kMaxDim)
    throw DimensionError("necessity check: weight count out of range");
  for (int i = 0; i < n; ++i)
    if (lambdas(i) < -1e-12)
      throw ValidationError("Schmidt weights must be nonnegative");
  RealVector p = lambdas.cwiseMax(0.0);
  const double s1 = p.sum(), s2 = p.squaredNorm();
  if (std::abs(s1 - 1.0) <= 1e-9) {
    // probabilities, keep
  } else if (std::abs(s2 - 1.0) <= 1e-9) {
    p = p.cwiseProduct(p);  // amplitudes were passed
  } else {
    throw ValidationError("Schmidt weights normalize to neither 1 nor 1^2");
  }

  NecessityVerdict v{true, 0.0};
  for (int i = 0; i < n; ++i) {
    double d;
    if (p(i) < 1e-15)
      d = 1.0;  // a vanishing weight cannot carry any branch at all
    else
      d = std::min(1.0, std::abs(1.0 / (n * p(i)) - 1.0));
    v.defect = std::max(v.defect, d);
  }
  v.solvable = v.defect <= 1e-12;
  return v;
}

}  // namespace qtp::pure
