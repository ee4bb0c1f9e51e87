#include "qtp/channel.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include <unsupported/Eigen/KroneckerProduct>

namespace qtp::channel {

namespace {

// The enumeration oracle materializes the three-party state (n^3 x n^3);
// past this the memory bill stops being worth an oracle run.
constexpr int kOracleMaxDim = 12;

int resource_dim(const DensityOperator& chi) {
  const auto& d = chi.dims();
  if (d.size() != 2 || d[0] != d[1] || d[0] * d[1] != chi.dim())
    throw DimensionError("resource must carry dims (n, n)");
  return d[0];
}

void check_pair(const DensityOperator& chi, const DensityOperator& rho,
                int n) {
  if (rho.dim() != n)
    throw DimensionError("input dimension " + std::to_string(rho.dim()) +
                         " does not match resource side " + std::to_string(n));
  (void)chi;
}

// Sums `count` independent n x n contributions in an order fixed by index
// arithmetic alone.  Serial path: one plain loop, the reference the tests
// and the benchmark compare against.  Parallel path: fixed chunk layout
// (a function of count only), per-chunk serial accumulation, one in-order
// reduction; thread count never changes the bits.
template <typename F>
Matrix indexed_sum(long count, int dim, ExecPolicy policy, const F& f) {
  Matrix total = Matrix::Zero(dim, dim);
  if (policy == ExecPolicy::Serial || count < 2) {
    for (long i = 0; i < count; ++i) total += f(i);
    return total;
  }
  const long chunks = std::min<long>(count, 64);
  const long base = count / chunks, extra = count % chunks;
  const auto begin = [base, extra](long c) {
    return c * base + std::min(c, extra);
  };
  std::vector<Matrix> partial(static_cast<size_t>(chunks));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long c = 0; c < chunks; ++c) {
    Matrix acc = Matrix::Zero(dim, dim);
    const long hi = begin(c + 1);
    for (long i = begin(c); i < hi; ++i) acc += f(i);
    partial[static_cast<size_t>(c)] = std::move(acc);
  }
  for (const Matrix& p : partial) total += p;
  return total;
}

ChannelOutput finish(Matrix out, ChannelMethod method) {
  const double defect = std::abs(out.trace() - Complex(1.0, 0.0));
  const int n = static_cast<int>(out.rows());
  return ChannelOutput{DensityOperator(std::move(out), {n}), defect, method};
}

}  // namespace

const Matrix& CorrectionFamily::at(int s, int t_idx) const {
  if (s < 0 || s >= n || t_idx < 0 || t_idx >= n)
    throw DimensionError("correction index out of range");
  return t[static_cast<size_t>(s) * n + t_idx];
}

CorrectionFamily CorrectionFamily::weyl(const weyl::WeylBasis& basis) {
  return CorrectionFamily{basis.n, basis.ops};
}

CorrectionFamily CorrectionFamily::rotated_weyl(const weyl::WeylBasis& basis,
                                                const Matrix& w) {
  if (w.rows() != basis.n || w.cols() != basis.n)
    throw DimensionError("rotation dimension does not match the basis");
  CorrectionFamily fam{basis.n, {}};
  fam.t.reserve(basis.ops.size());
  for (const Matrix& u : basis.ops) fam.t.push_back(w * u);
  return fam;
}

CorrectionFamily CorrectionFamily::custom(int n, std::vector<Matrix> ops) {
  if (n < 1 || n > kMaxDim)
    throw DimensionError("correction dimension out of range");
  if (ops.size() != static_cast<size_t>(n) * n)
    throw DimensionError("correction family needs n^2 members");
  for (const Matrix& m : ops) {
    if (m.rows() != n || m.cols() != n)
      throw DimensionError("correction member has the wrong shape");
    UnitaryOperator{m};  // throws when not unitary
  }
  return CorrectionFamily{n, std::move(ops)};
}

ChannelOutput apply_standard(const DensityOperator& chi,
                             const DensityOperator& rho, ExecPolicy policy) {
  const int n = resource_dim(chi);
  check_pair(chi, rho, n);
  const weyl::WeylBasis basis = weyl::make_basis(n);

  std::vector<double> p(static_cast<size_t>(n) * n);
  for (int i = 0; i < n * n; ++i)
    p[i] = std::real(basis.bells[i].dot(chi.mat() * basis.bells[i]));

  Matrix out = indexed_sum(n * n, n, policy, [&](long i) -> Matrix {
    const Matrix& u = basis.ops[static_cast<size_t>(i)];
    return p[static_cast<size_t>(i)] * (u * rho.mat() * u.adjoint());
  });
  return finish(std::move(out), ChannelMethod::Standard);
}

ChannelOutput apply_general(const DensityOperator& chi,
                            const CorrectionFamily& t,
                            const DensityOperator& rho, ExecPolicy policy) {
  const int n = resource_dim(chi);
  check_pair(chi, rho, n);
  if (t.n != n)
    throw DimensionError("correction family dimension does not match");
  const weyl::WeylBasis basis = weyl::make_basis(n);
  const int n2 = n * n;

  // overlap(st, s't') = <Phi_st| chi |Phi_s't'>
  const Matrix overlap = weyl::bell_overlap_matrix(basis, chi.mat());

  // g[st*n2 + gb] = T_gb† U_st U_gb; the summand's right factor is the
  // adjoint of the matching table entry, so the double sum is evaluated
  // exactly as displayed, only with the products cached.
  std::vector<Matrix> g(static_cast<size_t>(n2) * n2);
  for (int st = 0; st < n2; ++st)
    for (int gb = 0; gb < n2; ++gb)
      g[static_cast<size_t>(st) * n2 + gb] =
          t.t[gb].adjoint() * basis.ops[st] * basis.ops[gb];

  const long pairs = static_cast<long>(n2) * n2;
  Matrix out = indexed_sum(pairs, n, policy, [&](long m) -> Matrix {
    const int st = static_cast<int>(m / n2);
    const int sptp = static_cast<int>(m % n2);
    const Complex c = overlap(st, sptp);
    Matrix acc = Matrix::Zero(n, n);
    for (int gb = 0; gb < n2; ++gb)
      acc += g[static_cast<size_t>(st) * n2 + gb] * rho.mat() *
             g[static_cast<size_t>(sptp) * n2 + gb].adjoint();
    return c * acc;
  });
  out /= static_cast<double>(n2);
  return finish(std::move(out), ChannelMethod::General);
}

ChannelOutput apply_optimal(const DensityOperator& chi,
                            const DensityOperator& rho,
                            const UnitaryOperator& w, ExecPolicy policy) {
  const int n = resource_dim(chi);
  check_pair(chi, rho, n);
  if (w.dim() != n)
    throw DimensionError("optimizer rotation dimension does not match");
  const weyl::WeylBasis basis = weyl::make_basis(n);
  ChannelOutput out = apply_general(
      chi, CorrectionFamily::rotated_weyl(basis, w.mat()), rho, policy);
  out.method = ChannelMethod::Optimal;
  return out;
}

ChannelOutput simulate_protocol(const DensityOperator& chi,
                                const CorrectionFamily& t,
                                const DensityOperator& rho,
                                ExecPolicy policy) {
  const int n = resource_dim(chi);
  check_pair(chi, rho, n);
  if (t.n != n)
    throw DimensionError("correction family dimension does not match");
  if (n > kOracleMaxDim)
    throw DimensionError("protocol oracle materializes the n^3-dim state; "
                         "capped at n <= " +
                         std::to_string(kOracleMaxDim));
  const weyl::WeylBasis basis = weyl::make_basis(n);

  // Parties: 0 input, 1 sender's resource half, 2 receiver's half.
  const Matrix big = linalg::tensor(rho.mat(), chi.mat());
  const Matrix eye = Matrix::Identity(n, n);

  // Measuring (0,1) in the Bell family and conditioning on outcome (s,t)
  // leaves the receiver with <q_st|(rho ⊗ chi)|q_st>, the partial trace of
  // the projected state.  The measured vector q_st is the entrywise
  // conjugate of |Phi_st>: that is the outcome whose branch the family
  // member T_st corrects.  (Pairing outcome (s,t) with |Phi_st> itself
  // shuffles the correction indices for n >= 3, where the Weyl operators
  // are no longer real.)
  Matrix out = indexed_sum(n * n, n, policy, [&](long i) -> Matrix {
    const Vector q = basis.bells[static_cast<size_t>(i)].conjugate();
    const Matrix contract =
        Eigen::kroneckerProduct(q.adjoint(), eye).eval();  // n x n^3
    const Matrix branch = contract * big * contract.adjoint();
    const Matrix& corr = t.t[static_cast<size_t>(i)];
    return corr.adjoint() * branch * corr;
  });
  return finish(std::move(out), ChannelMethod::Oracle);
}

std::vector<KrausTerm> kraus_form(const DensityOperator& chi) {
  const int n = resource_dim(chi);
  const weyl::WeylBasis basis = weyl::make_basis(n);
  std::vector<KrausTerm> terms;
  terms.reserve(static_cast<size_t>(n) * n);
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) {
      const Vector& b = basis.bell(s, t);
      double w = std::real(b.dot(chi.mat() * b));
      if (w < -1e-12)
        throw ValidationError("Bell weight " + std::to_string(w) +
                              " below the PSD floor; resource is not a state");
      w = std::max(w, 0.0);
      terms.push_back(KrausTerm{w, s, t, basis.op(s, t)});
    }
  return terms;
}

}  // namespace qtp::channel
