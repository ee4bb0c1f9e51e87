#include "qtp/weyl.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qtp::weyl {

namespace {

constexpr std::uint64_t kTwirlStream = 0x7319ULL;

void check_n(int n) {
  if (n < 1 || n > kMaxDim)
    throw DimensionError("weyl basis dimension out of range: " +
                         std::to_string(n));
}

// Smallest batch layout that keeps Monte Carlo reductions order-fixed:
// contiguous sample ranges, one derived seed per batch.
struct BatchPlan {
  long batches;
  long base;  // samples per batch, first `extra` batches get one more
  long extra;
  long begin(long b) const { return b * base + std::min(b, extra); }
  long size(long b) const { return base + (b < extra ? 1 : 0); }
};

BatchPlan plan_batches(long samples) {
  const long batches = std::min<long>(samples, 128);
  return BatchPlan{batches, samples / batches, samples % batches};
}

}  // namespace

Complex omega(int n) {
  check_n(n);
  const double th = -2.0 * std::numbers::pi / n;
  return Complex(std::cos(th), std::sin(th));
}

Matrix shift_op(int n) {
  check_n(n);
  Matrix h = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) h((j + 1) % n, j) = 1.0;
  return h;
}

Matrix clock_op(int n) {
  check_n(n);
  const Complex om = omega(n);
  Matrix g = Matrix::Zero(n, n);
  Complex p = 1.0;
  for (int j = 0; j < n; ++j) {
    g(j, j) = p;
    p *= om;
  }
  return g;
}

const Matrix& WeylBasis::op(int s, int t) const {
  if (s < 0 || s >= n || t < 0 || t >= n)
    throw DimensionError("weyl index out of range");
  return ops[static_cast<size_t>(s) * n + t];
}

const Vector& WeylBasis::bell(int s, int t) const {
  if (s < 0 || s >= n || t < 0 || t >= n)
    throw DimensionError("bell index out of range");
  return bells[static_cast<size_t>(s) * n + t];
}

WeylBasis make_basis(int n) {
  check_n(n);
  WeylBasis b;
  b.n = n;
  b.om = omega(n);

  // Power tables keep every U_st an exact product of roots of unity.
  std::vector<Matrix> hp(n), gp(n);
  hp[0] = Matrix::Identity(n, n);
  gp[0] = Matrix::Identity(n, n);
  const Matrix h = shift_op(n), g = clock_op(n);
  for (int k = 1; k < n; ++k) {
    hp[k] = h * hp[k - 1];
    gp[k] = g * gp[k - 1];
  }

  b.ops.reserve(static_cast<size_t>(n) * n);
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) b.ops.push_back(hp[t] * gp[s]);

  Vector phi = Vector::Zero(static_cast<long>(n) * n);
  const double root = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) phi(static_cast<long>(i) * n + i) = root;

  b.bells.reserve(b.ops.size());
  for (const Matrix& u : b.ops) {
    Vector v = Vector::Zero(phi.size());
    // (1 ⊗ U)|Phi> block by block: component (i, k) = U(k, i)/sqrt(n).
    for (int i = 0; i < n; ++i)
      v.segment(static_cast<long>(i) * n, n) = root * u.col(i);
    b.bells.push_back(std::move(v));
  }
  return b;
}

double commutation_deviation(const WeylBasis& b, bool flip_omega_sign) {
  const int n = b.n;
  double worst = 0.0;
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t)
      for (int sp = 0; sp < n; ++sp)
        for (int tp = 0; tp < n; ++tp) {
          int e = ((s * tp - t * sp) % n + n) % n;
          if (flip_omega_sign) e = (n - e) % n;
          const Complex phase =
              std::polar(1.0, -2.0 * std::numbers::pi * e / n);
          const Matrix lhs = b.op(s, t) * b.op(sp, tp);
          const Matrix rhs = phase * (b.op(sp, tp) * b.op(s, t));
          worst = std::max(worst, max_abs_diff(lhs, rhs));
        }
  return worst;
}

double trace_orthogonality_deviation(const WeylBasis& b) {
  const int n = b.n;
  double worst = 0.0;
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t)
      for (int sp = 0; sp < n; ++sp)
        for (int tp = 0; tp < n; ++tp) {
          const Complex tr = (b.op(s, t) * b.op(sp, tp).adjoint()).trace();
          const double want = (s == sp && t == tp) ? n : 0.0;
          worst = std::max(worst, std::abs(tr - Complex(want, 0.0)));
        }
  return worst;
}

double trace_deviation(const WeylBasis& b) {
  double worst = 0.0;
  for (int s = 0; s < b.n; ++s)
    for (int t = 0; t < b.n; ++t) {
      const double want = (s == 0 && t == 0) ? b.n : 0.0;
      worst = std::max(worst,
                       std::abs(b.op(s, t).trace() - Complex(want, 0.0)));
    }
  return worst;
}

double completeness_deviation(const WeylBasis& b, const Matrix& a) {
  Matrix acc = Matrix::Zero(b.n, b.n);
  for (const Matrix& u : b.ops) acc += u * a * u.adjoint();
  const Matrix want =
      static_cast<double>(b.n) * a.trace() * Matrix::Identity(b.n, b.n);
  return max_abs_diff(acc, want);
}

double adjoint_completeness_deviation(const WeylBasis& b, const Matrix& a) {
  Matrix acc = Matrix::Zero(b.n, b.n);
  for (const Matrix& u : b.ops) acc += u.adjoint() * a * u;
  const Matrix want =
      static_cast<double>(b.n) * a.trace() * Matrix::Identity(b.n, b.n);
  return max_abs_diff(acc, want);
}

double bell_orthonormality_deviation(const WeylBasis& b) {
  const size_t m = b.bells.size();
  double worst = 0.0;
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < m; ++j) {
      const Complex ov = b.bells[i].dot(b.bells[j]);
      worst = std::max(worst, std::abs(ov - Complex(i == j ? 1.0 : 0.0, 0.0)));
    }
  return worst;
}

Matrix decompose(const WeylBasis& b, const Matrix& w) {
  if (w.rows() != b.n || w.cols() != b.n)
    throw DimensionError("decompose: operator dimension mismatch");
  Matrix c(b.n, b.n);
  for (int s = 0; s < b.n; ++s)
    for (int t = 0; t < b.n; ++t)
      c(s, t) = (b.op(s, t).adjoint() * w).trace() / static_cast<double>(b.n);
  return c;
}

Matrix reconstruct(const WeylBasis& b, const Matrix& coefficients) {
  if (coefficients.rows() != b.n || coefficients.cols() != b.n)
    throw DimensionError("reconstruct: coefficient table mismatch");
  Matrix w = Matrix::Zero(b.n, b.n);
  for (int s = 0; s < b.n; ++s)
    for (int t = 0; t < b.n; ++t) w += coefficients(s, t) * b.op(s, t);
  return w;
}

Matrix flip_operator(int n) {
  check_n(n);
  const long d = static_cast<long>(n) * n;
  Matrix p = Matrix::Zero(d, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      p(static_cast<long>(i) * n + j, static_cast<long>(j) * n + i) = 1.0;
  return p;
}

Matrix twirl_closed_form(const Matrix& sigma, int n) {
  if (n < 2) throw DimensionError("twirl needs n >= 2");
  const long d = static_cast<long>(n) * n;
  if (sigma.rows() != d || sigma.cols() != d)
    throw DimensionError("twirl: sigma must act on n ⊗ n");
  const Matrix p = flip_operator(n);
  const Complex tr = sigma.trace();
  const Complex trp = (sigma * p).trace();
  const double n2 = static_cast<double>(n) * n;
  const double den = n2 * (n2 - 1.0);
  const Complex a1 = (n2 * tr - static_cast<double>(n) * trp) / den;
  const Complex a2 = (n2 * trp - static_cast<double>(n) * tr) / den;
  return a1 * Matrix::Identity(d, d) + a2 * p;
}

Matrix twirl_monte_carlo(const Matrix& sigma, int n, long samples,
                         std::uint64_t seed, ExecPolicy policy) {
  if (n < 2) throw DimensionError("twirl needs n >= 2");
  const long d = static_cast<long>(n) * n;
  if (sigma.rows() != d || sigma.cols() != d)
    throw DimensionError("twirl: sigma must act on n ⊗ n");
  if (samples < 1) throw ValidationError("twirl: samples must be positive");

  const BatchPlan plan = plan_batches(samples);
  std::vector<Matrix> partial(plan.batches);

  auto run_batch = [&](long bi) {
    Matrix acc = Matrix::Zero(d, d);
    const long first = plan.begin(bi), count = plan.size(bi);
    for (long k = 0; k < count; ++k) {
      const auto u = linalg::haar_random_unitary(
          n, linalg::derive_seed(seed, kTwirlStream + first + k));
      const Matrix uu = linalg::tensor(u.mat(), u.mat());
      acc += uu.adjoint() * sigma * uu;
    }
    partial[bi] = std::move(acc);
  };

  if (policy == ExecPolicy::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long bi = 0; bi < plan.batches; ++bi) run_batch(bi);
  } else {
    for (long bi = 0; bi < plan.batches; ++bi) run_batch(bi);
  }

  Matrix total = Matrix::Zero(d, d);
  for (long bi = 0; bi < plan.batches; ++bi) total += partial[bi];
  return total / static_cast<double>(samples);
}

Matrix bell_overlap_matrix(const WeylBasis& b, const Matrix& chi) {
  const long d = static_cast<long>(b.n) * b.n;
  if (chi.rows() != d || chi.cols() != d)
    throw DimensionError("bell_overlap_matrix: chi must act on n ⊗ n");
  Matrix m(d, d);
  std::vector<Vector> chi_bell(b.bells.size());
  for (size_t j = 0; j < b.bells.size(); ++j) chi_bell[j] = chi * b.bells[j];
  for (size_t i = 0; i < b.bells.size(); ++i)
    for (size_t j = 0; j < b.bells.size(); ++j)
      m(static_cast<long>(i), static_cast<long>(j)) =
          b.bells[i].dot(chi_bell[j]);
  return m;
}

}  // namespace qtp::weyl
