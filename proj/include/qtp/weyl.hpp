#pragma once

// Discrete Weyl-Heisenberg operator basis on an n-level system and the
// generalized Bell states it induces on n ⊗ n.  Conventions, frozen
// repo-wide:
//   omega  = exp(-2*pi*i/n)
//   h|j>   = |(j+1) mod n>          (cyclic shift)
//   g|j>   = omega^j |j>            (clock)
//   U_st   = h^t g^s,  s,t in [0,n)
//   |Phi_st> = (1 ⊗ U_st)|Phi>,  |Phi> = (1/sqrt(n)) sum_i |ii>
// The family obeys U_st U_s't' = omega^(st'-ts') U_s't' U_st and
// tr(U_st U_s't'†) = n δ_ss' δ_tt'; the identities are exercised by the
// deviation reporters below, which cmd-verify and the tests share.

#include <cstdint>
#include <vector>

#include "qtp/linalg.hpp"
#include "qtp/types.hpp"

namespace qtp::weyl {

Complex omega(int n);
Matrix shift_op(int n);  // h
Matrix clock_op(int n);  // g

struct WeylBasis {
  int n = 0;
  Complex om;
  std::vector<Matrix> ops;    // index s*n + t holds U_st
  std::vector<Vector> bells;  // index s*n + t holds |Phi_st>

  const Matrix& op(int s, int t) const;
  const Vector& bell(int s, int t) const;
};

WeylBasis make_basis(int n);

// Max deviation of U_st U_s't' - omega^(st'-ts') U_s't' U_st over all index
// quadruples.  flip_omega_sign negates the exponent in the expected phase
// only; it is the suite's negative control and must blow up for n >= 3.
double commutation_deviation(const WeylBasis& b, bool flip_omega_sign = false);

// Max deviation of tr(U_st U_s't'†) from n δ_ss' δ_tt'.
double trace_orthogonality_deviation(const WeylBasis& b);

// Max deviation of tr(U_st) from n δ_s0 δ_t0.
double trace_deviation(const WeylBasis& b);

// Max deviation of sum_st U_st a U_st† from n tr(a) I.
double completeness_deviation(const WeylBasis& b, const Matrix& a);

// Max deviation of sum_st U_st† a U_st from n tr(a) I.
double adjoint_completeness_deviation(const WeylBasis& b, const Matrix& a);

// Gram fidelity of the Bell family: max deviation of <Phi_st|Phi_s't'>
// from δ_ss' δ_tt'.
double bell_orthonormality_deviation(const WeylBasis& b);

// Coefficient table of w in the Weyl basis, c(s,t) = tr(U_st† w)/n, and the
// inverse map w = sum_st c(s,t) U_st.
Matrix decompose(const WeylBasis& b, const Matrix& w);
Matrix reconstruct(const WeylBasis& b, const Matrix& coefficients);

// Flip (swap) operator on n ⊗ n, P|ij> = |ji>.
Matrix flip_operator(int n);

// Closed form of the two-sided group average
//   sigma -> ∫ dU (U† ⊗ U†) sigma (U ⊗ U)
// which lands in span{I, P}:  alpha1 I + alpha2 P with
//   alpha1 = (n² tr(sigma) - n tr(sigma P)) / (n² (n² - 1))
//   alpha2 = (n² tr(sigma P) - n tr(sigma)) / (n² (n² - 1)).
Matrix twirl_closed_form(const Matrix& sigma, int n);

// Monte Carlo estimate of the same average from Haar samples.  Samples are
// drawn in fixed batches with per-batch derived seeds, so the result is
// bit-identical across ExecPolicy values and thread counts.
Matrix twirl_monte_carlo(const Matrix& sigma, int n, long samples,
                         std::uint64_t seed,
                         ExecPolicy policy = ExecPolicy::Parallel);

// Bell-basis matrix of chi: M[(s,t),(s',t')] = <Phi_st| chi |Phi_s't'>.
// Unitary change of basis, so M is Hermitian, PSD and unit trace.
Matrix bell_overlap_matrix(const WeylBasis& b, const Matrix& chi);

}  // namespace qtp::weyl
