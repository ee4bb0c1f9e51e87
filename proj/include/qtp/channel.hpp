#pragma once

// Teleportation channels induced by a bipartite resource chi on n ⊗ n.
// Three closed forms and one oracle:
//
//   apply_standard    Λ(ρ) = Σ_st <Φ_st|χ|Φ_st> U_st ρ U_st†
//   apply_general     Λ_T(ρ) = (1/n²) Σ_{st,s't'} <Φ_st|χ|Φ_s't'>
//                         Σ_{γβ} T_γβ† U_st U_γβ ρ U_γβ† U_s't'† T_γβ
//   apply_optimal     apply_general with T_γβ = W · U_γβ
//   simulate_protocol rebuilds the channel from the three-party state,
//                     Bell projectors and per-outcome corrections.
//
// The closed forms are evaluated as displayed, with no algebraic reduction,
// so their agreement with the enumeration oracle is evidence rather than a
// tautology.  Every kernel has a serial reference path and a parallel path
// whose reduction order is fixed by index arithmetic, never by the thread
// count, so outputs are bit-stable per ExecPolicy.

#include <vector>

#include "qtp/linalg.hpp"
#include "qtp/types.hpp"
#include "qtp/weyl.hpp"

namespace qtp::channel {

using linalg::DensityOperator;
using linalg::UnitaryOperator;

// Receiver correction unitaries, one per measurement outcome (s,t).
struct CorrectionFamily {
  int n = 0;
  std::vector<Matrix> t;  // index s*n + t holds T_st

  const Matrix& at(int s, int t) const;

  // T_st = U_st, the standard protocol.
  static CorrectionFamily weyl(const weyl::WeylBasis& basis);
  // T_st = W U_st, the rotated family the optimal protocol uses.
  static CorrectionFamily rotated_weyl(const weyl::WeylBasis& basis,
                                       const Matrix& w);
  // Arbitrary family; each member is checked against kUnitaryTol.
  static CorrectionFamily custom(int n, std::vector<Matrix> ops);
};

enum class ChannelMethod { Standard, General, Optimal, Oracle };

struct ChannelOutput {
  DensityOperator rho_out;
  double trace_defect = 0.0;  // |tr(rho_out) - 1| before any clean-up
  ChannelMethod method = ChannelMethod::Standard;
};

ChannelOutput apply_standard(const DensityOperator& chi,
                             const DensityOperator& rho,
                             ExecPolicy policy = ExecPolicy::Parallel);

ChannelOutput apply_general(const DensityOperator& chi,
                            const CorrectionFamily& t,
                            const DensityOperator& rho,
                            ExecPolicy policy = ExecPolicy::Parallel);

ChannelOutput apply_optimal(const DensityOperator& chi,
                            const DensityOperator& rho,
                            const UnitaryOperator& w,
                            ExecPolicy policy = ExecPolicy::Parallel);

// Enumeration oracle.  Builds ρ ⊗ χ on n ⊗ (n ⊗ n), projects parties (1,2)
// onto each Bell outcome, traces them out, applies T_st† · branch · T_st and
// sums the unnormalized branches.  No sampling: the channel is the exact
// outcome average.
ChannelOutput simulate_protocol(const DensityOperator& chi,
                                const CorrectionFamily& t,
                                const DensityOperator& rho,
                                ExecPolicy policy = ExecPolicy::Parallel);

// Operator-sum form of the standard channel: weights p_st = <Φ_st|χ|Φ_st>
// with U_st.  Weights in [-1e-12, 0) are clamped to 0 (eigensolver noise on
// valid states); the sum is 1 up to kTraceTol.
struct KrausTerm {
  double weight;
  int s, t;
  Matrix op;
};
std::vector<KrausTerm> kraus_form(const DensityOperator& chi);

}  // namespace qtp::channel
