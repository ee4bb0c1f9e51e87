#pragma once

// Exact teleportation of pure states through a pure resource.  The sender
// applies one joint unitary U on (input ⊗ her resource half) and measures
// in the computational basis; each outcome (s,t) leaves the receiver with
// the input up to a phase-decorated cyclic shift, undone by a correction
// built from the same phase table.
//
// Index conventions, all 0-based:
//   N1 = input dimension = receiver dimension, N2 = sender-half dimension,
//   b[i][j][s][t] = <st|U|ij>   (i,s over N1; j,t over N2),
//   sender blocks  (B_st)[j][i] = b[i][j][s][t], one N2 x N1 matrix per
//   outcome, and a phase table c[s][i][t] of unimodular entries.
// For a resource diagonal on a support sigma (|sigma| = N2, amplitudes
// 1/sqrt(N2)), the unique solution of the coefficient constraint is
//   b[i][p][s][t] = c[s][i][t]/sqrt(N1) when i = sigma[(p - t) mod N2],
// zero otherwise.

#include <cstdint>
#include <string>
#include <vector>

#include "qtp/linalg.hpp"
#include "qtp/types.hpp"

namespace qtp::pure {

using linalg::StateVector;
using linalg::UnitaryOperator;

// Unimodular phase family c[s][i][t] with s, i < N1 and t < N2.
class PhaseTable {
 public:
  PhaseTable(int n1, int n2, std::vector<Complex> entries);

  static PhaseTable ones(int n1, int n2);
  // c[s][i][t] = omega^(s*i) with omega = exp(-2*pi*i/N1).  This is the
  // family whose sender blocks are trace-orthogonal (the assembled U is
  // unitary); at N1 = N2 = 2 it reproduces the textbook qubit protocol.
  static PhaseTable fourier(int n1, int n2);
  static PhaseTable pauli_n2();  // alias of fourier(2, 2)
  // Named presets understood by the CLI: "ones", "fourier", "pauli-n2".
  static PhaseTable preset(const std::string& name, int n1, int n2);

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  Complex at(int s, int i, int t) const;
  const std::vector<Complex>& entries() const { return c_; }

 private:
  int n1_, n2_;
  std::vector<Complex> c_;  // index (s*n1 + i)*n2 + t
};

// Amplitude array of the resource: a(j, k) is the coefficient of
// |j>_sender ⊗ |k>_receiver, shape N2 x N3 with N3 = N1.
struct ResourceCoefficients {
  Matrix a;
  int n1() const { return static_cast<int>(a.cols()); }
  int n2() const { return static_cast<int>(a.rows()); }
};

// a = I/sqrt(n): the maximally entangled diagonal resource.
ResourceCoefficients diagonal_resource(int n);

// Resource supported on a subset of the receiver basis: row j carries
// 1/sqrt(|support|) in column sorted(support)[j].  Teleports exactly the
// states living on span(support).
ResourceCoefficients partial_support_resource(int n1,
                                              std::vector<int> support);

struct SenderBlocks {
  int n1 = 0, n2 = 0;
  std::vector<int> support;    // size n2; identity map for full resources
  std::vector<Matrix> blocks;  // index s*n2 + t, each N2 x N1
  const Matrix& block(int s, int t) const;
};

// Solves the coefficient constraint for the given resource and phases.
// Throws UnsolvableResourceError unless the resource is maximally
// entangled on some support (one entry per row, equal moduli, distinct
// columns); entry phases are absorbed into the blocks.
SenderBlocks solve_sender_blocks(const ResourceCoefficients& res,
                                 const PhaseTable& c);

// Residuals of the three protocol conditions for given (resource, blocks):
//   trace_orthogonality : max |tr(B_st B_s't'†) - δ δ|
//   isometry            : max_st |B_st† A†A B_st - I/(N1 N2)|
//   resource_maximality : |A A† - P_supp / N2|
// where A = a^T is the resource operator and P_supp projects onto the
// support columns.  Unimodular phases guarantee the last two; the first
// holds only for phase tables with orthogonal (s, i)-slices, e.g. fourier.
struct MaiResiduals {
  double trace_orthogonality;
  double isometry;
  double resource_maximality;
  double lambda_sq;  // the common branch weight 1/(N1 N2)
};
MaiResiduals mai_residuals(const ResourceCoefficients& res,
                           const SenderBlocks& blocks);

// Assembles U from the blocks, <st|U|ij> = (B_st)[j][i], and validates
// unitarity.  Throws ValidationError when trace orthogonality fails
// (e.g. the all-ones phase table).
UnitaryOperator assemble_unitary(const SenderBlocks& blocks);

// Correction for outcome (s,t): shift each support component back by t
// positions (cyclically inside the support) and strip the phases,
//   O[sigma_q][sigma_(q+t) mod N2] = conj(c[s][sigma_q][t]),
// identity outside the support.  The full-support overload has
// sigma = identity.
UnitaryOperator correction_operator(int s, int t, const PhaseTable& c,
                                    int n1);
UnitaryOperator correction_operator(int s, int t, const PhaseTable& c, int n1,
                                    const std::vector<int>& support);

struct Outcome {
  int s, t;
  double probability;
  Vector uncorrected;       // normalized receiver state before correction
  Vector corrected;         // after the (s,t) correction
  double recovery_overlap;  // |<psi0|corrected>|
};

// Runs every measurement branch of the protocol.  Outcomes are uniform,
// probability 1/(N1 N2) each, and every corrected state reproduces psi0.
// Throws SupportViolationError if psi0 leaks outside the resource support.
std::vector<Outcome> teleport_pure(const StateVector& psi0,
                                   const ResourceCoefficients& res,
                                   const PhaseTable& c);

// Solvability of the constraint for a diagonal resource with Schmidt
// weights lambda (probabilities; amplitudes also accepted and squared).
// The defect is the largest forced column-norm deviation of the sender
// blocks, min(1, |1/(N lambda_j) - 1|) maximized over j, and 1 when some
// weight vanishes.  Solvable iff the weights are exactly uniform.
struct NecessityVerdict {
  bool solvable;
  double defect;
};
NecessityVerdict maximality_necessity_check(const RealVector& lambdas);

}  // namespace qtp::pure
