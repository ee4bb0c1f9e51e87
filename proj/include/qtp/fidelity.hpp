#pragma once

// Fidelity analysis of a teleportation resource chi on n ⊗ n:
//
//   singlet_fraction          F = <Φ|χ|Φ>
//   fully_entangled_fraction  ℱ = max_U <Φ|(1⊗U†)χ(1⊗U)|Φ>
//   fidelity_standard         f = n F/(n+1) + 1/(n+1)
//   fidelity_optimal          f_max = n ℱ/(n+1) + 1/(n+1)
//   fidelity_general          the per-family closed form for arbitrary {T_st}
//   mc_average_fidelity       Haar-sampled average of <φ|Λ(|φ><φ|)|φ>
//
// ℱ has no closed form; the optimizer runs line-searched gradient ascent on
// the unitary manifold (exponential map of a Hermitian generator, n² real
// parameters, central finite differences), multi-started, with a Haar-scan
// safeguard.  The returned value is always the exactly evaluated objective
// at the returned unitary, never an extrapolation, so it is a certified
// lower bound on ℱ up to arithmetic roundoff.

#include <cstdint>
#include <functional>

#include "qtp/channel.hpp"
#include "qtp/linalg.hpp"
#include "qtp/types.hpp"

namespace qtp::fidelity {

using linalg::DensityOperator;
using linalg::UnitaryOperator;

// <Φ|χ|Φ>, clamped into [0, 1].
double singlet_fraction(const DensityOperator& chi);

// The affine law shared by the standard and optimal protocols:
// (n * fraction + 1) / (n + 1).
double affine_fidelity(int n, double fraction);

double fidelity_standard(const DensityOperator& chi);

// <Φ|(1⊗U†)χ(1⊗U)|Φ> for an arbitrary candidate U (no unitarity check;
// the optimizer probes with exactly unitary factors).
double fef_objective(const DensityOperator& chi, const Matrix& u);

struct OptimizerConfig {
  int restarts = 20;          // restart 0 starts at the identity
  int max_iterations = 2000;  // per restart
  double fd_step = 1e-6;      // central-difference step
  double tol = 1e-10;         // stop when the objective gain drops below
  int scan_samples = 10000;   // Haar-scan safeguard size (0 disables)
  std::uint64_t seed = 0;
  ExecPolicy policy = ExecPolicy::Parallel;
};

struct OptimizerReport {
  int restarts_used = 0;
  long total_iterations = 0;
  double final_gradient_norm = 0.0;  // at the winning restart's last step
  bool hit_iteration_cap = false;
  bool scan_triggered_restart = false;
  double scan_best = 0.0;
};

struct FefResult {
  double value = 0.0;
  UnitaryOperator w;
  OptimizerReport report;
};

FefResult fully_entangled_fraction(const DensityOperator& chi,
                                   const OptimizerConfig& config = {});

// Best objective over `samples` Haar-random unitaries, with the sample that
// achieved it.  Deterministic per seed; max selection breaks ties toward
// the lowest sample index, so the result is thread-count independent.
struct HaarScanResult {
  double value = 0.0;
  Matrix u;
};
HaarScanResult fef_haar_scan(const DensityOperator& chi, int samples,
                             std::uint64_t seed,
                             ExecPolicy policy = ExecPolicy::Parallel);

double fidelity_optimal(const DensityOperator& chi,
                        const OptimizerConfig& config = {});

// Closed-form transmission fidelity of the protocol defined by the
// correction family {T_st}:
//   f = 1/(n(n+1)) Σ_γβ <Φ|(1⊗(T_γβ U_γβ†)†) χ (1⊗ T_γβ U_γβ†)|Φ> + 1/(n+1).
double fidelity_general(const DensityOperator& chi,
                        const channel::CorrectionFamily& t);

// rho -> Λ(rho) evaluator handed to the Monte Carlo average.  Must be pure
// and safe to call concurrently; the parallel policy runs batches at once.
using ChannelFn = std::function<Matrix(const Matrix&)>;

struct McEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;  // delete-one-batch jackknife
};

// Mean over Haar-random pure inputs of <φ|Λ(|φ><φ|)|φ>.  Samples are drawn
// per-index from derived seeds and reduced in fixed batch order, so the
// estimate is bit-identical across ExecPolicy values and thread counts.
McEstimate mc_average_fidelity(const ChannelFn& channel, int n, long samples,
                               std::uint64_t seed,
                               ExecPolicy policy = ExecPolicy::Parallel);

struct ResourceAnalysis {
  int n = 0;
  double singlet_fraction = 0.0;
  double fef = 0.0;
  UnitaryOperator optimizer_w;
  double f_standard = 0.0;
  double f_optimal = 0.0;
  OptimizerReport report;
};

ResourceAnalysis analyze_resource(const DensityOperator& chi,
                                  const OptimizerConfig& config = {});

}  // namespace qtp::fidelity
