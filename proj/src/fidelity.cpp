#include "qtp/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qtp/weyl.hpp"

namespace qtp::fidelity {

namespace {

constexpr std::uint64_t kRestartStream = 0xFE57;
constexpr std::uint64_t kScanStream = 0x5CAD;
constexpr std::uint64_t kMcStream = 0xF1DE;

int resource_dim(const DensityOperator& chi) {
  const auto& d = chi.dims();
  if (d.size() != 2 || d[0] != d[1] || d[0] * d[1] != chi.dim())
    throw DimensionError("resource must carry dims (n, n)");
  return d[0];
}

Vector phi_vector(int n) {
  Vector v = Vector::Zero(static_cast<long>(n) * n);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) v(static_cast<long>(i) * n + i) = amp;
  return v;
}

// Generator coordinates: n diagonal entries, then (real, imag) pairs for
// each i < j, n² real parameters in total.
struct Coord {
  enum Kind { Diag, PairRe, PairIm } kind;
  int i, j;
};

Coord decode_coord(int coord, int n) {
  if (coord < n) return {Coord::Diag, coord, coord};
  int p = (coord - n) / 2;
  const bool re = ((coord - n) % 2) == 0;
  for (int i = 0; i < n; ++i) {
    const int row = n - 1 - i;  // pairs with first index i
    if (p < row) return {re ? Coord::PairRe : Coord::PairIm, i, i + 1 + p};
    p -= row;
  }
  throw DimensionError("generator coordinate out of range");
}

Matrix hermitian_from(const RealVector& theta, int n) {
  Matrix h = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) h(k, k) = theta(k);
  int c = n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double a = theta(c++), b = theta(c++);
      h(i, j) = Complex(a, b);
      h(j, i) = Complex(a, -b);
    }
  return h;
}

Matrix exp_i_hermitian(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector phases(h.rows());
  for (long k = 0; k < h.rows(); ++k)
    phases(k) = std::polar(1.0, es.eigenvalues()(k));
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

// QR with the R-diagonal phases folded back into Q: the closest convenient
// exactly-unitary neighbour of a slightly drifted product of rotations.
Matrix polish_unitary(const Matrix& u) {
  Eigen::HouseholderQR<Matrix> qr(u);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (long k = 0; k < u.cols(); ++k) {
    const Complex d = r(k, k);
    if (std::abs(d) > 0.0) q.col(k) *= d / std::abs(d);
  }
  return q;
}

// Objective at U shifted along one generator coordinate by angle h.  The
// shift exp(i h E_coord) touches one or two columns, so the closed form
// avoids a matrix exponential per finite-difference probe.
double probe_objective(const DensityOperator& chi, const Matrix& u,
                       const Coord& c, double h) {
  Matrix shifted = u;
  switch (c.kind) {
    case Coord::Diag:
      shifted.col(c.i) *= std::polar(1.0, h);
      break;
    case Coord::PairRe: {
      const Complex is(0.0, std::sin(h));
      const double co = std::cos(h);
      shifted.col(c.i) = co * u.col(c.i) + is * u.col(c.j);
      shifted.col(c.j) = is * u.col(c.i) + co * u.col(c.j);
      break;
    }
    case Coord::PairIm: {
      const double si = std::sin(h), co = std::cos(h);
      shifted.col(c.i) = co * u.col(c.i) + si * u.col(c.j);
      shifted.col(c.j) = -si * u.col(c.i) + co * u.col(c.j);
      break;
    }
  }
  return fef_objective(chi, shifted);
}

struct RestartOutcome {
  double value = 0.0;
  Matrix u;
  long iterations = 0;
  double gradient_norm = 0.0;
  bool hit_cap = false;
};

RestartOutcome ascend(const DensityOperator& chi, int n, Matrix u,
                      const OptimizerConfig& cfg) {
  const int params = n * n;
  std::vector<Coord> coords;
  coords.reserve(params);
  for (int k = 0; k < params; ++k) coords.push_back(decode_coord(k, n));

  double f = fef_objective(chi, u);
  double eta = 0.5;
  RealVector grad(params);
  RestartOutcome out;
  long it = 0;
  for (; it < cfg.max_iterations; ++it) {
    for (int k = 0; k < params; ++k)
      grad(k) = (probe_objective(chi, u, coords[k], cfg.fd_step) -
                 probe_objective(chi, u, coords[k], -cfg.fd_step)) /
                (2.0 * cfg.fd_step);
    out.gradient_norm = grad.norm();
    if (out.gradient_norm < 1e-14) break;

    // Backtracking line search along the gradient, starting from the last
    // accepted scale. The sufficient-increase test matters: accepting any
    // fc > f lets an overshooting step land on the mirror point across the
    // peak, where the gain is only the curvature asymmetry and progress
    // decays like 1/iteration. Requiring a fixed fraction of the first-order
    // prediction forces the search down to a scale that actually closes in.
    // No such step along the ascent direction means the finite-difference
    // gradient is noise, so stop.
    const double gnorm2 = grad.squaredNorm();
    double step = eta;
    bool improved = false;
    double fc = f;
    Matrix cand;
    while (step > 1e-14) {
      cand = u * exp_i_hermitian(hermitian_from(step * grad, n));
      fc = fef_objective(chi, cand);
      if (fc > f + 0.1 * step * gnorm2) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
    const double gain = fc - f;
    u = std::move(cand);
    f = fc;
    eta = std::min(step * 2.0, 4.0);
    if (gain < cfg.tol) {
      ++it;
      break;
    }
  }
  out.hit_cap = (it >= cfg.max_iterations);
  out.iterations = it;
  out.u = polish_unitary(u);
  out.value = fef_objective(chi, out.u);
  return out;
}

void check_config(const OptimizerConfig& cfg) {
  if (cfg.restarts < 1 || cfg.max_iterations < 1 || cfg.fd_step <= 0.0 ||
      cfg.tol < 0.0 || cfg.scan_samples < 0)
    throw ValidationError("optimizer config out of range");
}

}  // namespace

double singlet_fraction(const DensityOperator& chi) {
  const int n = resource_dim(chi);
  const Vector phi = phi_vector(n);
  const double f = std::real(phi.dot(chi.mat() * phi));
  return std::clamp(f, 0.0, 1.0);
}

double affine_fidelity(int n, double fraction) {
  return (n * fraction + 1.0) / (n + 1.0);
}

double fidelity_standard(const DensityOperator& chi) {
  return affine_fidelity(resource_dim(chi), singlet_fraction(chi));
}

double fef_objective(const DensityOperator& chi, const Matrix& u) {
  const int n = static_cast<int>(u.rows());
  if (u.cols() != n || static_cast<long>(n) * n != chi.dim())
    throw DimensionError("candidate dimension does not match the resource");
  Vector v(static_cast<long>(n) * n);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i)
    v.segment(static_cast<long>(i) * n, n) = amp * u.col(i);
  return std::real(v.dot(chi.mat() * v));
}

FefResult fully_entangled_fraction(const DensityOperator& chi,
                                   const OptimizerConfig& cfg) {
  const int n = resource_dim(chi);
  check_config(cfg);

  std::vector<RestartOutcome> runs(static_cast<size_t>(cfg.restarts));
  const auto run_one = [&](int r) {
    Matrix start =
        r == 0 ? Matrix(Matrix::Identity(n, n))
               : linalg::haar_random_unitary(
                     n, linalg::derive_seed(cfg.seed, kRestartStream + r))
                     .mat();
    runs[static_cast<size_t>(r)] = ascend(chi, n, std::move(start), cfg);
  };
  if (cfg.policy == ExecPolicy::Serial) {
    for (int r = 0; r < cfg.restarts; ++r) run_one(r);
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int r = 0; r < cfg.restarts; ++r) run_one(r);
  }

  int best = 0;
  OptimizerReport report;
  for (int r = 0; r < cfg.restarts; ++r) {
    report.total_iterations += runs[static_cast<size_t>(r)].iterations;
    if (runs[static_cast<size_t>(r)].value > runs[static_cast<size_t>(best)].value)
      best = r;
  }
  report.restarts_used = cfg.restarts;
  RestartOutcome winner = runs[static_cast<size_t>(best)];

  if (cfg.scan_samples > 0) {
    const HaarScanResult scan =
        fef_haar_scan(chi, cfg.scan_samples, cfg.seed, cfg.policy);
    report.scan_best = scan.value;
    if (scan.value > winner.value + 1e-9) {
      RestartOutcome rescue = ascend(chi, n, scan.u, cfg);
      report.total_iterations += rescue.iterations;
      report.restarts_used += 1;
      report.scan_triggered_restart = true;
      if (rescue.value > winner.value) winner = std::move(rescue);
    }
  }
  report.final_gradient_norm = winner.gradient_norm;
  report.hit_iteration_cap = winner.hit_cap;
  for (const RestartOutcome& r : runs) report.hit_iteration_cap |= r.hit_cap;

  return FefResult{winner.value, UnitaryOperator(std::move(winner.u)),
                   report};
}

HaarScanResult fef_haar_scan(const DensityOperator& chi, int samples,
                             std::uint64_t seed, ExecPolicy policy) {
  const int n = resource_dim(chi);
  if (samples < 1) throw ValidationError("scan needs at least one sample");
  std::vector<double> vals(static_cast<size_t>(samples));
  const auto eval = [&](int k) {
    vals[static_cast<size_t>(k)] = fef_objective(
        chi, linalg::haar_random_unitary(
                 n, linalg::derive_seed(seed, kScanStream + k))
                 .mat());
  };
  if (policy == ExecPolicy::Serial) {
    for (int k = 0; k < samples; ++k) eval(k);
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int k = 0; k < samples; ++k) eval(k);
  }
  int best = 0;
  for (int k = 1; k < samples; ++k)
    if (vals[static_cast<size_t>(k)] > vals[static_cast<size_t>(best)])
      best = k;
  return HaarScanResult{
      vals[static_cast<size_t>(best)],
      linalg::haar_random_unitary(
          n, linalg::derive_seed(seed, kScanStream + best))
          .mat()};
}

double fidelity_optimal(const DensityOperator& chi,
                        const OptimizerConfig& cfg) {
  const int n = resource_dim(chi);
  return affine_fidelity(n, fully_entangled_fraction(chi, cfg).value);
}

double fidelity_general(const DensityOperator& chi,
                        const channel::CorrectionFamily& t) {
  const int n = resource_dim(chi);
  if (t.n != n)
    throw DimensionError("correction family dimension does not match");
  const weyl::WeylBasis basis = weyl::make_basis(n);
  double sum = 0.0;
  for (int s = 0; s < n; ++s)
    for (int tt = 0; tt < n; ++tt)
      sum += fef_objective(chi, Matrix(t.at(s, tt) * basis.op(s, tt).adjoint()));
  return sum / (n * (n + 1.0)) + 1.0 / (n + 1.0);
}

McEstimate mc_average_fidelity(const ChannelFn& channel, int n, long samples,
                               std::uint64_t seed, ExecPolicy policy) {
  if (n < 1 || n > kMaxDim)
    throw DimensionError("sample dimension out of range");
  if (samples < 1) throw ValidationError("average needs at least one sample");
  if (!channel) throw ValidationError("null channel evaluator");

  const long batches = std::min<long>(samples, 128);
  const long base = samples / batches, extra = samples % batches;
  const auto begin = [base, extra](long b) {
    return b * base + std::min(b, extra);
  };
  std::vector<double> bsum(static_cast<size_t>(batches), 0.0);

  const auto run_batch = [&](long b) {
    double acc = 0.0;
    const long hi = begin(b + 1);
    for (long k = begin(b); k < hi; ++k) {
      const Vector phi =
          linalg::haar_random_state(n, linalg::derive_seed(seed, kMcStream + k))
              .vec();
      const Matrix out = channel(Matrix(phi * phi.adjoint()));
      acc += std::real(phi.dot(out * phi));
    }
    bsum[static_cast<size_t>(b)] = acc;
  };
  if (policy == ExecPolicy::Serial) {
    for (long b = 0; b < batches; ++b) run_batch(b);
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long b = 0; b < batches; ++b) run_batch(b);
  }

  double total = 0.0;
  for (double s : bsum) total += s;
  McEstimate est;
  est.estimate = total / static_cast<double>(samples);
  if (batches < 2) return est;

  // Delete-one-batch jackknife over the fixed batch layout.
  std::vector<double> loo(static_cast<size_t>(batches));
  double jmean = 0.0;
  for (long b = 0; b < batches; ++b) {
    const long nb = begin(b + 1) - begin(b);
    loo[static_cast<size_t>(b)] =
        (total - bsum[static_cast<size_t>(b)]) /
        static_cast<double>(samples - nb);
    jmean += loo[static_cast<size_t>(b)];
  }
  jmean /= static_cast<double>(batches);
  double var = 0.0;
  for (double v : loo) var += (v - jmean) * (v - jmean);
  var *= static_cast<double>(batches - 1) / static_cast<double>(batches);
  est.standard_error = std::sqrt(var);
  return est;
}

ResourceAnalysis analyze_resource(const DensityOperator& chi,
                                  const OptimizerConfig& cfg) {
  const int n = resource_dim(chi);
  const double f = singlet_fraction(chi);
  FefResult fef = fully_entangled_fraction(chi, cfg);
  return ResourceAnalysis{n,
                          f,
                          fef.value,
                          std::move(fef.w),
                          affine_fidelity(n, f),
                          affine_fidelity(n, fef.value),
                          fef.report};
}

}  // namespace qtp::fidelity
