#include "qtp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "qtp/channel.hpp"
#include "qtp/fidelity.hpp"
#include "qtp/linalg.hpp"
#include "qtp/pure.hpp"
#include "qtp/states.hpp"
#include "qtp/weyl.hpp"

namespace qtp::verify {

namespace {

using linalg::DensityOperator;
using linalg::derive_seed;
using linalg::haar_random_state;
using linalg::haar_random_unitary;
using linalg::random_density;

std::uint64_t sub(const Options& o, int id, int n, int trial) {
  return derive_seed(o.seed, (static_cast<std::uint64_t>(id) << 24) ^
                                 (static_cast<std::uint64_t>(n) << 8) ^
                                 static_cast<std::uint64_t>(trial));
}

// General (non-Hermitian) matrix for identities that hold for arbitrary
// operators, not just states.
Matrix random_general(int n, std::uint64_t seed) {
  return random_density(n, seed).mat() +
         Complex(0.0, 0.7) * random_density(n, derive_seed(seed, 1)).mat();
}

void add(std::vector<CheckResult>& out, std::string name, int n, double dev,
         double thr) {
  CheckResult r;
  r.name = std::move(name);
  r.n = n;
  r.deviation = dev;
  r.threshold = thr;
  r.pass = dev <= thr;
  out.push_back(std::move(r));
}

channel::CorrectionFamily random_family(const weyl::WeylBasis& basis,
                                        std::uint64_t seed) {
  std::vector<Matrix> ops;
  ops.reserve(static_cast<size_t>(basis.n) * basis.n);
  for (int k = 0; k < basis.n * basis.n; ++k)
    ops.push_back(haar_random_unitary(basis.n, derive_seed(seed, k)).mat());
  return channel::CorrectionFamily::custom(basis.n, std::move(ops));
}

}  // namespace

std::vector<CheckResult> run_suite(const Options& opt) {
  if (opt.n_min < 2 || opt.n_max < opt.n_min || opt.n_max > 8)
    throw ValidationError("verify sweep needs 2 <= n_min <= n_max <= 8");
  if (opt.trials < 1 || opt.twirl_samples < 2 || opt.mc_samples < 2)
    throw ValidationError("verify sample counts out of range");

  std::vector<CheckResult> out;
  const fidelity::OptimizerConfig fef_cfg{
      6, 1500, 1e-6, 1e-10, 2000, opt.seed, opt.policy};

  for (int n = opt.n_min; n <= opt.n_max; ++n) {
    const weyl::WeylBasis basis = weyl::make_basis(n);

    add(out, "weyl-commutation", n,
        weyl::commutation_deviation(basis, opt.flip_omega_sign), 1e-12);
    add(out, "weyl-trace-orthogonality", n,
        weyl::trace_orthogonality_deviation(basis), 1e-12);
    add(out, "weyl-trace", n, weyl::trace_deviation(basis), 1e-12);
    add(out, "bell-orthonormality", n,
        weyl::bell_orthonormality_deviation(basis), 1e-12);

    double dev = 0.0;
    for (int t = 0; t < opt.trials; ++t) {
      const Matrix a = random_general(n, sub(opt, 4, n, t));
      dev = std::max(dev, weyl::completeness_deviation(basis, a));
      dev = std::max(dev, weyl::adjoint_completeness_deviation(basis, a));
    }
    add(out, "weyl-completeness", n, dev, 1e-12);

    dev = 0.0;
    for (int t = 0; t < opt.trials; ++t) {
      const Matrix w = random_general(n, sub(opt, 7, n, t));
      dev = std::max(dev, max_abs_diff(
                              weyl::reconstruct(basis, weyl::decompose(basis, w)),
                              w));
    }
    add(out, "weyl-decompose-roundtrip", n, dev, 1e-12);

    {
      const Matrix sigma = random_density(n * n, sub(opt, 8, n, 0)).mat();
      const Matrix closed = weyl::twirl_closed_form(sigma, n);
      const Matrix mc = weyl::twirl_monte_carlo(sigma, n, opt.twirl_samples,
                                                sub(opt, 8, n, 1), opt.policy);
      add(out, "twirl-closed-vs-mc", n, max_abs_diff(closed, mc),
          5e-3 * std::sqrt(1e5 / static_cast<double>(opt.twirl_samples)));

      const long quick = std::min<long>(opt.twirl_samples, 4000);
      const Matrix ser = weyl::twirl_monte_carlo(sigma, n, quick,
                                                 sub(opt, 8, n, 2),
                                                 ExecPolicy::Serial);
      const Matrix par = weyl::twirl_monte_carlo(sigma, n, quick,
                                                 sub(opt, 8, n, 2),
                                                 ExecPolicy::Parallel);
      add(out, "twirl-policy-bitwise", n, max_abs_diff(ser, par), 0.0);
    }

    const DensityOperator ideal = states::isotropic(n, 1.0);
    dev = 0.0;
    for (int t = 0; t < opt.trials; ++t) {
      const DensityOperator rho = random_density(n, sub(opt, 10, n, t));
      dev = std::max(dev, max_abs_diff(
                              channel::apply_standard(ideal, rho, opt.policy)
                                  .rho_out.mat(),
                              rho.mat()));
    }
    add(out, "channel-noiseless", n, dev, 1e-12);

    {
      const DensityOperator mixed = states::isotropic(n, 1.0 / (n * n));
      const DensityOperator rho = random_density(n, sub(opt, 11, n, 0));
      add(out, "channel-depolarized", n,
          max_abs_diff(channel::apply_standard(mixed, rho, opt.policy)
                           .rho_out.mat(),
                       Matrix(Matrix::Identity(n, n) / double(n))),
          1e-12);
    }

    double dev_std = 0.0, dev_gen = 0.0, dev_red = 0.0, dev_pol = 0.0;
    const channel::CorrectionFamily weyl_fam =
        channel::CorrectionFamily::weyl(basis);
    for (int t = 0; t < opt.trials; ++t) {
      const DensityOperator chi =
          random_density(n * n, sub(opt, 12, n, t), {n, n});
      const DensityOperator rho = random_density(n, sub(opt, 13, n, t));
      const channel::CorrectionFamily fam =
          random_family(basis, sub(opt, 14, n, t));

      const Matrix std_out =
          channel::apply_standard(chi, rho, opt.policy).rho_out.mat();
      dev_std = std::max(
          dev_std,
          max_abs_diff(std_out, channel::simulate_protocol(chi, weyl_fam, rho,
                                                           opt.policy)
                                    .rho_out.mat()));
      const Matrix gen_out =
          channel::apply_general(chi, fam, rho, opt.policy).rho_out.mat();
      dev_gen = std::max(
          dev_gen, max_abs_diff(gen_out,
                                channel::simulate_protocol(chi, fam, rho,
                                                           opt.policy)
                                    .rho_out.mat()));
      dev_red = std::max(
          dev_red,
          max_abs_diff(std_out, channel::apply_general(chi, weyl_fam, rho,
                                                       opt.policy)
                                    .rho_out.mat()));
      dev_pol = std::max(
          dev_pol,
          max_abs_diff(gen_out, channel::apply_general(chi, fam, rho,
                                                       ExecPolicy::Serial)
                                    .rho_out.mat()));
    }
    add(out, "channel-oracle-standard", n, dev_std, 1e-10);
    add(out, "channel-oracle-general", n, dev_gen, 1e-10);
    add(out, "channel-general-reduces-standard", n, dev_red, 1e-12);
    add(out, "channel-policy-agreement", n, dev_pol, 1e-12);

    {
      const DensityOperator c1 =
          random_density(n * n, sub(opt, 15, n, 0), {n, n});
      const DensityOperator c2 =
          random_density(n * n, sub(opt, 15, n, 1), {n, n});
      const DensityOperator rho = random_density(n, sub(opt, 15, n, 2));
      const double alpha = 0.3;
      const DensityOperator mix = DensityOperator::trusted(
          alpha * c1.mat() + (1 - alpha) * c2.mat(), {n, n});
      const Matrix lhs =
          channel::apply_standard(mix, rho, opt.policy).rho_out.mat();
      const Matrix rhs =
          alpha *
              channel::apply_standard(c1, rho, opt.policy).rho_out.mat() +
          (1 - alpha) *
              channel::apply_standard(c2, rho, opt.policy).rho_out.mat();
      add(out, "channel-linearity", n, max_abs_diff(lhs, rhs), 1e-12);
    }

    {
      dev = 0.0;
      for (const double f :
           {1.0 / (n * n), 0.5, 0.8, 1.0}) {
        const DensityOperator iso = states::isotropic(n, f);
        dev = std::max(dev, std::abs(fidelity::fidelity_standard(iso) -
                                     fidelity::affine_fidelity(n, f)));
      }
      add(out, "fidelity-affine-isotropic", n, dev, 1e-12);
    }

    {
      double dw = 0.0, dr = 0.0;
      for (int t = 0; t < opt.trials; ++t) {
        const DensityOperator chi =
            random_density(n * n, sub(opt, 18, n, t), {n, n});
        dw = std::max(dw, std::abs(fidelity::fidelity_general(chi, weyl_fam) -
                                   fidelity::fidelity_standard(chi)));
        const Matrix w =
            haar_random_unitary(n, sub(opt, 19, n, t)).mat();
        dr = std::max(
            dr,
            std::abs(fidelity::fidelity_general(
                         chi, channel::CorrectionFamily::rotated_weyl(
                                  basis, w)) -
                     fidelity::affine_fidelity(
                         n, fidelity::fef_objective(chi, w))));
      }
      add(out, "fidelity-general-weyl-reduction", n, dw, 1e-12);
      add(out, "fidelity-general-rotated-form", n, dr, 1e-12);
    }

    {
      double dd = 0.0;
      for (int t = 0; t < opt.trials; ++t) {
        const DensityOperator chi =
            random_density(n * n, sub(opt, 24, n, t), {n, n});
        fidelity::OptimizerConfig cfg = fef_cfg;
        cfg.seed = sub(opt, 24, n, 100 + t);
        const double fef = fidelity::fully_entangled_fraction(chi, cfg).value;
        dd = std::max(dd, fidelity::singlet_fraction(chi) - fef);
      }
      add(out, "fef-dominates-singlet-fraction", n, std::max(dd, 0.0), 1e-9);
    }

    {
      const Vector& peak = basis.bell(1, n - 1);
      const DensityOperator chi =
          DensityOperator(peak * peak.adjoint(), {n, n});
      fidelity::OptimizerConfig cfg = fef_cfg;
      cfg.seed = sub(opt, 22, n, 0);
      add(out, "fef-bell-peak", n,
          std::abs(fidelity::fully_entangled_fraction(chi, cfg).value - 1.0),
          1e-6);
    }

    {
      dev = 0.0;
      double pdev = 0.0;
      const pure::ResourceCoefficients res = pure::diagonal_resource(n);
      for (const char* preset : {"fourier", "ones"}) {
        const pure::PhaseTable table = pure::PhaseTable::preset(preset, n, n);
        for (int t = 0; t < opt.trials; ++t) {
          const auto psi = haar_random_state(n, sub(opt, 25, n, t));
          for (const auto& oc : pure::teleport_pure(psi, res, table)) {
            dev = std::max(dev, 1.0 - oc.recovery_overlap);
            pdev = std::max(
                pdev, std::abs(oc.probability - 1.0 / (double(n) * n)));
          }
        }
      }
      add(out, "pure-recovery", n, dev, 1e-10);
      add(out, "pure-outcome-probabilities", n, pdev, 1e-12);

      const auto blocks = pure::solve_sender_blocks(
          res, pure::PhaseTable::fourier(n, n));
      const auto residuals = pure::mai_residuals(res, blocks);
      add(out, "pure-block-conditions-fourier", n,
          std::max({residuals.trace_orthogonality, residuals.isometry,
                    residuals.resource_maximality}),
          1e-12);
    }
  }

  {
    // Partial-support run: N1 = 4 resource supported on {1, 2}, entangled
    // pair input inside the support.
    const int n1 = 4;
    const pure::ResourceCoefficients res =
        pure::partial_support_resource(n1, {1, 2});
    const pure::PhaseTable table = pure::PhaseTable::fourier(n1, 2);
    Vector amps = Vector::Zero(n1);
    amps(1) = Complex(1.0 / std::sqrt(2.0), 0.0);
    amps(2) = Complex(1.0 / std::sqrt(2.0), 0.0);
    double dev = 0.0;
    for (const auto& oc :
         pure::teleport_pure(linalg::StateVector(amps), res, table))
      dev = std::max(dev, 1.0 - oc.recovery_overlap);
    add(out, "pure-partial-support-recovery", n1, dev, 1e-10);
  }

  {
    RealVector uniform = RealVector::Constant(2, 0.5);
    const auto ok = pure::maximality_necessity_check(uniform);
    add(out, "necessity-accepts-maximal", 2,
        ok.solvable ? ok.defect : 1.0, 1e-12);

    RealVector skew(2);
    skew << 0.6, 0.4;
    const auto bad = pure::maximality_necessity_check(skew);
    add(out, "necessity-rejects-skewed", 2,
        bad.solvable ? 1.0 : std::abs(bad.defect - 0.25), 1e-12);
  }

  {
    // Monte Carlo fidelity consistency and policy stability at n = 2.
    const int n = 2;
    const DensityOperator chi = random_density(4, sub(opt, 20, n, 0), {2, 2});
    const auto kraus = channel::kraus_form(chi);
    const fidelity::ChannelFn fn = [&kraus](const Matrix& rho) {
      Matrix acc = Matrix::Zero(rho.rows(), rho.cols());
      for (const auto& k : kraus)
        acc += k.weight * (k.op * rho * k.op.adjoint());
      return acc;
    };
    const auto est = fidelity::mc_average_fidelity(fn, n, opt.mc_samples,
                                                   sub(opt, 20, n, 1),
                                                   opt.policy);
    add(out, "fidelity-mc-consistency", n,
        std::abs(est.estimate - fidelity::fidelity_standard(chi)),
        3.0 * est.standard_error + 1e-12);

    const auto ser = fidelity::mc_average_fidelity(fn, n, opt.mc_samples,
                                                   sub(opt, 20, n, 1),
                                                   ExecPolicy::Serial);
    add(out, "mc-policy-bitwise", n,
        std::abs(est.estimate - ser.estimate) +
            std::abs(est.standard_error - ser.standard_error),
        0.0);
  }

  return out;
}

bool all_pass(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.pass; });
}

}  // namespace qtp::verify
