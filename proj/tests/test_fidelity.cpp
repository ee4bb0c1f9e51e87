#include <cmath>

#include "doctest.h"
#include "qtp/channel.hpp"
#include "qtp/fidelity.hpp"
#include "qtp/linalg.hpp"
#include "qtp/states.hpp"
#include "qtp/weyl.hpp"
#include "test_support.hpp"

using namespace qtp;
using namespace qtp::fidelity;
using linalg::DensityOperator;
using linalg::haar_random_unitary;
using linalg::random_density;

namespace {

OptimizerConfig light_config(std::uint64_t seed) {
  OptimizerConfig cfg;
  cfg.restarts = 4;
  cfg.max_iterations = 1500;
  cfg.scan_samples = 1500;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_SUITE("fidelity") {

TEST_CASE("singlet fraction of the canonical families") {
  for (int n = 2; n <= 4; ++n) {
    CAPTURE(n);
    for (const double f : {1.0 / (n * n), 0.3, 0.8, 1.0}) {
      const auto chi = states::isotropic(n, f);
      CHECK(std::abs(singlet_fraction(chi) - f) <= 1e-12);
    }
  }
  // the shifted Bell state is orthogonal to |Phi>
  const auto basis = weyl::make_basis(2);
  RealVector w(4);
  w << 0, 1, 0, 0;
  CHECK(singlet_fraction(states::bell_diagonal(2, w)) <= 1e-12);
}

TEST_CASE("standard fidelity obeys the affine law on isotropic states") {
  for (int n = 2; n <= 5; ++n) {
    CAPTURE(n);
    for (const double f : {1.0 / (n * n), 0.5, 0.8, 1.0}) {
      const auto chi = states::isotropic(n, f);
      const double expect = (n * f + 1.0) / (n + 1.0);
      CHECK(std::abs(fidelity_standard(chi) - expect) <= 1e-12);
      CHECK(std::abs(affine_fidelity(n, f) - expect) <= 1e-15);
    }
  }
}

TEST_CASE("fef objective at the identity is the singlet fraction") {
  const auto chi = random_density(9, 7, {3, 3});
  CHECK(std::abs(fef_objective(chi, Matrix::Identity(3, 3)) -
                 singlet_fraction(chi)) <= 1e-13);
}

TEST_CASE("optimizer certifies every Bell state as maximally entangled") {
  for (int n = 2; n <= 3; ++n) {
    CAPTURE(n);
    const auto basis = weyl::make_basis(n);
    // a couple of representative outcomes per dimension keeps this fast
    for (const auto [s, t] : {std::pair{0, 1}, std::pair{n - 1, n - 1}}) {
      const Vector& phi = basis.bell(s, t);
      const auto chi = DensityOperator::trusted(
          Matrix(phi * phi.adjoint()), {n, n});
      const auto res = fully_entangled_fraction(chi, light_config(11));
      CHECK(std::abs(res.value - 1.0) <= 1e-6);
      CHECK(res.w.defect() <= kUnitaryTol);
    }
  }
}

TEST_CASE("optimizer recovers F on right-rotated isotropic states") {
  const int n = 2;
  const double f = 0.8;
  const auto chi = states::isotropic(n, f);
  const Matrix v = haar_random_unitary(n, 21).mat();
  const auto rot = states::rotated(chi, linalg::UnitaryOperator(v),
                                   states::Side::Right);
  const auto res = fully_entangled_fraction(rot, light_config(13));
  CHECK(std::abs(res.value - f) <= 1e-6);
}

TEST_CASE("fef dominates the singlet fraction and the Haar scan") {
  for (int trial = 0; trial < 3; ++trial) {
    const auto chi = random_density(4, 700 + trial, {2, 2});
    const auto res = fully_entangled_fraction(chi, light_config(17 + trial));
    CHECK(res.value >= singlet_fraction(chi) - 1e-9);
    const auto scan = fef_haar_scan(chi, 2000, 29 + trial);
    CHECK(scan.value <= res.value + 1e-6);
    // the returned value is the exactly evaluated objective at w
    CHECK(std::abs(fef_objective(chi, res.w.mat()) - res.value) <= 1e-12);
  }
}

TEST_CASE("haar scan is deterministic and policy independent") {
  const auto chi = random_density(4, 44, {2, 2});
  const auto a = fef_haar_scan(chi, 1000, 5, ExecPolicy::Serial);
  const auto b = fef_haar_scan(chi, 1000, 5, ExecPolicy::Parallel);
  CHECK(a.value == b.value);
  CHECK(max_abs_diff(a.u, b.u) == 0.0);
}

TEST_CASE("optimal protocol beats the standard one on the shifted Bell state") {
  RealVector w(4);
  w << 0, 1, 0, 0;
  const auto chi = states::bell_diagonal(2, w);
  CHECK(std::abs(fidelity_standard(chi) - 1.0 / 3.0) <= 1e-12);
  const double fopt = fidelity_optimal(chi, light_config(31));
  CHECK(std::abs(fopt - 1.0) <= 1e-6);
}

TEST_CASE("general fidelity with Weyl corrections is the standard fidelity") {
  for (int n = 2; n <= 3; ++n) {
    CAPTURE(n);
    const auto chi = random_density(n * n, 800 + n, {n, n});
    const auto fam = channel::CorrectionFamily::weyl(weyl::make_basis(n));
    CHECK(std::abs(fidelity_general(chi, fam) - fidelity_standard(chi)) <=
          1e-12);
  }
}

TEST_CASE("general fidelity with rotated corrections hits the affine law") {
  const int n = 2;
  const auto basis = weyl::make_basis(n);
  const auto chi = random_density(n * n, 57, {n, n});
  const Matrix w = haar_random_unitary(n, 58).mat();
  const auto fam = channel::CorrectionFamily::rotated_weyl(basis, w);
  const double expect = affine_fidelity(n, fef_objective(chi, w));
  CHECK(std::abs(fidelity_general(chi, fam) - expect) <= 1e-12);
}

TEST_CASE("monte carlo fidelity matches the closed form") {
  const int n = 2;
  const auto chi = states::isotropic(n, 0.8);
  const auto terms = channel::kraus_form(chi);
  const ChannelFn fn = [terms, n](const Matrix& m) {
    Matrix out = Matrix::Zero(n, n);
    for (const auto& k : terms) out += k.weight * k.op * m * k.op.adjoint();
    return out;
  };
  const auto est = mc_average_fidelity(fn, n, 20000, 3);
  CHECK(est.standard_error > 0.0);
  CHECK(std::abs(est.estimate - fidelity_standard(chi)) <=
        3.0 * est.standard_error + 1e-12);

  // deterministic per seed, bit-identical across policies
  const auto again = mc_average_fidelity(fn, n, 20000, 3);
  CHECK(est.estimate == again.estimate);
  const auto serial = mc_average_fidelity(fn, n, 20000, 3, ExecPolicy::Serial);
  CHECK(est.estimate == serial.estimate);
  CHECK(est.standard_error == serial.standard_error);
}

TEST_CASE("analyze_resource ties the pieces together") {
  const auto chi = states::isotropic(2, 0.75);
  const auto a = analyze_resource(chi, light_config(99));
  CHECK(a.n == 2);
  CHECK(std::abs(a.singlet_fraction - 0.75) <= 1e-12);
  CHECK(std::abs(a.f_standard - affine_fidelity(2, a.singlet_fraction)) <=
        1e-15);
  CHECK(std::abs(a.f_optimal - affine_fidelity(2, a.fef)) <= 1e-15);
  CHECK(a.fef >= a.singlet_fraction - 1e-9);
  CHECK(a.report.restarts_used >= 1);
}

}  // TEST_SUITE
