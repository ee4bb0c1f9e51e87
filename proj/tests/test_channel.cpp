#include <cmath>

#include "doctest.h"
#include "qtp/channel.hpp"
#include "qtp/linalg.hpp"
#include "qtp/states.hpp"
#include "qtp/weyl.hpp"
#include "test_support.hpp"

using namespace qtp;
using namespace qtp::channel;
using linalg::DensityOperator;
using linalg::haar_random_unitary;
using linalg::random_density;

TEST_SUITE("channel") {

TEST_CASE("correction family constructors") {
  const auto basis = weyl::make_basis(2);
  const auto fam = CorrectionFamily::weyl(basis);
  CHECK(fam.n == 2);
  CHECK(max_abs_diff(fam.at(0, 1), basis.op(0, 1)) == 0.0);

  const Matrix w = haar_random_unitary(2, 3).mat();
  const auto rot = CorrectionFamily::rotated_weyl(basis, w);
  CHECK(max_abs_diff(rot.at(1, 1), Matrix(w * basis.op(1, 1))) == 0.0);

  CHECK_THROWS_AS(
      CorrectionFamily::custom(2, {Matrix::Identity(2, 2), Matrix::Zero(2, 2),
                                   Matrix::Identity(2, 2),
                                   Matrix::Identity(2, 2)}),
      ValidationError);
  CHECK_THROWS_AS(CorrectionFamily::custom(2, {Matrix::Identity(2, 2)}),
                  DimensionError);
}

TEST_CASE("maximally entangled resource gives the identity channel") {
  for (int n = 2; n <= 4; ++n) {
    CAPTURE(n);
    const auto chi = states::isotropic(n, 1.0);
    const auto rho = random_density(n, 50 + n);
    const auto out = apply_standard(chi, rho);
    CHECK(max_abs_diff(out.rho_out.mat(), rho.mat()) <= 1e-12);
    CHECK(out.trace_defect <= 1e-12);
  }
}

TEST_CASE("maximally mixed resource erases the input") {
  const int n = 2;
  const auto chi = states::isotropic(n, 1.0 / (n * n));
  const auto rho = random_density(n, 77);
  const auto out = apply_standard(chi, rho);
  CHECK(max_abs_diff(out.rho_out.mat(),
                     Matrix(Matrix::Identity(n, n) / n)) <= 1e-12);
}

TEST_CASE("general form with Weyl corrections reduces to the standard one") {
  for (int n = 2; n <= 3; ++n) {
    CAPTURE(n);
    const auto chi = random_density(n * n, 200 + n, {n, n});
    const auto rho = random_density(n, 300 + n);
    const auto fam = CorrectionFamily::weyl(weyl::make_basis(n));
    const auto a = apply_standard(chi, rho);
    const auto b = apply_general(chi, fam, rho);
    CHECK(max_abs_diff(a.rho_out.mat(), b.rho_out.mat()) <= 1e-12);
  }
}

TEST_CASE("closed forms match the enumeration oracle") {
  for (int n = 2; n <= 3; ++n) {
    CAPTURE(n);
    const auto basis = weyl::make_basis(n);
    const auto chi = random_density(n * n, 400 + n, {n, n});
    const auto rho = random_density(n, 500 + n);

    const auto std_fam = CorrectionFamily::weyl(basis);
    CHECK(max_abs_diff(apply_standard(chi, rho).rho_out.mat(),
                       simulate_protocol(chi, std_fam, rho).rho_out.mat()) <=
          kOracleTol);

    std::vector<Matrix> ops;
    for (int k = 0; k < n * n; ++k)
      ops.push_back(haar_random_unitary(n, 600 + 10 * n + k).mat());
    const auto fam = CorrectionFamily::custom(n, std::move(ops));
    CHECK(max_abs_diff(apply_general(chi, fam, rho).rho_out.mat(),
                       simulate_protocol(chi, fam, rho).rho_out.mat()) <=
          kOracleTol);
  }
}

TEST_CASE("optimal form equals the general form on the rotated family") {
  const int n = 2;
  const auto basis = weyl::make_basis(n);
  const auto chi = random_density(n * n, 81, {n, n});
  const auto rho = random_density(n, 82);
  const auto w = haar_random_unitary(n, 83);
  const auto rot = CorrectionFamily::rotated_weyl(basis, w.mat());
  const auto a = apply_optimal(chi, rho, w);
  const auto b = apply_general(chi, rot, rho);
  CHECK(max_abs_diff(a.rho_out.mat(), b.rho_out.mat()) <= 1e-13);
  CHECK(a.method == ChannelMethod::Optimal);
}

TEST_CASE("outputs are valid density operators") {
  const int n = 3;
  const auto chi = random_density(n * n, 91, {n, n});
  const auto rho = random_density(n, 92);
  const auto out = apply_standard(chi, rho);
  const Matrix& m = out.rho_out.mat();
  CHECK(max_abs_diff(m, Matrix(m.adjoint())) <= 1e-12);
  CHECK(std::abs(m.trace() - Complex(1, 0)) <= 1e-12);
  CHECK(out.rho_out.dims() == std::vector<int>{n});
}

TEST_CASE("channel is linear in the resource") {
  const int n = 2;
  const auto chi1 = random_density(n * n, 61, {n, n});
  const auto chi2 = random_density(n * n, 62, {n, n});
  const auto rho = random_density(n, 63);
  const double alpha = 0.3;
  const auto mix = DensityOperator::trusted(
      alpha * chi1.mat() + (1 - alpha) * chi2.mat(), {n, n});
  const Matrix lhs = apply_standard(mix, rho).rho_out.mat();
  const Matrix rhs = alpha * apply_standard(chi1, rho).rho_out.mat() +
                     (1 - alpha) * apply_standard(chi2, rho).rho_out.mat();
  CHECK(max_abs_diff(lhs, rhs) <= 1e-12);
}

TEST_CASE("serial and parallel kernels agree") {
  const int n = 3;
  const auto chi = random_density(n * n, 71, {n, n});
  const auto rho = random_density(n, 72);
  const auto fam = CorrectionFamily::weyl(weyl::make_basis(n));
  CHECK(max_abs_diff(
            apply_general(chi, fam, rho, ExecPolicy::Serial).rho_out.mat(),
            apply_general(chi, fam, rho, ExecPolicy::Parallel).rho_out.mat()) <=
        1e-12);
  CHECK(max_abs_diff(
            apply_standard(chi, rho, ExecPolicy::Serial).rho_out.mat(),
            apply_standard(chi, rho, ExecPolicy::Parallel).rho_out.mat()) <=
        1e-12);
}

TEST_CASE("kraus form reproduces the standard channel") {
  const int n = 2;
  const auto chi = random_density(n * n, 55, {n, n});
  const auto rho = random_density(n, 56);
  const auto terms = kraus_form(chi);
  REQUIRE(static_cast<int>(terms.size()) == n * n);
  double wsum = 0;
  Matrix acc = Matrix::Zero(n, n);
  for (const auto& k : terms) {
    CHECK(k.weight >= 0.0);
    wsum += k.weight;
    acc += k.weight * k.op * rho.mat() * k.op.adjoint();
  }
  CHECK(std::abs(wsum - 1.0) <= kTraceTol);
  CHECK(max_abs_diff(acc, apply_standard(chi, rho).rho_out.mat()) <= 1e-12);
}

}  // TEST_SUITE
