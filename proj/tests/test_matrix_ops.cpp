#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include <cstar/matrix_ops.hpp>

#include "oracles.hpp"

using namespace cstar;

namespace {

ComplexMatrix random_hermitian(int n, std::mt19937_64& rng) {
  ComplexMatrix g = ginibre(n, n, rng);
  return hermitian_part(g);
}

}  // namespace

TEST_CASE("matrix units compose like matrix units") {
  CHECK((matrix_unit(3, 0, 1) * matrix_unit(3, 1, 2) - matrix_unit(3, 0, 2)).norm() ==
        doctest::Approx(0.0));
  CHECK((matrix_unit(3, 0, 1) * matrix_unit(3, 2, 1)).norm() == doctest::Approx(0.0));
  CHECK((identity_matrix(4) * identity_matrix(4) - identity_matrix(4)).norm() ==
        doctest::Approx(0.0));
}

TEST_CASE("tensor respects products and adjoints") {
  std::mt19937_64 rng(101);
  ComplexMatrix a = ginibre(3, 3, rng), b = ginibre(2, 2, rng);
  ComplexMatrix c = ginibre(3, 3, rng), d = ginibre(2, 2, rng);
  CHECK((tensor(a, b) * tensor(c, d) - tensor(a * c, b * d)).cwiseAbs().maxCoeff() <=
        1e-12);
  CHECK((tensor(a, b).adjoint() - tensor(a.adjoint(), b.adjoint()))
            .cwiseAbs()
            .maxCoeff() <= 1e-14);
  // Left factor indexes the outer blocks.
  ComplexMatrix t = tensor(matrix_unit(2, 0, 1), identity_matrix(2));
  CHECK(t(0, 2) == Complex(1.0, 0.0));
  CHECK(t(1, 3) == Complex(1.0, 0.0));
  CHECK(t.cwiseAbs().sum() == doctest::Approx(2.0));
}

TEST_CASE("direct sum places blocks on the diagonal") {
  std::mt19937_64 rng(102);
  ComplexMatrix a = random_hermitian(2, rng), b = random_hermitian(3, rng);
  ComplexMatrix s = direct_sum({a, b});
  REQUIRE(s.rows() == 5);
  CHECK((s.block(0, 0, 2, 2) - a).norm() == doctest::Approx(0.0));
  CHECK((s.block(2, 2, 3, 3) - b).norm() == doctest::Approx(0.0));
  CHECK(s.block(0, 2, 2, 3).norm() == doctest::Approx(0.0));

  auto expected = oracle::jacobi_spectrum(a);
  for (double v : oracle::jacobi_spectrum(b)) expected.push_back(v);
  std::sort(expected.begin(), expected.end());
  RealVector got = hermitian_spectrum(s);
  for (int i = 0; i < 5; ++i) CHECK(got(i) == doctest::Approx(expected[i]).epsilon(1e-9));
}

TEST_CASE("hermitian part and defect") {
  std::mt19937_64 rng(103);
  ComplexMatrix g = ginibre(4, 4, rng);
  ComplexMatrix h = hermitian_part(g);
  CHECK(hermiticity_defect(h) <= 1e-15);
  CHECK(is_hermitian(h, 1e-12));
  CHECK((h - (g + g.adjoint()) / 2.0).norm() == doctest::Approx(0.0));
  ComplexMatrix skew = g - g.adjoint();
  if (skew.norm() > 1e-6) CHECK_FALSE(is_hermitian(g, 1e-12));
}

TEST_CASE("eigenvalue routines agree with the Jacobi oracle") {
  std::mt19937_64 rng(104);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    ComplexMatrix h = random_hermitian(n, rng);
    auto expected = oracle::jacobi_spectrum(h);
    RealVector got = hermitian_spectrum(h);
    REQUIRE(got.size() == n);
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(got(i) - expected[static_cast<std::size_t>(i)]) <= 1e-9);
    CHECK(std::abs(min_eigenvalue(h) - expected.front()) <= 1e-9);
    CHECK(std::abs(max_eigenvalue(h) - expected.back()) <= 1e-9);
  }
}

TEST_CASE("min_eigenvalue rejects visibly non-hermitian input") {
  ComplexMatrix a(2, 2);
  a << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(min_eigenvalue(a), std::invalid_argument);
}

TEST_CASE("operator norm matches the oracle and known values") {
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = -5.0;
  CHECK(operator_norm(d) == doctest::Approx(5.0));
  std::mt19937_64 rng(105);
  for (int trial = 0; trial < 10; ++trial) {
    ComplexMatrix x = ginibre(3 + static_cast<int>(rng() % 3),
                              2 + static_cast<int>(rng() % 4), rng);
    CHECK(operator_norm(x) == doctest::Approx(oracle::op_norm(x)).epsilon(1e-9));
  }
  CHECK(operator_norm(haar_unitary(5, std::uint64_t{7})) == doctest::Approx(1.0));
  std::mt19937_64 rng2(106);
  ComplexMatrix y = ginibre(4, 4, rng2);
  CHECK(frobenius_norm(y) == doctest::Approx(y.norm()));
}

TEST_CASE("spectral projection below a cut") {
  ComplexMatrix h = ComplexMatrix::Zero(3, 3);
  h(0, 0) = 0.0;
  h(1, 1) = 0.5;
  h(2, 2) = 2.0;
  std::mt19937_64 rng(107);
  ComplexMatrix u = haar_unitary(3, rng);
  ComplexMatrix a = u * h * u.adjoint();
  ComplexMatrix p = spectral_projection_below(a, 0.1);
  CHECK(is_projection(p, 1e-10));
  CHECK(std::abs(p.trace().real() - 1.0) <= 1e-10);
  CHECK(operator_norm(p * a) <= 1e-10);
  ComplexMatrix p2 = spectral_projection_below(a, 1.0);
  CHECK(std::abs(p2.trace().real() - 2.0) <= 1e-10);
}

TEST_CASE("hermitian functional calculus") {
  std::mt19937_64 rng(108);
  ComplexMatrix h = random_hermitian(4, rng);
  ComplexMatrix sq = hermitian_function(h, [](double x) { return x * x; });
  CHECK((sq - h * h).cwiseAbs().maxCoeff() <= 1e-10);

  auto spec = oracle::jacobi_spectrum(h);
  const double shift = (spec.front() + spec.back()) / 2.0;
  ComplexMatrix shifted = positive_part_shift(h, shift);
  auto shifted_spec = oracle::jacobi_spectrum(shifted);
  std::vector<double> expected;
  for (double v : spec) expected.push_back(std::max(v - shift, 0.0));
  std::sort(expected.begin(), expected.end());
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(std::abs(shifted_spec[i] - expected[i]) <= 1e-9);
}

TEST_CASE("cutoff ramps between delta and eps") {
  ComplexMatrix h = ComplexMatrix::Zero(3, 3);
  h(0, 0) = 0.05;
  h(1, 1) = 0.3;
  h(2, 2) = 0.9;
  ComplexMatrix phi = cutoff_apply(h, 0.1, 0.5);
  CHECK(std::abs(phi(0, 0).real() - 0.0) <= 1e-12);
  CHECK(std::abs(phi(1, 1).real() - 0.5) <= 1e-12);  // midpoint of the ramp
  CHECK(std::abs(phi(2, 2).real() - 1.0) <= 1e-12);
  CHECK_THROWS_AS(cutoff_apply(h, 0.5, 0.1), std::invalid_argument);
}

TEST_CASE("psd square roots") {
  std::mt19937_64 rng(109);
  ComplexMatrix g = ginibre(4, 4, rng);
  ComplexMatrix a = g * g.adjoint() + 0.1 * identity_matrix(4);
  ComplexMatrix s = psd_sqrt(a);
  CHECK((s * s - a).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(hermiticity_defect(s) <= 1e-12);
  ComplexMatrix r = psd_inv_sqrt(a);
  CHECK((r * a * r - identity_matrix(4)).cwiseAbs().maxCoeff() <= 1e-9);
  ComplexMatrix singular = ComplexMatrix::Zero(2, 2);
  singular(0, 0) = 1.0;
  CHECK_THROWS_AS(psd_inv_sqrt(singular), std::invalid_argument);
}

TEST_CASE("hs inner product is a sesquilinear pairing") {
  std::mt19937_64 rng(110);
  ComplexMatrix a = ginibre(3, 3, rng), b = ginibre(3, 3, rng);
  CHECK(std::abs(hs_inner(a, b) - std::conj(hs_inner(b, a))) <= 1e-12);
  CHECK(std::abs(hs_inner(a, a).real() - a.squaredNorm()) <= 1e-10);
  CHECK(std::abs(hs_inner(a, a).imag()) <= 1e-12);
}

TEST_CASE("haar unitaries are unitary, seeded, and roughly uniform") {
  ComplexMatrix u = haar_unitary(4, std::uint64_t{42});
  CHECK(is_unitary(u, 1e-10));
  CHECK((u - haar_unitary(4, std::uint64_t{42})).norm() == doctest::Approx(0.0));
  CHECK((u - haar_unitary(4, std::uint64_t{43})).norm() > 1e-3);

  // E|u_00|^2 = 1/n for the Haar measure.
  std::mt19937_64 rng(111);
  double acc = 0.0;
  const int samples = 2000;
  for (int i = 0; i < samples; ++i) acc += std::norm(haar_unitary(4, rng)(0, 0));
  CHECK(std::abs(acc / samples - 0.25) <= 0.03);
}

TEST_CASE("projection and unitary predicates") {
  CHECK(is_projection(ComplexMatrix::Zero(3, 3), 1e-12));
  CHECK(is_projection(identity_matrix(3), 1e-12));
  CHECK_FALSE(is_projection(2.0 * identity_matrix(3), 1e-12));
  ComplexMatrix h = ComplexMatrix::Zero(2, 2);
  h(0, 1) = 1.0;
  h(1, 0) = 1.0;
  CHECK(is_unitary(h, 1e-12));
  CHECK_FALSE(is_unitary(0.5 * h, 1e-12));
}

TEST_CASE("ginibre is seeded and has unit-variance entries") {
  std::mt19937_64 rng_a(7), rng_b(7);
  CHECK((ginibre(3, 5, rng_a) - ginibre(3, 5, rng_b)).norm() == doctest::Approx(0.0));
  std::mt19937_64 rng(112);
  double acc = 0.0;
  const int samples = 500;
  for (int i = 0; i < samples; ++i) acc += ginibre(2, 2, rng).squaredNorm() / 4.0;
  CHECK(std::abs(acc / samples - 2.0) <= 0.2);  // E|g_ij|^2 = 2
}
