#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <cstar/matrix_ops.hpp>
#include <cstar/orthogonality.hpp>

#include "oracles.hpp"

using namespace cstar;

namespace {

double intertwiner_residual(const Intertwiner& iw) {
  const int d = iw.d, k = iw.k;
  double worst = 0.0;
  for (int s = 0; s < d; ++s)
    for (int t = 0; t < d; ++t) {
      ComplexMatrix est = matrix_unit(d, s, t);
      ComplexMatrix lhs = iw.u.adjoint() * tensor(est, identity_matrix(k)) * iw.u;
      ComplexMatrix rhs = tensor(identity_matrix(d), iw.rho[s * d + t]) +
                          tensor(est, ComplexMatrix(identity_matrix(k) - iw.f));
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  return worst;
}

}  // namespace

TEST_CASE("intertwiner satisfies the conjugation identity on the whole grid") {
  for (int d = 2; d <= 4; ++d)
    for (int k = d; k <= 5; ++k) {
      CAPTURE(d);
      CAPTURE(k);
      Intertwiner iw = intertwiner_construct(d, k);
      CHECK(iw.d == d);
      CHECK(iw.k == k);
      CHECK(is_unitary(iw.u, 1e-10));
      CHECK(is_projection(iw.f, 1e-10));
      CHECK(std::abs(iw.f.trace().real() - d) <= 1e-10);
      CHECK(intertwiner_residual(iw) <= 1e-10);
      // rho is a *-homomorphism landing in the corner cut by f.
      for (int s = 0; s < d; ++s)
        for (int t = 0; t < d; ++t) {
          const ComplexMatrix& r = iw.rho[s * d + t];
          CHECK((iw.f * r - r).cwiseAbs().maxCoeff() <= 1e-10);
          CHECK((r - iw.rho[t * d + s].adjoint()).cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
}

TEST_CASE("square case collapses to a flip of the legs") {
  // When k = d the projection f is full, so u*(x (x) 1)u = 1 (x) rho(x).
  Intertwiner iw = intertwiner_construct(3, 3);
  CHECK((iw.f - identity_matrix(3)).cwiseAbs().maxCoeff() <= 1e-12);
  std::mt19937_64 rng(7);
  ComplexMatrix x = ginibre(3, 3, rng);
  ComplexMatrix lhs = iw.u.adjoint() * tensor(x, identity_matrix(3)) * iw.u;
  ComplexMatrix rho_x = ComplexMatrix::Zero(3, 3);
  for (int s = 0; s < 3; ++s)
    for (int t = 0; t < 3; ++t) rho_x += x(s, t) * iw.rho[s * 3 + t];
  CHECK((lhs - tensor(identity_matrix(3), rho_x)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("slices reconstruct the operator") {
  std::mt19937_64 rng(11);
  const int d = 3, k = 4;
  ComplexMatrix u = oracle::haar(d * k, rng);
  std::vector<ComplexMatrix> sl = slices(u, d, k);
  REQUIRE(static_cast<int>(sl.size()) == k * k);
  ComplexMatrix rebuilt = ComplexMatrix::Zero(d * k, d * k);
  for (int p = 0; p < k; ++p)
    for (int q = 0; q < k; ++q)
      rebuilt += tensor(sl[p * k + q], matrix_unit(k, p, q));
  CHECK((rebuilt - u).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("min_rank_margin has analytic anchors") {
  SUBCASE("all matrix units give margin one") {
    std::vector<ComplexMatrix> family;
    const int d = 3;
    for (int s = 0; s < d; ++s)
      for (int t = 0; t < d; ++t) family.push_back(matrix_unit(d, s, t));
    MarginEstimate m = min_rank_margin(family, d);
    CHECK(m.value == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("fewer than d members forces rank deficiency") {
    std::vector<ComplexMatrix> family = {identity_matrix(3)};
    MarginEstimate m = min_rank_margin(family, 3);
    CHECK(m.value <= 1e-9);
  }
  SUBCASE("identity and a symmetry share an eigenvector") {
    // For {1, X} in M_2 the slice matrix at y = (1,1)/sqrt(2) has rank 1.
    ComplexMatrix x(2, 2);
    x << 0, 1, 1, 0;
    MarginEstimate m = min_rank_margin({identity_matrix(2), x}, 2);
    CHECK(m.value <= 1e-6);
    REQUIRE(m.argmin.size() == 2);
    CHECK(std::abs(std::abs(m.argmin(0)) - 1.0 / std::sqrt(2.0)) <= 1e-4);
  }
}

TEST_CASE("margin is invariant under right-leg unitary moves") {
  // u -> (1 (x) w) u (1 (x) w') reshuffles the slices inside their own span,
  // so the sliced margin objective is unchanged pointwise.
  std::mt19937_64 rng(13);
  const int d = 2, k = 3;
  Intertwiner iw = intertwiner_construct(d, k);
  ComplexMatrix w = oracle::haar(k, rng), wp = oracle::haar(k, rng);
  ComplexMatrix moved = tensor(identity_matrix(d), w) * iw.u *
                        tensor(identity_matrix(d), wp);
  SphereSearchOptions opts;
  opts.use_multistart = false;  // deterministic grid-only evaluation
  MarginEstimate base = min_rank_margin(iw.u, d, k, opts);
  MarginEstimate after = min_rank_margin(moved, d, k, opts);
  CHECK(after.value == doctest::Approx(base.value).epsilon(1e-8));
}

TEST_CASE("certification of everywhere non-orthogonality") {
  SUBCASE("the constructed intertwiners certify on the grid") {
    for (int d = 2; d <= 4; ++d)
      for (int k = d; k <= 5; ++k) {
        CAPTURE(d);
        CAPTURE(k);
        NonOrthReport r = certify_nonorthogonal_conjugate(
            intertwiner_construct(d, k).u, d, k);
        CHECK(r.status == NonOrthStatus::certified);
        CHECK(r.margin > 1e-4);
        CHECK(r.evaluations > 0);
      }
  }
  SUBCASE("the identity is refuted with a checkable witness") {
    const int d = 3, k = 3;
    NonOrthReport r = certify_nonorthogonal_conjugate(identity_matrix(d * k), d, k);
    REQUIRE(r.status == NonOrthStatus::refuted);
    REQUIRE(r.witness_x.has_value());
    REQUIRE(r.witness_y.has_value());
    CHECK(std::abs(r.witness_x->norm() - 1.0) <= 1e-9);
    CHECK(std::abs(r.witness_y->norm() - 1.0) <= 1e-9);
    // The witnessed compression really vanishes: p_x (x) 1 and p_y (x) 1
    // commute through the identity, so orthogonality of x and y suffices.
    CHECK(std::abs((*r.witness_x).dot(*r.witness_y)) <= 1e-8);
  }
  SUBCASE("refutation is stable under a larger budget") {
    NonOrthReport small = certify_nonorthogonal_conjugate(identity_matrix(6), 2, 3,
                                                          2000, 5);
    NonOrthReport large = certify_nonorthogonal_conjugate(identity_matrix(6), 2, 3,
                                                          50000, 5);
    CHECK(small.status == NonOrthStatus::refuted);
    CHECK(large.status == NonOrthStatus::refuted);
  }
}

TEST_CASE("dimension bound check matches the closed form") {
  for (int d = 2; d <= 10; ++d)
    for (int k = 2; k <= 10; ++k) {
      CAPTURE(d);
      CAPTURE(k);
      DimensionFeasibility f = dimension_bound_check(d, k);
      CHECK(f.infeasible == (k * k < d + 1));
      CHECK(f.feasible == (k * k >= d + 1));
      CHECK(f.guaranteed == (k >= d));
      CHECK(f.infeasible != f.feasible);
      if (f.guaranteed) CHECK(f.feasible);
    }
  CHECK_THROWS_AS(dimension_bound_check(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(dimension_bound_check(2, 0), std::invalid_argument);
}

TEST_CASE("sampled pair refutation") {
  SUBCASE("two copies of the diagonal share rank-one projections") {
    SubalgebraEmbedding diag = diagonal_embedding(2);
    NonOrthReport r = pair_nonorthogonal_sampled(diag, diag, 200, 3);
    CHECK(r.status == NonOrthStatus::refuted);
    REQUIRE(r.witness_x.has_value());
  }
  SUBCASE("scalars can never refute and never certify") {
    SubalgebraEmbedding s = scalar_embedding(2);
    NonOrthReport r = pair_nonorthogonal_sampled(s, s, 100, 3);
    CHECK(r.status == NonOrthStatus::unknown);
    CHECK(r.margin > 0.0);
  }
}
