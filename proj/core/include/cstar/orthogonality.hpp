#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cstar/algebra.hpp"

namespace cstar {

enum class NonOrthStatus { certified, refuted, unknown };

/// Outcome of an everywhere-non-orthogonality test. margin is the certified
/// lower bound on min over unit y of the d-th singular value of the slice
/// matrix [u_1 y | ... | u_{k^2} y]; zero when refuted or unknown. Refutation
/// carries the witnessing unit vectors.
struct NonOrthReport {
  NonOrthStatus status = NonOrthStatus::unknown;
  double margin = 0.0;
  std::optional<ComplexVector> witness_x;
  std::optional<ComplexVector> witness_y;
  long evaluations = 0;
};

/// The construction of the conjugating unitary: u satisfies
/// u*(x (x) 1_k)u = 1_d (x) rho(x) + x (x) (1_k - f) for all x in M_d,
/// where f projects onto the first d coordinates of C^k and rho places x in
/// the top-left corner of M_k.
struct Intertwiner {
  ComplexMatrix u;                 // unitary in M_{dk}
  ComplexMatrix f;                 // rank-d projection in M_k
  std::vector<ComplexMatrix> rho;  // rho(e_st) at index s*d + t
  int d = 0;
  int k = 0;
};

/// Builds the intertwiner for k >= d >= 2 by matching the multiplicity
/// decompositions of the two representations of M_d on C^{dk}.
Intertwiner intertwiner_construct(int d, int k, const ToleranceConfig& tol = {});

/// Slices of u in M_d (x) M_k against the matrix-unit coordinate
/// functionals: the slice at index j = p*k + q is the d x d matrix with
/// entries u[(s,p), (t,q)]. Reconstruction sum_j u_j (x) e_pq = u is exact.
std::vector<ComplexMatrix> slices(const ComplexMatrix& u, int d, int k);

/// Search controls for minimizing the slice-rank margin over the unit
/// sphere of C^d.
struct SphereSearchOptions {
  int grid_points = 4096;
  int starts = 8;
  int iters = 150;
  std::uint64_t seed = 1;
  bool use_grid = true;
  bool use_multistart = true;
};

struct MarginEstimate {
  double value = 0.0;
  ComplexVector argmin;
  long evaluations = 0;
};

/// Estimates min over unit y of sigma_d([A_1 y | ... | A_m y]) for a family
/// of d x d matrices by a seeded sphere grid plus multi-start projected
/// descent. The result is an upper bound on the true minimum; certification
/// logic lives in the caller.
MarginEstimate min_rank_margin(const std::vector<ComplexMatrix>& family, int d,
                               const SphereSearchOptions& opts = {});

/// Convenience overload that slices u first.
MarginEstimate min_rank_margin(const ComplexMatrix& u, int d, int k,
                               const SphereSearchOptions& opts = {});

/// Decides everywhere non-orthogonality of M_d (x) 1_k and u*(M_d (x) 1_k)u:
/// refuted when a pair (x, y) of unit vectors with
/// ||(p_x (x) 1) u (p_y (x) 1)|| <= eig_floor is found (exact up to
/// tolerance), certified when the multi-start minimum stays above the
/// confidence threshold with grid corroboration (heuristic), unknown
/// otherwise. budget caps the total number of objective evaluations.
NonOrthReport certify_nonorthogonal_conjugate(const ComplexMatrix& u, int d, int k,
                                              long budget = 20000,
                                              std::uint64_t seed = 1,
                                              const ToleranceConfig& tol = {},
                                              double confidence = 1e-4);

struct DimensionFeasibility {
  bool infeasible = false;
  bool feasible = false;
  bool guaranteed = false;  // k >= d: the construction exists
};

/// Necessary-condition check: infeasible iff k^2 < d + 1. Feasibility does
/// not assert existence except in the guaranteed regime k >= d.
DimensionFeasibility dimension_bound_check(int d, int k);

/// Sampling-only refutation attempt for a general pair of embedded
/// subalgebras of a common ambient algebra: draws Haar rank-one projections
/// per block of each algebra and tests the product norm. Never certifies.
NonOrthReport pair_nonorthogonal_sampled(const SubalgebraEmbedding& emb1,
                                         const SubalgebraEmbedding& emb2, int samples,
                                         std::uint64_t rng_seed,
                                         const ToleranceConfig& tol = {});

}  // namespace cstar
