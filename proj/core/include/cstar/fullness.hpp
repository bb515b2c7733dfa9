#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cstar/algebra.hpp"

namespace cstar {

enum class CertificateKind { general, unitary };

/// Witness that a is full relatively to B: elements x_1,...,x_m of B with
/// min_eigenvalue(sum x_j* a x_j) >= margin > 0. kind=unitary promises every
/// element is unitary.
struct FullnessCertificate {
  std::vector<ComplexMatrix> elements;
  double margin = 0.0;
  CertificateKind kind = CertificateKind::general;
};

/// Decision output of relatively_full. When not full, witness holds a
/// spectral projection p of E(a) at eigenvalue <= eig_floor; p lies in the
/// commutant and is orthogonal to a up to tolerance.
struct RelativeFullness {
  bool full = false;
  ComplexMatrix expectation;
  double expectation_min_eig = 0.0;
  std::optional<ComplexMatrix> witness;
};

/// Decides relative fullness of the positive element a with respect to the
/// embedded algebra: full iff the conditional expectation of a onto the
/// commutant is invertible above eig_floor.
RelativeFullness relatively_full(const ComplexMatrix& a,
                                 const SubalgebraEmbedding& emb,
                                 const ToleranceConfig& tol = {});

/// Randomized certificate construction: samples Haar unitaries of B pushed
/// through the embedding and accumulates sum u_j* a u_j until its smallest
/// eigenvalue reaches target_margin * m * min_eigenvalue(E(a)), with m the
/// number of samples so far. The identity is seeded as the first element.
/// Returns the unitaries unscaled (kind=unitary) with the achieved smallest
/// eigenvalue as margin; normalize_certificate rescales to margin 1 when the
/// scaled form is wanted.
///
/// Throws std::invalid_argument when a is not relatively full and
/// BudgetExhausted when budget samples do not reach the target (a signal of
/// a small spectral gap, not of mathematical failure).
FullnessCertificate certificate_from_expectation(const ComplexMatrix& a,
                                                 const SubalgebraEmbedding& emb,
                                                 double target_margin,
                                                 std::uint64_t rng_seed,
                                                 int budget = 512,
                                                 const ToleranceConfig& tol = {});

/// One linear combination x = sum_j lambda_j w_j.
using SpanCombination = std::vector<std::pair<Complex, ComplexMatrix>>;

/// Given combinations x_i = sum_j lambda_ij w_ij with
/// sum_i x_i* a x_i >= 1, returns the multiset in which each w_ij is
/// repeated ceil(l_i |lambda_ij|^2) times (l_i the combination length), so
/// that sum over the multiset of w* a w dominates sum_i x_i* a x_i up to
/// eig_floor. Validates both inequalities.
std::vector<ComplexMatrix> span_to_elements(const ComplexMatrix& a,
                                            const std::vector<SpanCombination>& combos,
                                            const ToleranceConfig& tol = {});

/// Rescales the family by delta^{-1/2}, delta = min_eigenvalue(sum x* a x),
/// so the certified sum dominates 1. Throws when the sum is not invertible.
FullnessCertificate normalize_certificate(const ComplexMatrix& a,
                                          const std::vector<ComplexMatrix>& xs,
                                          const ToleranceConfig& tol = {});

/// Transfers a certificate for b in B to a certificate for a, given x in B
/// with either b <= x*ax or ||b - x*ax|| < ||b||. In the general branch the
/// cutoff function phi (0 on [0,delta], 1 on [eps,infty), eps the midpoint
/// of (delta, ||b||)) is applied to b and the composed elements are
/// x phi(b) y_j. Throws std::invalid_argument when the norm hypothesis fails
/// or when the chained margin min_eig(sum y_j* (b-eps)_+ y_j) vanishes.
FullnessCertificate dominate_reduction(const ComplexMatrix& a, const ComplexMatrix& x,
                                       const ComplexMatrix& b,
                                       const FullnessCertificate& b_cert,
                                       const ToleranceConfig& tol = {});

/// For the word w = b_1 a b_2 a ... a b_r returns x in B with
/// x* a x >= w* a w: a single peel x = ||a^{1/2} v a^{1/2}|| b_r where
/// v = b_1 a ... a b_{r-1}. The domination is verified before returning.
ComplexMatrix word_reduction(const ComplexMatrix& a,
                             const std::vector<ComplexMatrix>& word,
                             const ToleranceConfig& tol = {});

/// Re-derivation of a certificate's claim.
struct VerifyReport {
  bool ok = false;
  double achieved_min_eig = 0.0;
  double worst_membership = 0.0;
  std::string detail;
};

/// Recomputes sum x_j* a x_j and checks its smallest eigenvalue against the
/// stated margin (and unitarity when kind=unitary). When an embedding is
/// supplied, B-membership of every element is re-checked as well.
VerifyReport verify_certificate(const ComplexMatrix& a, const FullnessCertificate& cert,
                                const SubalgebraEmbedding* emb = nullptr,
                                const ToleranceConfig& tol = {});

struct NormInequality {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// Checks ||x|| <= 2 sum_{j=1}^{3} ||(1-f_j) x (1-f_j)|| for pairwise
/// orthogonal projections f_1, f_2, f_3. Inputs are validated.
NormInequality norm_inequality_check(const ComplexMatrix& x, const ComplexMatrix& f1,
                                     const ComplexMatrix& f2, const ComplexMatrix& f3,
                                     const ToleranceConfig& tol = {});

/// Certificate for a1 (x) a2 from certificates for the factors: elements
/// x_i (x) y_j, margin the product of margins. kind=unitary when both
/// inputs are unitary.
FullnessCertificate tensor_certificate(const FullnessCertificate& c1,
                                       const ComplexMatrix& a1,
                                       const FullnessCertificate& c2,
                                       const ComplexMatrix& a2,
                                       const ToleranceConfig& tol = {});

}  // namespace cstar
