#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cstar/fullness.hpp"
#include "cstar/orthogonality.hpp"

namespace cstar {

/// A connecting map of the form x -> x (x) 1_factor. factor = 0 marks the
/// absence of a next level.
struct TensorExtension {
  int factor = 0;

  bool present() const { return factor > 0; }
  ComplexMatrix apply(const ComplexMatrix& x) const;
};

/// Sequences describing a tower after regrouping. regrouped_ks[i] divides
/// regrouped_ls[i] properly and ds[i] is the quotient.
struct TowerParams {
  std::vector<int> ks;
  std::vector<int> ls;
  std::vector<int> regrouped_ks;
  std::vector<int> regrouped_ls;
  std::vector<int> ds;
};

/// One level of the ladder. B_n = M_kappa sits inside the ambient M_N via
/// iota_n(x) = V (x (x) 1_D) V* with V the alignment unitary, N = kappa * D.
/// The level ambient algebra A_n is all of M_N (its embedding is implicit;
/// materializing N^2 unit images is deliberately avoided). level_unitary is
/// the intertwiner used to define iota at this level; the first level has
/// none. lambda and mu are the canonical extensions toward level n+1.
struct TowerLevel {
  int index = 0;        // 1-based
  int ambient_dim = 0;  // N_n
  int kappa = 0;        // B_n = M_kappa
  int inner_d = 0;      // D_n = N_n / kappa
  SubalgebraEmbedding B_emb;
  ComplexMatrix alignment;
  std::optional<ComplexMatrix> level_unitary;
  TensorExtension lambda;
  TensorExtension mu;
};

struct Tower {
  TowerParams params;
  std::vector<TowerLevel> levels;
  std::vector<std::string> log;

  int depth() const { return static_cast<int>(levels.size()); }
  const TowerLevel& level(int n) const;  // 1-based
};

/// Builds the finite UHF ladder: inputs are extended by repeating their last
/// entry when depth exceeds them, then greedily regrouped (absorbing
/// consecutive factors) until each level's k exceeds or equals the product
/// of all previous d's. Level 1 embeds x -> x (x) 1_d; each later level
/// conjugates through the intertwiner of its (d, k) pair. All embeddings are
/// validated and all squares checked during construction.
///
/// Throws std::invalid_argument when some k does not divide its l properly.
Tower build_uhf_tower(const std::vector<int>& ks, const std::vector<int>& ls,
                      int depth, std::uint64_t seed = 1,
                      const ToleranceConfig& tol = {});

/// Residuals of the ladder identities iota_{n+1}(mu_n(e)) = lambda_n(iota_n(e))
/// over all B_n matrix units. When check_expectations is set, additionally
/// compares the two routes A_n -> B_{n+1} through the trace-preserving
/// conditional expectations onto iota(B); that compatibility is a strictly
/// stronger property which the UHF construction does not satisfy, so it is
/// excluded from the default pass criterion and reported separately.
struct SquareReport {
  std::vector<double> square_residuals;
  std::vector<double> expectation_residuals;
  double max_residual = 0.0;
  bool pass = false;
};

SquareReport verify_commuting_squares(const Tower& t, bool check_expectations = false,
                                      const ToleranceConfig& tol = {});

/// Finite-depth regularity surrogate at levels n < m: the subspace
/// lambda_{m,n}(A_n) intersect iota_m(B_m) must equal lambda_{m,n}(iota_n(B_n)).
struct RegularityReport {
  bool regular = false;
  int intersection_dim = 0;
  int expected_dim = 0;
  double containment_residual = 0.0;
  double gram_gap = 0.0;  // spectral separation used to count the intersection
};

RegularityReport regularity_check(const Tower& t, int n, int m,
                                  const ToleranceConfig& tol = {});

/// Per-level everywhere-non-orthogonality statuses for the inductive-limit
/// criterion: at each built level the condition reduces to the conjugate
/// pair form on the level unitary. Levels without a unitary fall back to
/// sampling (refute-only).
struct CorollaryLevelReport {
  int level = 0;
  NonOrthReport report;
};

struct CorollaryReport {
  std::vector<CorollaryLevelReport> levels;
  bool all_certified = false;
};

CorollaryReport verify_corollary_conditions(const Tower& t, long budget = 20000,
                                            std::uint64_t seed = 1,
                                            const ToleranceConfig& tol = {});

/// Pushes a positive level-n element up the ladder until it becomes full
/// relatively to iota_m(B_m), then builds a certificate at that level.
struct PropagationResult {
  bool found = false;
  int level = 0;
  FullnessCertificate certificate;
  std::vector<RealVector> level_spectra;  // E(a) spectra of the levels tried
};

PropagationResult propagate_fullness(const Tower& t, int n, const ComplexMatrix& a,
                                     std::uint64_t seed = 1, int budget = 512,
                                     const ToleranceConfig& tol = {});

/// The delta/gamma/eta recursion: gamma_{n+1} = 120 delta^{1/2},
/// eta_j = 120 (2 gamma_{j+1})^{1/2}, gamma_j = gamma_{j+1} + eta_j, subject
/// to delta < 1e-4, gamma_1 <= eps, and 2 gamma_j < 1e-4 for 2 <= j <= n.
struct BudgetRow {
  int j = 0;
  double gamma = 0.0;
  double eta = 0.0;  // eta_j, not defined for j = n+1 (stored as 0)
};

struct ChristensenBudget {
  double delta = 0.0;
  double q = 0.0;  // delta = 10^{-q}, q on the quarter-decade grid
  std::vector<BudgetRow> table;
};

/// Largest quarter-decade delta = 10^{-q} meeting all constraints.
/// Deterministic. Throws BudgetExhausted naming the binding constraint when
/// no representable delta works.
ChristensenBudget christensen_budget(int n, double eps);

}  // namespace cstar
