#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cstar/orthogonality.hpp"

namespace cstar {

enum class SearchStatus { witness_found, no_witness_found, infeasible_by_bound };

struct SearchResult {
  int d = 0;
  int k = 0;
  double best_margin = 0.0;
  ComplexMatrix best_unitary;
  int starts = 0;
  SearchStatus status = SearchStatus::no_witness_found;
  long evaluations = 0;
};

struct SearchOptions {
  int starts = 6;
  int iters = 40;
  long budget = 60000;
  std::uint64_t seed = 1;
};

/// Maximizes the inner margin min over unit y of sigma_d of the slice
/// matrix, over unitaries u in U(dk): multi-start geodesic ascent
/// u <- u exp(itH) with the ascent direction taken from the active inner
/// minimizer. The deterministic intertwiner is always included as a start
/// when k >= d. witness_found requires the final certification pass to
/// return certified; no_witness_found is a statement about the search
/// budget, never about nonexistence.
SearchResult search_unitary(int d, int k, const SearchOptions& opts = {},
                            const ToleranceConfig& tol = {});

struct IntervalRow {
  int k = 0;
  SearchStatus status = SearchStatus::no_witness_found;
  double margin = 0.0;
  int starts = 0;
  std::uint64_t seed = 0;
};

struct IntervalResult {
  int d = 0;
  int k_lo = 0;  // ceil(sqrt(d+1)), analytic
  int k_hi = 0;  // least k with a found witness (at worst d)
  std::vector<IntervalRow> evidence;
};

/// Brackets the least admissible k for a given d: the lower bound is exact
/// arithmetic, the upper bound is the least k at which the search certifies
/// a witness. Evidence rows record every k tried.
IntervalResult narrow_interval(int d, const SearchOptions& opts = {},
                               const ToleranceConfig& tol = {});

struct SpanningResult {
  int d = 0;
  int m_lo = 0;  // d + 1, analytic
  int m_hi = 0;  // least family size with a certified positive margin
  std::vector<ComplexMatrix> best_family;
  double best_margin = 0.0;
  std::vector<std::pair<int, double>> evidence;  // (m, best margin found)
};

/// Searches for small families A_1,...,A_m in M_d with
/// span{A_j y} = C^d for every unit y, decreasing m from d^2 until the
/// search stops finding positive-margin families. General matrices, not
/// unitaries; families are kept Frobenius-normalized.
SpanningResult spanning_family_min(int d, const SearchOptions& opts = {},
                                   const ToleranceConfig& tol = {});

}  // namespace cstar
