#include "cstar/ksearch.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace cstar {

namespace {

ComplexMatrix unitary_exp(const ComplexMatrix& h, double t) {
  // exp(i t h) for hermitian h.
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  ComplexVector phases(es.eigenvalues().size());
  for (Eigen::Index j = 0; j < phases.size(); ++j)
    phases(j) = std::exp(Complex(0.0, t * es.eigenvalues()(j)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

SphereSearchOptions inner_options(std::uint64_t seed) {
  SphereSearchOptions inner;
  inner.grid_points = 192;
  inner.starts = 2;
  inner.iters = 50;
  inner.seed = seed;
  return inner;
}

// One geodesic ascent pass on u for the maximin objective
// u -> min over unit y of sigma_d([u_1 y | ... | u_{k^2} y]).
double ascend_unitary(ComplexMatrix& u, int d, int k, int iters,
                      std::uint64_t seed, long budget, long& evaluations) {
  std::uint64_t counter = seed;
  MarginEstimate inner = min_rank_margin(u, d, k, inner_options(counter++));
  evaluations += inner.evaluations;
  double value = inner.value;

  for (int it = 0; it < iters && evaluations < budget; ++it) {
    // First-order model at the active minimizer y: sigma = tr(u R) with
    // R = (y w*) (x) Z^T, Z the k x k reshaping of the right singular
    // vector; the steepest ascent direction is H = i(C - C*)/2, C = R u.
    auto family = slices(u, d, k);
    ComplexMatrix stack(d, static_cast<Eigen::Index>(family.size()));
    for (std::size_t j = 0; j < family.size(); ++j)
      stack.col(static_cast<Eigen::Index>(j)) = family[j] * inner.argmin;
    Eigen::JacobiSVD<ComplexMatrix> svd(stack,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
    ComplexVector w = svd.matrixU().col(d - 1);
    ComplexVector v = svd.matrixV().col(d - 1);
    ComplexMatrix z(k, k);
    for (int p = 0; p < k; ++p)
      for (int q = 0; q < k; ++q) z(p, q) = v(p * k + q);
    ComplexMatrix r = tensor(inner.argmin * w.adjoint(), z.transpose());
    ComplexMatrix c = r * u;
    ComplexMatrix h = Complex(0.0, 0.5) * (c - c.adjoint());
    double hn = h.norm();
    if (hn < 1e-14) break;
    h /= hn;

    bool improved = false;
    double step = 0.5;
    for (int bt = 0; bt < 9 && evaluations < budget; ++bt) {
      ComplexMatrix cand = u * unitary_exp(h, step);
      MarginEstimate trial = min_rank_margin(cand, d, k, inner_options(counter++));
      evaluations += trial.evaluations;
      if (trial.value > value + 1e-12) {
        u = std::move(cand);
        value = trial.value;
        inner = std::move(trial);
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return value;
}

}  // namespace

SearchResult search_unitary(int d, int k, const SearchOptions& opts,
                            const ToleranceConfig& tol) {
  tol.validate();
  if (d < 2 || k < 1)
    throw std::invalid_argument("search_unitary: need d >= 2 and k >= 1");
  if (opts.budget < 100 || opts.starts < 1 || opts.iters < 0)
    throw std::invalid_argument("search_unitary: invalid budget");

  SearchResult result;
  result.d = d;
  result.k = k;
  result.starts = opts.starts;

  DimensionFeasibility bound = dimension_bound_check(d, k);
  if (bound.infeasible) {
    result.status = SearchStatus::infeasible_by_bound;
    return result;
  }

  std::mt19937_64 rng(opts.seed);
  double best_value = -1.0;
  ComplexMatrix best_u;
  for (int s = 0; s < opts.starts && result.evaluations < opts.budget; ++s) {
    ComplexMatrix u;
    if (s == 0 && k >= d)
      u = intertwiner_construct(d, k, tol).u;
    else
      u = haar_unitary(d * k, rng);
    double value = ascend_unitary(u, d, k, opts.iters,
                                  opts.seed + 977 * static_cast<std::uint64_t>(s + 1),
                                  opts.budget, result.evaluations);
    if (value > best_value) {
      best_value = value;
      best_u = u;
    }
  }

  result.best_unitary = best_u;
  if (best_u.size() == 0) {
    result.status = SearchStatus::no_witness_found;
    return result;
  }
  NonOrthReport certify = certify_nonorthogonal_conjugate(
      best_u, d, k, std::max<long>(20000, opts.budget / 4), opts.seed, tol);
  result.evaluations += certify.evaluations;
  if (certify.status == NonOrthStatus::certified) {
    result.status = SearchStatus::witness_found;
    result.best_margin = certify.margin;
  } else {
    result.status = SearchStatus::no_witness_found;
    result.best_margin = std::max(0.0, std::min(best_value, certify.margin));
  }
  return result;
}

IntervalResult narrow_interval(int d, const SearchOptions& opts,
                               const ToleranceConfig& tol) {
  if (d < 2) throw std::invalid_argument("narrow_interval: d must be >= 2");
  IntervalResult out;
  out.d = d;
  int k_lo = 2;
  while (static_cast<long>(k_lo) * k_lo < static_cast<long>(d) + 1) ++k_lo;
  out.k_lo = k_lo;
  out.k_hi = d;  // existence is guaranteed at k = d

  bool found = false;
  for (int k = k_lo; k <= d; ++k) {
    SearchResult r = search_unitary(d, k, opts, tol);
    IntervalRow row;
    row.k = k;
    row.status = r.status;
    row.margin = r.best_margin;
    row.starts = r.starts;
    row.seed = opts.seed;
    out.evidence.push_back(row);
    if (!found && r.status == SearchStatus::witness_found) {
      out.k_hi = k;
      found = true;
    }
  }
  return out;
}

SpanningResult spanning_family_min(int d, const SearchOptions& opts,
                                   const ToleranceConfig& tol) {
  tol.validate();
  if (d < 2) throw std::invalid_argument("spanning_family_min: d must be >= 2");
  if (opts.budget < 100) throw std::invalid_argument("spanning_family_min: invalid budget");

  SpanningResult out;
  out.d = d;
  out.m_lo = d + 1;
  out.m_hi = d * d;

  auto normalize_family = [](std::vector<ComplexMatrix>& fam) {
    double total = 0.0;
    for (const auto& a : fam) total += a.squaredNorm();
    if (total <= 0.0) return;
    const double scale = std::sqrt(static_cast<double>(fam.size()) / total);
    for (auto& a : fam) a *= scale;
  };

  auto evaluate = [&](const std::vector<ComplexMatrix>& fam, std::uint64_t seed,
                      long& evals) {
    MarginEstimate e = min_rank_margin(fam, d, inner_options(seed));
    evals += e.evaluations;
    return e;
  };

  // Gradient ascent over the family entries for the same maximin objective.
  auto ascend_family = [&](std::vector<ComplexMatrix> fam, std::uint64_t seed,
                           long& evals) {
    normalize_family(fam);
    MarginEstimate cur = evaluate(fam, seed, evals);
    for (int it = 0; it < opts.iters && evals < opts.budget; ++it) {
      ComplexMatrix stack(d, static_cast<Eigen::Index>(fam.size()));
      for (std::size_t j = 0; j < fam.size(); ++j)
        stack.col(static_cast<Eigen::Index>(j)) = fam[j] * cur.argmin;
      Eigen::JacobiSVD<ComplexMatrix> svd(
          stack, Eigen::ComputeThinU | Eigen::ComputeThinV);
      ComplexVector w = svd.matrixU().col(d - 1);
      ComplexVector v = svd.matrixV().col(d - 1);
      ComplexMatrix outer = w * cur.argmin.adjoint();

      bool improved = false;
      double step = 0.25;
      for (int bt = 0; bt < 9 && evals < opts.budget; ++bt) {
        std::vector<ComplexMatrix> cand = fam;
        for (std::size_t j = 0; j < cand.size(); ++j)
          cand[j] += step * std::conj(v(static_cast<Eigen::Index>(j))) * outer;
        normalize_family(cand);
        MarginEstimate trial = evaluate(cand, seed + it + 1, evals);
        if (trial.value > cur.value + 1e-12) {
          fam = std::move(cand);
          cur = std::move(trial);
          improved = true;
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
    }
    return std::make_pair(fam, cur.value);
  };

  // Deterministic anchors: slices of the k = d intertwiner (the matrix
  // units) for m = d^2, clock-and-shift words for smaller m.
  std::vector<ComplexMatrix> anchor = slices(intertwiner_construct(d, d, tol).u, d, d);
  std::vector<ComplexMatrix> clock_shift;
  {
    ComplexMatrix clock = ComplexMatrix::Zero(d, d);
    for (int j = 0; j < d; ++j)
      clock(j, j) = std::exp(Complex(0.0, 2.0 * M_PI * j / d));
    ComplexMatrix shift = ComplexMatrix::Zero(d, d);
    for (int j = 0; j < d; ++j) shift((j + 1) % d, j) = 1.0;
    ComplexMatrix word = identity_matrix(d);
    for (int a = 0; a < d; ++a) {
      ComplexMatrix row = word;
      for (int b = 0; b < d; ++b) {
        clock_shift.push_back(row);
        row = clock * row;
      }
      word = shift * word;
    }
  }

  std::mt19937_64 rng(opts.seed);
  long evals = 0;
  std::vector<ComplexMatrix> best_prev = anchor;
  bool have_result = false;
  for (int m = d * d; m >= d + 1; --m) {
    double best_margin = -1.0;
    std::vector<ComplexMatrix> best_fam;
    std::vector<std::vector<ComplexMatrix>> seeds;
    if (static_cast<int>(best_prev.size()) > m)
      seeds.emplace_back(best_prev.begin(), best_prev.begin() + m);
    else if (static_cast<int>(best_prev.size()) == m)
      seeds.push_back(best_prev);
    seeds.emplace_back(clock_shift.begin(), clock_shift.begin() + m);
    for (int s = 0; s < std::max(1, opts.starts - 2); ++s) {
      std::vector<ComplexMatrix> random_fam;
      for (int j = 0; j < m; ++j) random_fam.push_back(ginibre(d, d, rng));
      seeds.push_back(std::move(random_fam));
    }
    for (std::size_t s = 0; s < seeds.size() && evals < opts.budget; ++s) {
      auto [fam, value] =
          ascend_family(std::move(seeds[s]), opts.seed + 31 * s + m, evals);
      if (value > best_margin) {
        best_margin = value;
        best_fam = std::move(fam);
      }
    }
    // Corroborate with a denser grid before accepting the level.
    if (best_margin > 0.0 && !best_fam.empty()) {
      SphereSearchOptions dense;
      dense.grid_points = 10000;
      dense.starts = 4;
      dense.seed = opts.seed + 7919 + m;
      MarginEstimate check = min_rank_margin(best_fam, d, dense);
      evals += check.evaluations;
      best_margin = std::min(best_margin, check.value);
    }
    out.evidence.emplace_back(m, std::max(0.0, best_margin));
    if (best_margin > 1e-4) {
      out.m_hi = m;
      out.best_family = best_fam;
      out.best_margin = best_margin;
      best_prev = std::move(best_fam);
      have_result = true;
    } else {
      break;
    }
  }
  if (!have_result) {
    out.m_hi = d * d;
    out.best_family = anchor;
    SphereSearchOptions dense;
    dense.grid_points = 4096;
    dense.seed = opts.seed;
    out.best_margin = min_rank_margin(out.best_family, d, dense).value;
  }
  return out;
}

}  // namespace cstar
