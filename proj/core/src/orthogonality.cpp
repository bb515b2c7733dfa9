#include "cstar/orthogonality.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SVD>

namespace cstar {

namespace {

ComplexVector random_unit_vector(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexVector y(d);
  for (int i = 0; i < d; ++i) y(i) = Complex(gauss(rng), gauss(rng));
  double nrm = y.norm();
  if (nrm < 1e-300) {
    y.setZero();
    y(0) = 1.0;
    return y;
  }
  return y / nrm;
}

struct SliceObjective {
  const std::vector<ComplexMatrix>& family;
  int d;

  // Stacked matrix [A_1 y | ... | A_m y], d x m.
  ComplexMatrix stack(const ComplexVector& y) const {
    ComplexMatrix m(d, static_cast<Eigen::Index>(family.size()));
    for (std::size_t j = 0; j < family.size(); ++j) m.col(j) = family[j] * y;
    return m;
  }

  double value(const ComplexVector& y) const {
    Eigen::JacobiSVD<ComplexMatrix> svd(stack(y));
    return svd.singularValues()(d - 1);
  }
};

}  // namespace

Intertwiner intertwiner_construct(int d, int k, const ToleranceConfig& tol) {
  tol.validate();
  if (d < 2) throw std::invalid_argument("intertwiner_construct: d must be >= 2");
  if (k < d) throw std::invalid_argument("intertwiner_construct: k must be >= d");

  Intertwiner out;
  out.d = d;
  out.k = k;
  out.f = ComplexMatrix::Zero(k, k);
  for (int s = 0; s < d; ++s) out.f(s, s) = 1.0;
  out.rho.resize(static_cast<std::size_t>(d) * d);
  for (int s = 0; s < d; ++s)
    for (int t = 0; t < d; ++t) out.rho[s * d + t] = matrix_unit(k, s, t);

  // The representation x -> 1 (x) rho(x) + x (x) (1-f) of M_d on C^d (x) C^k
  // has multiplicity k; matching its canonical basis against that of
  // x (x) 1 yields a permutation intertwiner.
  ComplexMatrix w2 = ComplexMatrix::Zero(d * k, d * k);
  for (int s = 0; s < d; ++s)
    for (int m = 0; m < k; ++m) {
      if (m < d)
        w2(m * k + s, s * k + m) = 1.0;
      else
        w2(s * k + m, s * k + m) = 1.0;
    }
  out.u = w2.adjoint();

  ComplexMatrix one_k = identity_matrix(k);
  ComplexMatrix resid_guard = out.u.adjoint() * out.u - identity_matrix(d * k);
  if (resid_guard.cwiseAbs().maxCoeff() > tol.identity_tol)
    throw std::runtime_error("intertwiner_construct: unitarity check failed");
  for (int s = 0; s < d; ++s)
    for (int t = 0; t < d; ++t) {
      ComplexMatrix lhs =
          out.u.adjoint() * tensor(matrix_unit(d, s, t), one_k) * out.u;
      ComplexMatrix rhs = tensor(identity_matrix(d), out.rho[s * d + t]) +
                          tensor(matrix_unit(d, s, t), one_k - out.f);
      if ((lhs - rhs).cwiseAbs().maxCoeff() > tol.identity_tol)
        throw std::runtime_error("intertwiner_construct: intertwining check failed");
    }
  return out;
}

std::vector<ComplexMatrix> slices(const ComplexMatrix& u, int d, int k) {
  if (d < 1 || k < 1 || u.rows() != static_cast<Eigen::Index>(d) * k ||
      u.cols() != u.rows())
    throw std::invalid_argument("slices: dimension mismatch");
  std::vector<ComplexMatrix> out(static_cast<std::size_t>(k) * k);
  for (int p = 0; p < k; ++p)
    for (int q = 0; q < k; ++q) {
      ComplexMatrix s(d, d);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) s(a, b) = u(a * k + p, b * k + q);
      out[p * k + q] = std::move(s);
    }
  return out;
}

MarginEstimate min_rank_margin(const std::vector<ComplexMatrix>& family, int d,
                               const SphereSearchOptions& opts) {
  if (d < 1) throw std::invalid_argument("min_rank_margin: d must be >= 1");
  if (family.empty())
    throw std::invalid_argument("min_rank_margin: empty family");
  for (const auto& a : family)
    if (a.rows() != d || a.cols() != d)
      throw std::invalid_argument("min_rank_margin: family shape mismatch");

  MarginEstimate best;
  if (static_cast<int>(family.size()) < d) {
    // Fewer than d columns: the stack has rank < d for every y.
    best.value = 0.0;
    best.argmin = ComplexVector::Unit(d, 0);
    return best;
  }

  SliceObjective obj{family, d};
  std::mt19937_64 rng(opts.seed);
  best.value = std::numeric_limits<double>::infinity();
  best.argmin = ComplexVector::Unit(d, 0);

  auto consider = [&](const ComplexVector& y) {
    double v = obj.value(y);
    ++best.evaluations;
    if (v < best.value) {
      best.value = v;
      best.argmin = y;
    }
    return v;
  };

  if (opts.use_grid) {
    consider(ComplexVector::Unit(d, 0));
    for (int g = 1; g < opts.grid_points; ++g) consider(random_unit_vector(d, rng));
  }

  if (!opts.use_multistart) return best;

  for (int s = 0; s < opts.starts; ++s) {
    ComplexVector y = (s == 0 && opts.use_grid) ? best.argmin
                                                : random_unit_vector(d, rng);
    double fy = obj.value(y);
    ++best.evaluations;
    for (int it = 0; it < opts.iters; ++it) {
      ComplexMatrix m = obj.stack(y);
      Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
      double sigma = svd.singularValues()(d - 1);
      if (d >= 2 && svd.singularValues()(d - 2) - sigma < 1e-8) {
        // Nearly multiple smallest singular value: the objective is not
        // smooth here; nudge and continue.
        y = (y + 0.01 * random_unit_vector(d, rng)).normalized();
        fy = obj.value(y);
        ++best.evaluations;
        continue;
      }
      ComplexVector w = svd.matrixU().col(d - 1);
      ComplexVector v = svd.matrixV().col(d - 1);
      ComplexVector grad = ComplexVector::Zero(d);
      for (std::size_t j = 0; j < family.size(); ++j)
        grad.noalias() += std::conj(v(static_cast<Eigen::Index>(j))) *
                          (family[j].adjoint() * w);
      grad -= y.dot(grad) * y;
      double gnorm = grad.norm();
      if (gnorm < 1e-14) break;

      double step = 0.5;
      bool improved = false;
      for (int bt = 0; bt < 30; ++bt) {
        ComplexVector cand = (y - step * grad).normalized();
        double fc = consider(cand);
        if (fc < fy - 1e-14) {
          y = cand;
          fy = fc;
          improved = true;
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
    }
    if (fy < best.value) {
      best.value = fy;
      best.argmin = y;
    }
  }
  return best;
}

MarginEstimate min_rank_margin(const ComplexMatrix& u, int d, int k,
                               const SphereSearchOptions& opts) {
  return min_rank_margin(slices(u, d, k), d, opts);
}

NonOrthReport certify_nonorthogonal_conjugate(const ComplexMatrix& u, int d, int k,
                                              long budget, std::uint64_t seed,
                                              const ToleranceConfig& tol,
                                              double confidence) {
  tol.validate();
  if (budget < 16)
    throw std::invalid_argument("certify_nonorthogonal_conjugate: budget too small");
  if (!is_unitary(u, 1e-8))
    throw std::invalid_argument("certify_nonorthogonal_conjugate: u is not unitary");
  auto family = slices(u, d, k);

  SphereSearchOptions grid_opts;
  grid_opts.seed = seed;
  grid_opts.grid_points =
      static_cast<int>(std::min<long>(4096, std::max<long>(8, budget / 2)));
  grid_opts.use_multistart = false;
  MarginEstimate grid = min_rank_margin(family, d, grid_opts);

  SphereSearchOptions descent_opts;
  descent_opts.seed = seed + 1;
  descent_opts.use_grid = false;
  descent_opts.starts = 8;
  descent_opts.iters = static_cast<int>(
      std::min<long>(150, std::max<long>(10, (budget - grid.evaluations) /
                                                 (descent_opts.starts * 8))));
  MarginEstimate descent = min_rank_margin(family, d, descent_opts);

  NonOrthReport report;
  report.evaluations = grid.evaluations + descent.evaluations;
  const MarginEstimate& winner = descent.value < grid.value ? descent : grid;

  if (winner.value <= tol.eig_floor) {
    // The Frobenius norm of the compression dominates its operator norm, so
    // a vanishing smallest singular value yields a genuine orthogonal pair.
    report.status = NonOrthStatus::refuted;
    report.margin = 0.0;
    report.witness_y = winner.argmin;
    SliceObjective obj{family, d};
    Eigen::JacobiSVD<ComplexMatrix> svd(obj.stack(winner.argmin),
                                        Eigen::ComputeThinU);
    report.witness_x = svd.matrixU().col(d - 1);
    return report;
  }
  if (descent.value > confidence && grid.value > confidence) {
    report.status = NonOrthStatus::certified;
    report.margin = winner.value;
    return report;
  }
  report.status = NonOrthStatus::unknown;
  report.margin = winner.value;
  return report;
}

DimensionFeasibility dimension_bound_check(int d, int k) {
  if (d < 1 || k < 1)
    throw std::invalid_argument("dimension_bound_check: dimensions must be positive");
  DimensionFeasibility out;
  out.infeasible = static_cast<long>(k) * k < static_cast<long>(d) + 1;
  out.feasible = !out.infeasible;
  out.guaranteed = k >= d;
  return out;
}

NonOrthReport pair_nonorthogonal_sampled(const SubalgebraEmbedding& emb1,
                                         const SubalgebraEmbedding& emb2, int samples,
                                         std::uint64_t rng_seed,
                                         const ToleranceConfig& tol) {
  tol.validate();
  if (emb1.ambient_dim != emb2.ambient_dim)
    throw std::invalid_argument("pair_nonorthogonal_sampled: ambient dims differ");
  if (samples < 1)
    throw std::invalid_argument("pair_nonorthogonal_sampled: samples must be >= 1");

  std::mt19937_64 rng(rng_seed);
  auto random_projection = [&](const SubalgebraEmbedding& emb, ComplexVector& xi) {
    std::uniform_int_distribution<int> pick(0, emb.block_count() - 1);
    int block = pick(rng);
    AbstractElement coords;
    for (int i = 0; i < emb.block_count(); ++i)
      coords.push_back(
          ComplexMatrix::Zero(emb.block_dim(i), emb.block_dim(i)));
    xi = random_unit_vector(emb.block_dim(block), rng);
    coords[block] = xi * xi.adjoint();
    return apply_embedding(emb, coords);
  };

  NonOrthReport report;
  report.margin = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    ComplexVector xi, eta;
    ComplexMatrix p = random_projection(emb1, xi);
    ComplexMatrix q = random_projection(emb2, eta);
    double nrm = operator_norm(p * q);
    ++report.evaluations;
    report.margin = std::min(report.margin, nrm);
    if (nrm <= tol.eig_floor) {
      report.status = NonOrthStatus::refuted;
      report.margin = 0.0;
      report.witness_x = xi;
      report.witness_y = eta;
      return report;
    }
  }
  report.status = NonOrthStatus::unknown;
  return report;
}

}  // namespace cstar
