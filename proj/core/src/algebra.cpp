#include "cstar/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cstar {

namespace {

Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  // tr(a b) without forming the product.
  return a.cwiseProduct(b.transpose()).sum();
}

void require_shapes(const SubalgebraEmbedding& emb) {
  emb.structure.validate();
  const int N = emb.ambient_dim;
  if (N <= 0) throw std::invalid_argument("embedding: ambient_dim must be positive");
  if (emb.unit_images.size() != emb.structure.blocks.size())
    throw std::invalid_argument("embedding: one image family per block required");
  for (int i = 0; i < emb.block_count(); ++i) {
    const int n = emb.block_dim(i);
    if (static_cast<int>(emb.unit_images[i].size()) != n * n)
      throw std::invalid_argument("embedding: block image count mismatch");
    for (const auto& img : emb.unit_images[i])
      if (img.rows() != N || img.cols() != N)
        throw std::invalid_argument("embedding: image shape mismatch");
  }
}

std::vector<int> read_multiplicities(const SubalgebraEmbedding& emb) {
  std::vector<int> mult(emb.block_count());
  for (int i = 0; i < emb.block_count(); ++i) {
    double t = emb.unit(i, 0, 0).trace().real();
    mult[i] = static_cast<int>(std::lround(t));
  }
  return mult;
}

ComplexMatrix cyclic_shift(int n) {
  ComplexMatrix c = ComplexMatrix::Zero(n, n);
  for (int r = 0; r < n; ++r) c((r + 1) % n, r) = 1.0;
  return c;
}

}  // namespace

int BlockStructure::abstract_dim() const {
  int d = 0;
  for (int n : blocks) d += n * n;
  return d;
}

void BlockStructure::validate() const {
  if (blocks.empty()) throw std::invalid_argument("BlockStructure: no blocks");
  for (int n : blocks)
    if (n < 1) throw std::invalid_argument("BlockStructure: block dims must be >= 1");
}

const ComplexMatrix& SubalgebraEmbedding::unit(int i, int s, int t) const {
  const int n = structure.blocks.at(i);
  if (s < 0 || s >= n || t < 0 || t >= n)
    throw std::invalid_argument("embedding: unit index out of range");
  return unit_images[i][s * n + t];
}

EmbeddingReport validate_embedding(const SubalgebraEmbedding& emb,
                                   const ToleranceConfig& tol) {
  tol.validate();
  require_shapes(emb);
  const int N = emb.ambient_dim;
  EmbeddingReport report;

  for (int i = 0; i < emb.block_count(); ++i) {
    const int n = emb.block_dim(i);
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t) {
        double defect =
            (emb.unit(i, s, t) - emb.unit(i, t, s).adjoint()).cwiseAbs().maxCoeff();
        report.adjoint_residual = std::max(report.adjoint_residual, defect);
      }
  }

  // The generating identities e_{s1} e_{1t} = e_{st} and
  // e_{1s} e_{t1} = d_{st} e_{11}, together with unitality and adjoints,
  // imply the full relation family including cross-block orthogonality.
  for (int i = 0; i < emb.block_count(); ++i) {
    const int n = emb.block_dim(i);
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t) {
        ComplexMatrix lhs = emb.unit(i, s, 0) * emb.unit(i, 0, t);
        double r1 = (lhs - emb.unit(i, s, t)).cwiseAbs().maxCoeff();
        ComplexMatrix rhs = (s == t) ? emb.unit(i, 0, 0)
                                     : ComplexMatrix(ComplexMatrix::Zero(N, N));
        double r2 =
            (emb.unit(i, 0, s) * emb.unit(i, t, 0) - rhs).cwiseAbs().maxCoeff();
        report.relation_residual = std::max({report.relation_residual, r1, r2});
      }
  }

  // Small instances afford the exhaustive O(dim^2) product check; gate on the
  // actual work (dim^2 ambient products) so large ambient spaces stay fast.
  const long dim = emb.structure.abstract_dim();
  const double full_check_flops =
      static_cast<double>(dim) * dim * N * N * N;
  if (full_check_flops <= 2e9) {
    for (int i = 0; i < emb.block_count(); ++i)
      for (int j = 0; j < emb.block_count(); ++j) {
        const int ni = emb.block_dim(i), nj = emb.block_dim(j);
        for (int s = 0; s < ni; ++s)
          for (int t = 0; t < ni; ++t)
            for (int u = 0; u < nj; ++u)
              for (int v = 0; v < nj; ++v) {
                ComplexMatrix prod = emb.unit(i, s, t) * emb.unit(j, u, v);
                ComplexMatrix expect = (i == j && t == u)
                                           ? emb.unit(i, s, v)
                                           : ComplexMatrix(ComplexMatrix::Zero(N, N));
                report.relation_residual = std::max(
                    report.relation_residual, (prod - expect).cwiseAbs().maxCoeff());
              }
      }
  }

  ComplexMatrix unit_sum = ComplexMatrix::Zero(N, N);
  for (int i = 0; i < emb.block_count(); ++i)
    for (int s = 0; s < emb.block_dim(i); ++s) unit_sum += emb.unit(i, s, s);
  report.unit_residual =
      (unit_sum - ComplexMatrix::Identity(N, N)).cwiseAbs().maxCoeff();

  // Linear independence through the HS Gram matrix of all images.
  ComplexMatrix gram(dim, dim);
  {
    std::vector<const ComplexMatrix*> flat;
    flat.reserve(dim);
    for (int i = 0; i < emb.block_count(); ++i)
      for (const auto& img : emb.unit_images[i]) flat.push_back(&img);
    for (long a = 0; a < dim; ++a)
      for (long b = a; b < dim; ++b) {
        gram(a, b) = hs_inner(*flat[a], *flat[b]);
        gram(b, a) = std::conj(gram(a, b));
      }
  }
  report.independence_gap = min_eigenvalue(gram, 1e-8);

  report.multiplicities = read_multiplicities(emb);
  long total = 0;
  bool mult_ok = true;
  for (int i = 0; i < emb.block_count(); ++i) {
    double t = emb.unit(i, 0, 0).trace().real();
    if (report.multiplicities[i] < 1 ||
        std::abs(t - report.multiplicities[i]) > 1e-6)
      mult_ok = false;
    total += static_cast<long>(report.multiplicities[i]) * emb.block_dim(i);
  }
  report.dims_consistent = mult_ok && (total == N);
  return report;
}

ExpectationOperator::ExpectationOperator(const SubalgebraEmbedding& emb,
                                         const ToleranceConfig& tol) {
  tol.validate();
  require_shapes(emb);
  ambient_dim_ = emb.ambient_dim;
  block_dims_ = emb.structure.blocks;
  multiplicities_ = read_multiplicities(emb);

  for (int i = 0; i < emb.block_count(); ++i) {
    const int n = emb.block_dim(i);
    const int m = multiplicities_[i];
    if (m < 1)
      throw std::invalid_argument("expectation: block has non-positive multiplicity");
    const ComplexMatrix& p = emb.unit(i, 0, 0);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(p));
    // Orthonormal basis of the range of the block's corner projection.
    ComplexMatrix w(ambient_dim_, m);
    int found = 0;
    for (Eigen::Index c = 0; c < es.eigenvalues().size(); ++c)
      if (es.eigenvalues()(c) > 0.5) {
        if (found == m)
          throw std::invalid_argument("expectation: corner projection rank mismatch");
        w.col(found++) = es.eigenvectors().col(c);
      }
    if (found != m)
      throw std::invalid_argument("expectation: corner projection rank mismatch");

    ComplexMatrix iso(ambient_dim_, n * m);
    for (int s = 0; s < n; ++s) iso.middleCols(s * m, m) = emb.unit(i, s, 0) * w;
    ComplexMatrix gram = iso.adjoint() * iso;
    if ((gram - ComplexMatrix::Identity(n * m, n * m)).cwiseAbs().maxCoeff() > 1e-7)
      throw std::invalid_argument("expectation: embedding does not yield isometries");
    isometries_.push_back(std::move(iso));
  }
}

ComplexMatrix ExpectationOperator::apply(const ComplexMatrix& x) const {
  if (x.rows() != ambient_dim_ || x.cols() != ambient_dim_)
    throw std::invalid_argument("expectation: dimension mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(ambient_dim_, ambient_dim_);
  for (std::size_t i = 0; i < isometries_.size(); ++i) {
    const int n = block_dims_[i];
    const int m = multiplicities_[i];
    const ComplexMatrix& w = isometries_[i];
    ComplexMatrix c = ComplexMatrix::Zero(m, m);
    for (int s = 0; s < n; ++s) {
      auto g = w.middleCols(s * m, m);
      c.noalias() += g.adjoint() * x * g;
    }
    c /= static_cast<double>(n);
    for (int s = 0; s < n; ++s) {
      auto g = w.middleCols(s * m, m);
      out.noalias() += g * c * g.adjoint();
    }
  }
  return out;
}

OperatorSubspace commutant(const SubalgebraEmbedding& emb, const ToleranceConfig& tol) {
  ExpectationOperator op(emb, tol);
  OperatorSubspace space;
  space.ambient_dim = emb.ambient_dim;
  for (int i = 0; i < emb.block_count(); ++i) {
    const int n = emb.structure.blocks[i];
    const int m = op.multiplicities()[i];
    const ComplexMatrix& w = op.isometry(i);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        ComplexMatrix basis = ComplexMatrix::Zero(emb.ambient_dim, emb.ambient_dim);
        for (int s = 0; s < n; ++s)
          basis.noalias() += w.col(s * m + a) * w.col(s * m + b).adjoint();
        space.basis.push_back(scale * basis);
      }
  }
  return space;
}

ComplexMatrix conditional_expectation(const SubalgebraEmbedding& emb,
                                      const ComplexMatrix& a,
                                      const ToleranceConfig& tol) {
  return ExpectationOperator(emb, tol).apply(a);
}

std::vector<ComplexMatrix> minimal_central_projections(const SubalgebraEmbedding& emb) {
  require_shapes(emb);
  std::vector<ComplexMatrix> ps;
  for (int i = 0; i < emb.block_count(); ++i) {
    ComplexMatrix p = ComplexMatrix::Zero(emb.ambient_dim, emb.ambient_dim);
    for (int s = 0; s < emb.block_dim(i); ++s) p += emb.unit(i, s, s);
    ps.push_back(std::move(p));
  }
  return ps;
}

AbstractElement abstract_coordinates(const SubalgebraEmbedding& emb,
                                     const ComplexMatrix& x) {
  require_shapes(emb);
  if (x.rows() != emb.ambient_dim || x.cols() != emb.ambient_dim)
    throw std::invalid_argument("abstract_coordinates: dimension mismatch");
  auto mult = read_multiplicities(emb);
  AbstractElement coeffs;
  for (int i = 0; i < emb.block_count(); ++i) {
    const int n = emb.block_dim(i);
    ComplexMatrix y(n, n);
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t)
        y(s, t) = trace_product(emb.unit(i, t, s), x) / static_cast<double>(mult[i]);
    coeffs.push_back(std::move(y));
  }
  return coeffs;
}

ComplexMatrix apply_embedding(const SubalgebraEmbedding& emb,
                              const AbstractElement& coeffs) {
  require_shapes(emb);
  if (static_cast<int>(coeffs.size()) != emb.block_count())
    throw std::invalid_argument("apply_embedding: block count mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(emb.ambient_dim, emb.ambient_dim);
  for (int i = 0; i < emb.block_count(); ++i) {
    const int n = emb.block_dim(i);
    if (coeffs[i].rows() != n || coeffs[i].cols() != n)
      throw std::invalid_argument("apply_embedding: block shape mismatch");
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t) {
        Complex c = coeffs[i](s, t);
        if (c != Complex(0.0, 0.0)) out.noalias() += c * emb.unit(i, s, t);
      }
  }
  return out;
}

ComplexMatrix project_onto_algebra(const SubalgebraEmbedding& emb,
                                   const ComplexMatrix& x) {
  return apply_embedding(emb, abstract_coordinates(emb, x));
}

double membership_residual(const SubalgebraEmbedding& emb, const ComplexMatrix& x) {
  return (x - project_onto_algebra(emb, x)).norm();
}

FullInAlgebraResult full_in_algebra(const ComplexMatrix& a,
                                    const SubalgebraEmbedding& emb,
                                    const ToleranceConfig& tol) {
  tol.validate();
  const double scale = std::max(1.0, a.norm());
  if (membership_residual(emb, a) > tol.eig_floor * scale)
    throw std::invalid_argument("full_in_algebra: element is not in the algebra");
  if (min_eigenvalue(hermitian_part(a), 1e-8) < -tol.eig_floor * scale)
    throw std::invalid_argument("full_in_algebra: element is not positive");

  AbstractElement blocks = abstract_coordinates(emb, a);
  FullInAlgebraResult result;
  result.full = true;
  for (const auto& blk : blocks) {
    double nrm = operator_norm(blk);
    result.block_norms.push_back(nrm);
    if (nrm <= tol.eig_floor) result.full = false;
  }
  if (!result.full) return result;

  // Per block, conjugating the eigenbasis through the powers of the cyclic
  // shift flattens the block to tr(a_i) times the identity; members act as
  // the identity on all other blocks.
  for (int i = 0; i < emb.block_count(); ++i) {
    const int n = emb.block_dim(i);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(blocks[i]));
    ComplexMatrix v = es.eigenvectors();
    ComplexMatrix c = cyclic_shift(n);
    ComplexMatrix cp = ComplexMatrix::Identity(n, n);
    for (int r = 0; r < n; ++r) {
      AbstractElement u;
      for (int j = 0; j < emb.block_count(); ++j)
        u.push_back(ComplexMatrix::Identity(emb.block_dim(j), emb.block_dim(j)));
      u[i] = v * cp * v.adjoint();
      result.unitaries.push_back(apply_embedding(emb, u));
      cp = c * cp;
    }
  }

  ComplexMatrix sum = ComplexMatrix::Zero(emb.ambient_dim, emb.ambient_dim);
  for (const auto& u : result.unitaries) sum.noalias() += u.adjoint() * a * u;
  result.margin = min_eigenvalue(hermitian_part(sum), 1e-8);
  return result;
}

SubalgebraEmbedding tensor_embedding(const SubalgebraEmbedding& e1,
                                     const SubalgebraEmbedding& e2) {
  require_shapes(e1);
  require_shapes(e2);
  SubalgebraEmbedding out;
  out.ambient_dim = e1.ambient_dim * e2.ambient_dim;
  for (int i = 0; i < e1.block_count(); ++i)
    for (int j = 0; j < e2.block_count(); ++j) {
      const int ni = e1.block_dim(i), nj = e2.block_dim(j);
      out.structure.blocks.push_back(ni * nj);
      std::vector<ComplexMatrix> images(static_cast<std::size_t>(ni * nj) * (ni * nj));
      for (int s = 0; s < ni; ++s)
        for (int u = 0; u < nj; ++u)
          for (int t = 0; t < ni; ++t)
            for (int v = 0; v < nj; ++v)
              images[(s * nj + u) * (ni * nj) + (t * nj + v)] =
                  tensor(e1.unit(i, s, t), e2.unit(j, u, v));
      out.unit_images.push_back(std::move(images));
    }
  return out;
}

ComplexMatrix haar_element(const SubalgebraEmbedding& emb, std::mt19937_64& rng) {
  AbstractElement u;
  for (int i = 0; i < emb.block_count(); ++i)
    u.push_back(haar_unitary(emb.block_dim(i), rng));
  return apply_embedding(emb, u);
}

SubalgebraEmbedding commutant_embedding(const SubalgebraEmbedding& emb,
                                        const ToleranceConfig& tol) {
  ExpectationOperator op(emb, tol);
  SubalgebraEmbedding out;
  out.ambient_dim = emb.ambient_dim;
  out.structure.blocks = op.multiplicities();
  for (int i = 0; i < emb.block_count(); ++i) {
    const int n = emb.structure.blocks[i];
    const int m = op.multiplicities()[i];
    const ComplexMatrix& w = op.isometry(i);
    std::vector<ComplexMatrix> images(static_cast<std::size_t>(m) * m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        ComplexMatrix img = ComplexMatrix::Zero(emb.ambient_dim, emb.ambient_dim);
        for (int s = 0; s < n; ++s)
          img.noalias() += w.col(s * m + a) * w.col(s * m + b).adjoint();
        images[a * m + b] = std::move(img);
      }
    out.unit_images.push_back(std::move(images));
  }
  return out;
}

SubalgebraEmbedding identity_embedding(int n) {
  SubalgebraEmbedding emb;
  emb.ambient_dim = n;
  emb.structure.blocks = {n};
  std::vector<ComplexMatrix> images(static_cast<std::size_t>(n) * n);
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) images[s * n + t] = matrix_unit(n, s, t);
  emb.unit_images.push_back(std::move(images));
  return emb;
}

SubalgebraEmbedding scalar_embedding(int n) {
  SubalgebraEmbedding emb;
  emb.ambient_dim = n;
  emb.structure.blocks = {1};
  emb.unit_images.push_back({identity_matrix(n)});
  return emb;
}

SubalgebraEmbedding diagonal_embedding(int n) {
  SubalgebraEmbedding emb;
  emb.ambient_dim = n;
  emb.structure.blocks.assign(n, 1);
  for (int i = 0; i < n; ++i) emb.unit_images.push_back({matrix_unit(n, i, i)});
  return emb;
}

SubalgebraEmbedding left_factor_embedding(int n, int m) {
  SubalgebraEmbedding emb;
  emb.ambient_dim = n * m;
  emb.structure.blocks = {n};
  ComplexMatrix im = identity_matrix(m);
  std::vector<ComplexMatrix> images(static_cast<std::size_t>(n) * n);
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) images[s * n + t] = tensor(matrix_unit(n, s, t), im);
  emb.unit_images.push_back(std::move(images));
  return emb;
}

SubalgebraEmbedding right_factor_embedding(int m, int n) {
  SubalgebraEmbedding emb;
  emb.ambient_dim = m * n;
  emb.structure.blocks = {n};
  ComplexMatrix im = identity_matrix(m);
  std::vector<ComplexMatrix> images(static_cast<std::size_t>(n) * n);
  for (int s = 0; s < n; ++s)
    for (int t = 0; t < n; ++t) images[s * n + t] = tensor(im, matrix_unit(n, s, t));
  emb.unit_images.push_back(std::move(images));
  return emb;
}

SubalgebraEmbedding direct_sum_embedding(const std::vector<int>& blocks) {
  BlockStructure st{blocks};
  st.validate();
  int N = 0;
  for (int n : blocks) N += n;
  SubalgebraEmbedding emb;
  emb.ambient_dim = N;
  emb.structure = st;
  int offset = 0;
  for (int n : blocks) {
    std::vector<ComplexMatrix> images(static_cast<std::size_t>(n) * n);
    for (int s = 0; s < n; ++s)
      for (int t = 0; t < n; ++t) {
        ComplexMatrix img = ComplexMatrix::Zero(N, N);
        img(offset + s, offset + t) = 1.0;
        images[s * n + t] = std::move(img);
      }
    emb.unit_images.push_back(std::move(images));
    offset += n;
  }
  return emb;
}

SubalgebraEmbedding conjugate_embedding(const SubalgebraEmbedding& emb,
                                        const ComplexMatrix& u) {
  require_shapes(emb);
  if (u.rows() != emb.ambient_dim || u.cols() != emb.ambient_dim)
    throw std::invalid_argument("conjugate_embedding: unitary dimension mismatch");
  if (!is_unitary(u, 1e-8))
    throw std::invalid_argument("conjugate_embedding: conjugator is not unitary");
  SubalgebraEmbedding out = emb;
  for (auto& block : out.unit_images)
    for (auto& img : block) img = u.adjoint() * img * u;
  return out;
}

}  // namespace cstar
