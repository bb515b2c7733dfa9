#include "cstar/matrix_ops.hpp"

#include <algorithm>
#include <cmath>

namespace cstar {

namespace {

Eigen::SelfAdjointEigenSolver<ComplexMatrix> hermitian_eigs(
    const ComplexMatrix& a, double tol, bool vectors) {
  const double scale = std::max(1.0, a.norm());
  if (hermiticity_defect(a) > tol * scale)
    throw std::invalid_argument("expected a Hermitian matrix");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es;
  es.compute(a, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("Hermitian eigensolver failed to converge");
  return es;
}

}  // namespace

ComplexMatrix identity_matrix(int n) {
  if (n <= 0) throw std::invalid_argument("identity_matrix: n must be positive");
  return ComplexMatrix::Identity(n, n);
}

ComplexMatrix matrix_unit(int n, int s, int t) {
  if (n <= 0) throw std::invalid_argument("matrix_unit: n must be positive");
  if (s < 0 || s >= n || t < 0 || t >= n)
    throw std::invalid_argument("matrix_unit: indices out of range");
  ComplexMatrix e = ComplexMatrix::Zero(n, n);
  e(s, t) = Complex(1.0, 0.0);
  return e;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix direct_sum(const std::vector<ComplexMatrix>& blocks) {
  if (blocks.empty()) throw std::invalid_argument("direct_sum: no blocks");
  Eigen::Index rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  ComplexMatrix out = ComplexMatrix::Zero(rows, cols);
  Eigen::Index r = 0, c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

ComplexMatrix hermitian_part(const ComplexMatrix& a) {
  return 0.5 * (a + a.adjoint());
}

double hermiticity_defect(const ComplexMatrix& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("hermiticity_defect: matrix must be square");
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return hermiticity_defect(a) <= tol;
}

double min_eigenvalue(const ComplexMatrix& a, double tol) {
  return hermitian_eigs(a, tol, false).eigenvalues().minCoeff();
}

double max_eigenvalue(const ComplexMatrix& a, double tol) {
  return hermitian_eigs(a, tol, false).eigenvalues().maxCoeff();
}

RealVector hermitian_spectrum(const ComplexMatrix& a, double tol) {
  return hermitian_eigs(a, tol, false).eigenvalues();
}

ComplexMatrix spectral_projection_below(const ComplexMatrix& a, double cut,
                                        double tol) {
  auto es = hermitian_eigs(a, tol, true);
  const auto& vals = es.eigenvalues();
  const auto& vecs = es.eigenvectors();
  ComplexMatrix p = ComplexMatrix::Zero(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (vals(i) <= cut) p += vecs.col(i) * vecs.col(i).adjoint();
  return p;
}

ComplexMatrix hermitian_function(const ComplexMatrix& a,
                                 const std::function<double(double)>& f,
                                 double tol) {
  auto es = hermitian_eigs(a, tol, true);
  RealVector vals = es.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) vals(i) = f(vals(i));
  return es.eigenvectors() * vals.asDiagonal().toDenseMatrix().cast<Complex>() *
         es.eigenvectors().adjoint();
}

ComplexMatrix positive_part_shift(const ComplexMatrix& a, double shift,
                                  double tol) {
  return hermitian_function(
      a, [shift](double x) { return std::max(0.0, x - shift); }, tol);
}

ComplexMatrix cutoff_apply(const ComplexMatrix& a, double delta, double eps,
                           double tol) {
  if (!(delta < eps))
    throw std::invalid_argument("cutoff_apply: requires delta < eps");
  return hermitian_function(
      a,
      [delta, eps](double x) {
        if (x <= delta) return 0.0;
        if (x >= eps) return 1.0;
        return (x - delta) / (eps - delta);
      },
      tol);
}

ComplexMatrix psd_sqrt(const ComplexMatrix& a, double tol) {
  const double scale = std::max(1.0, a.norm());
  return hermitian_function(
      a,
      [tol, scale](double x) {
        if (x < -tol * scale)
          throw std::invalid_argument("psd_sqrt: matrix is not positive");
        return std::sqrt(std::max(0.0, x));
      },
      tol);
}

ComplexMatrix psd_inv_sqrt(const ComplexMatrix& a, double floor) {
  return hermitian_function(a, [floor](double x) {
    if (x <= floor)
      throw std::invalid_argument(
          "psd_inv_sqrt: eigenvalue at or below the invertibility floor");
    return 1.0 / std::sqrt(x);
  });
}

double operator_norm(const ComplexMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  // Largest singular value via the smaller Gram matrix; cheaper and more
  // robust at this scale than a full SVD.
  ComplexMatrix g = (a.rows() <= a.cols()) ? ComplexMatrix(a * a.adjoint())
                                           : ComplexMatrix(a.adjoint() * a);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es;
  es.compute(g, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("operator_norm: eigensolver failed");
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double frobenius_norm(const ComplexMatrix& a) { return a.norm(); }

Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("hs_inner: shape mismatch");
  return (a.conjugate().cwiseProduct(b)).sum();
}

bool is_unitary(const ComplexMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  ComplexMatrix d = u.adjoint() * u - ComplexMatrix::Identity(u.cols(), u.cols());
  return d.cwiseAbs().maxCoeff() <= tol;
}

bool is_projection(const ComplexMatrix& p, double tol) {
  if (p.rows() != p.cols()) return false;
  if (hermiticity_defect(p) > tol) return false;
  return (p * p - p).cwiseAbs().maxCoeff() <= tol;
}

ComplexMatrix ginibre(int n, int m, std::mt19937_64& rng) {
  if (n <= 0 || m <= 0) throw std::invalid_argument("ginibre: bad shape");
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix g(n, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = Complex(gauss(rng), gauss(rng));
  return g;
}

ComplexMatrix haar_unitary(int n, std::mt19937_64& rng) {
  ComplexMatrix g = ginibre(n, n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phase ambiguity of QR so that the result is Haar distributed.
  for (int j = 0; j < n; ++j) {
    Complex d = r(j, j);
    double m = std::abs(d);
    q.col(j) *= (m > 0.0) ? d / m : Complex(1.0, 0.0);
  }
  return q;
}

ComplexMatrix haar_unitary(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return haar_unitary(n, rng);
}

}  // namespace cstar
