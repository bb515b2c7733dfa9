#include "cstar/fullness.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace cstar {

namespace {

void require_square(const ComplexMatrix& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    std::ostringstream msg;
    msg << who << ": square matrix required";
    throw std::invalid_argument(msg.str());
  }
}

void require_positive(const ComplexMatrix& a, const ToleranceConfig& tol,
                      const char* who) {
  require_square(a, who);
  const double scale = std::max(1.0, a.norm());
  if (hermiticity_defect(a) > 1e-8 * scale ||
      min_eigenvalue(hermitian_part(a), 1e-8) < -tol.eig_floor * scale) {
    std::ostringstream msg;
    msg << who << ": element is not positive";
    throw std::invalid_argument(msg.str());
  }
}

ComplexMatrix certificate_sum(const ComplexMatrix& a,
                              const std::vector<ComplexMatrix>& xs) {
  ComplexMatrix sum = ComplexMatrix::Zero(a.rows(), a.cols());
  for (const auto& x : xs) {
    if (x.rows() != a.rows() || x.cols() != a.cols())
      throw std::invalid_argument("certificate element dimension mismatch");
    sum.noalias() += x.adjoint() * a * x;
  }
  return sum;
}

}  // namespace

RelativeFullness relatively_full(const ComplexMatrix& a,
                                 const SubalgebraEmbedding& emb,
                                 const ToleranceConfig& tol) {
  tol.validate();
  require_positive(a, tol, "relatively_full");
  ExpectationOperator expectation(emb, tol);
  RelativeFullness result;
  result.expectation = expectation.apply(a);
  ComplexMatrix herm = hermitian_part(result.expectation);
  result.expectation_min_eig = min_eigenvalue(herm, 1e-8);
  result.full = result.expectation_min_eig > tol.eig_floor;
  if (!result.full)
    result.witness = spectral_projection_below(herm, tol.eig_floor, 1e-8);
  return result;
}

FullnessCertificate certificate_from_expectation(const ComplexMatrix& a,
                                                 const SubalgebraEmbedding& emb,
                                                 double target_margin,
                                                 std::uint64_t rng_seed, int budget,
                                                 const ToleranceConfig& tol) {
  tol.validate();
  if (!(target_margin > 0.0 && target_margin < 1.0))
    throw std::invalid_argument("certificate_from_expectation: target_margin in (0,1)");
  if (budget < 1)
    throw std::invalid_argument("certificate_from_expectation: budget must be >= 1");
  RelativeFullness decision = relatively_full(a, emb, tol);
  if (!decision.full)
    throw std::invalid_argument(
        "certificate_from_expectation: element is not relatively full");
  const double gap = decision.expectation_min_eig;

  std::mt19937_64 rng(rng_seed);
  FullnessCertificate cert;
  cert.kind = CertificateKind::unitary;
  cert.elements.push_back(identity_matrix(static_cast<int>(a.rows())));
  ComplexMatrix sum = a;
  for (;;) {
    const auto m = static_cast<double>(cert.elements.size());
    double low = min_eigenvalue(hermitian_part(sum), 1e-8);
    if (low >= target_margin * m * gap) {
      cert.margin = low;
      return cert;
    }
    if (static_cast<int>(cert.elements.size()) >= budget) {
      std::ostringstream msg;
      msg << "certificate_from_expectation: budget of " << budget
          << " samples exhausted (spectral gap " << gap << ", reached " << low
          << " of " << target_margin * m * gap << ")";
      throw BudgetExhausted(msg.str());
    }
    ComplexMatrix u = haar_element(emb, rng);
    sum.noalias() += u.adjoint() * a * u;
    cert.elements.push_back(std::move(u));
  }
}

std::vector<ComplexMatrix> span_to_elements(const ComplexMatrix& a,
                                            const std::vector<SpanCombination>& combos,
                                            const ToleranceConfig& tol) {
  tol.validate();
  require_square(a, "span_to_elements");
  if (combos.empty())
    throw std::invalid_argument("span_to_elements: no combinations given");

  ComplexMatrix input_sum = ComplexMatrix::Zero(a.rows(), a.cols());
  for (const auto& combo : combos) {
    if (combo.empty())
      throw std::invalid_argument("span_to_elements: empty combination");
    ComplexMatrix x = ComplexMatrix::Zero(a.rows(), a.cols());
    for (const auto& [lambda, w] : combo) {
      if (w.rows() != a.rows() || w.cols() != a.cols())
        throw std::invalid_argument("span_to_elements: element dimension mismatch");
      x.noalias() += lambda * w;
    }
    input_sum.noalias() += x.adjoint() * a * x;
  }
  double input_low = min_eigenvalue(hermitian_part(input_sum), 1e-8);
  if (input_low < 1.0 - tol.eig_floor)
    throw std::invalid_argument(
        "span_to_elements: input combinations do not dominate the identity");

  // sum_j x_j* a x_j <= l sum_j |lambda_j|^2 w_j* a w_j for a combination of
  // length l, by v*aw + w*av <= v*av + w*aw; repetition counts realize the
  // right-hand side with unscaled elements.
  std::vector<ComplexMatrix> out;
  for (const auto& combo : combos) {
    const auto l = static_cast<double>(combo.size());
    for (const auto& [lambda, w] : combo) {
      const auto reps =
          static_cast<long>(std::ceil(l * std::norm(lambda) - 1e-12));
      for (long r = 0; r < reps; ++r) out.push_back(w);
    }
  }

  ComplexMatrix output_sum = certificate_sum(a, out);
  double defect = min_eigenvalue(hermitian_part(output_sum - input_sum), 1e-8);
  if (defect < -tol.eig_floor * std::max(1.0, input_sum.norm()))
    throw std::runtime_error("span_to_elements: output inequality failed");
  return out;
}

FullnessCertificate normalize_certificate(const ComplexMatrix& a,
                                          const std::vector<ComplexMatrix>& xs,
                                          const ToleranceConfig& tol) {
  tol.validate();
  require_square(a, "normalize_certificate");
  if (xs.empty()) throw std::invalid_argument("normalize_certificate: empty family");
  ComplexMatrix sum = certificate_sum(a, xs);
  double delta = min_eigenvalue(hermitian_part(sum), 1e-8);
  if (delta <= tol.eig_floor)
    throw std::invalid_argument("normalize_certificate: sum is not invertible");
  const double scale = 1.0 / std::sqrt(delta);
  FullnessCertificate cert;
  cert.kind = CertificateKind::general;
  for (const auto& x : xs) cert.elements.push_back(scale * x);
  cert.margin = min_eigenvalue(hermitian_part(sum / delta), 1e-8);
  return cert;
}

FullnessCertificate dominate_reduction(const ComplexMatrix& a, const ComplexMatrix& x,
                                       const ComplexMatrix& b,
                                       const FullnessCertificate& b_cert,
                                       const ToleranceConfig& tol) {
  tol.validate();
  require_square(a, "dominate_reduction");
  require_positive(b, tol, "dominate_reduction");
  if (x.rows() != a.rows() || x.cols() != a.cols() || b.rows() != a.rows())
    throw std::invalid_argument("dominate_reduction: dimension mismatch");
  {
    ComplexMatrix bsum = certificate_sum(b, b_cert.elements);
    if (min_eigenvalue(hermitian_part(bsum), 1e-8) <
        b_cert.margin - tol.eig_floor * std::max(1.0, bsum.norm()))
      throw std::invalid_argument("dominate_reduction: certificate for b is invalid");
  }

  ComplexMatrix xax = x.adjoint() * a * x;
  const double scale = std::max(1.0, b.norm());
  const bool dominated =
      min_eigenvalue(hermitian_part(xax - b), 1e-8) >= -tol.eig_floor * scale;

  FullnessCertificate cert;
  cert.kind = CertificateKind::general;

  if (dominated) {
    double b_low = min_eigenvalue(hermitian_part(b), 1e-8);
    if (b_low > tol.eig_floor) {
      // b <= x*ax with b invertible: x b^{-1/2} alone certifies.
      cert.elements.push_back(x * psd_inv_sqrt(hermitian_part(b), tol.eig_floor));
    } else {
      for (const auto& y : b_cert.elements) cert.elements.push_back(x * y);
    }
    cert.margin =
        min_eigenvalue(hermitian_part(certificate_sum(a, cert.elements)), 1e-8);
    return cert;
  }

  const double delta = operator_norm(xax - b);
  const double b_norm = operator_norm(b);
  if (delta >= b_norm)
    throw std::invalid_argument(
        "dominate_reduction: ||b - x*ax|| >= ||b||, hypothesis fails");
  const double eps = 0.5 * (delta + b_norm);

  ComplexMatrix bh = hermitian_part(b);
  ComplexMatrix phi = cutoff_apply(bh, delta, eps, 1e-8);
  ComplexMatrix shifted = positive_part_shift(bh, eps, 1e-8);

  // (b-eps)_+ <= phi(b)(b-delta)phi(b) <= phi(b) x*ax phi(b), since
  // b - x*ax <= delta and phi vanishes where b <= delta.
  ComplexMatrix mid = phi * xax * phi;
  if (min_eigenvalue(hermitian_part(mid - shifted), 1e-8) < -tol.eig_floor * scale)
    throw std::runtime_error("dominate_reduction: cutoff chain inequality failed");

  ComplexMatrix chained = certificate_sum(shifted, b_cert.elements);
  double chained_low = min_eigenvalue(hermitian_part(chained), 1e-8);
  if (chained_low <= tol.eig_floor)
    throw std::invalid_argument(
        "dominate_reduction: certificate for b does not survive the cutoff; "
        "supply a certificate for the shifted element");

  for (const auto& y : b_cert.elements) cert.elements.push_back(x * phi * y);
  cert.margin =
      min_eigenvalue(hermitian_part(certificate_sum(a, cert.elements)), 1e-8);
  return cert;
}

ComplexMatrix word_reduction(const ComplexMatrix& a,
                             const std::vector<ComplexMatrix>& word,
                             const ToleranceConfig& tol) {
  tol.validate();
  require_positive(a, tol, "word_reduction");
  if (word.empty()) throw std::invalid_argument("word_reduction: empty word");
  for (const auto& bj : word)
    if (bj.rows() != a.rows() || bj.cols() != a.cols())
      throw std::invalid_argument("word_reduction: dimension mismatch");
  if (word.size() == 1) return word.front();

  ComplexMatrix v = word.front();
  for (std::size_t j = 1; j + 1 < word.size(); ++j) v = v * a * word[j];
  ComplexMatrix w = v * a * word.back();

  ComplexMatrix root = psd_sqrt(hermitian_part(a), 1e-8);
  const double c = operator_norm(root * v * root);
  ComplexMatrix x = c * word.back();

  ComplexMatrix gap = x.adjoint() * a * x - w.adjoint() * a * w;
  const double floor_scale = std::max(1.0, operator_norm(w.adjoint() * a * w));
  if (min_eigenvalue(hermitian_part(gap), 1e-8) < -tol.eig_floor * floor_scale)
    throw std::runtime_error("word_reduction: domination check failed");
  return x;
}

VerifyReport verify_certificate(const ComplexMatrix& a, const FullnessCertificate& cert,
                                const SubalgebraEmbedding* emb,
                                const ToleranceConfig& tol) {
  tol.validate();
  VerifyReport report;
  if (cert.elements.empty()) {
    report.detail = "empty certificate";
    return report;
  }
  ComplexMatrix sum;
  try {
    sum = certificate_sum(a, cert.elements);
  } catch (const std::invalid_argument& e) {
    report.detail = e.what();
    return report;
  }
  report.achieved_min_eig = min_eigenvalue(hermitian_part(sum), 1e-8);
  report.ok = report.achieved_min_eig >= cert.margin - tol.eig_floor &&
              cert.margin > 0.0;
  if (!report.ok) report.detail = "margin shortfall";

  if (cert.kind == CertificateKind::unitary)
    for (const auto& u : cert.elements)
      if (!is_unitary(u, std::max(tol.identity_tol, 1e-10))) {
        report.ok = false;
        report.detail = "non-unitary element in a unitary certificate";
        break;
      }

  if (emb != nullptr)
    for (const auto& xj : cert.elements) {
      double res = membership_residual(*emb, xj);
      report.worst_membership = std::max(report.worst_membership, res);
      if (res > tol.eig_floor * std::max(1.0, xj.norm())) {
        report.ok = false;
        report.detail = "element outside the algebra";
      }
    }
  return report;
}

NormInequality norm_inequality_check(const ComplexMatrix& x, const ComplexMatrix& f1,
                                     const ComplexMatrix& f2, const ComplexMatrix& f3,
                                     const ToleranceConfig& tol) {
  tol.validate();
  require_square(x, "norm_inequality_check");
  const ComplexMatrix* fs[3] = {&f1, &f2, &f3};
  const double proj_tol = std::max(tol.identity_tol, 1e-10);
  for (const auto* f : fs) {
    if (f->rows() != x.rows() || f->cols() != x.cols())
      throw std::invalid_argument("norm_inequality_check: dimension mismatch");
    if (!is_projection(*f, proj_tol))
      throw std::invalid_argument("norm_inequality_check: input is not a projection");
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (((*fs[i]) * (*fs[j])).cwiseAbs().maxCoeff() > proj_tol)
        throw std::invalid_argument(
            "norm_inequality_check: projections are not orthogonal");

  NormInequality result;
  result.lhs = operator_norm(x);
  ComplexMatrix one = identity_matrix(static_cast<int>(x.rows()));
  for (const auto* f : fs) {
    ComplexMatrix q = one - *f;
    result.rhs += operator_norm(q * x * q);
  }
  result.holds = result.lhs <= 2.0 * result.rhs + tol.eig_floor;
  return result;
}

FullnessCertificate tensor_certificate(const FullnessCertificate& c1,
                                       const ComplexMatrix& a1,
                                       const FullnessCertificate& c2,
                                       const ComplexMatrix& a2,
                                       const ToleranceConfig& tol) {
  tol.validate();
  VerifyReport r1 = verify_certificate(a1, c1, nullptr, tol);
  VerifyReport r2 = verify_certificate(a2, c2, nullptr, tol);
  if (!r1.ok || !r2.ok)
    throw std::invalid_argument("tensor_certificate: input certificate invalid");

  FullnessCertificate cert;
  cert.kind = (c1.kind == CertificateKind::unitary &&
               c2.kind == CertificateKind::unitary)
                  ? CertificateKind::unitary
                  : CertificateKind::general;
  for (const auto& x : c1.elements)
    for (const auto& y : c2.elements) cert.elements.push_back(tensor(x, y));

  // Eigenvalues of the tensor product of the two positive sums multiply.
  double s1 = min_eigenvalue(hermitian_part(certificate_sum(a1, c1.elements)), 1e-8);
  double s2 = min_eigenvalue(hermitian_part(certificate_sum(a2, c2.elements)), 1e-8);
  cert.margin = s1 * s2;
  return cert;
}

}  // namespace cstar
