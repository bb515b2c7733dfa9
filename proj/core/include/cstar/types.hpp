#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cstar {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Numerical tolerances shared across the library.
///
/// eig_floor     threshold below which an eigenvalue of a positive operator
///               is treated as zero
/// identity_tol  entrywise tolerance for algebraic identities (relations,
///               adjoints, reconstruction residuals)
/// cert_margin   relative margin target used when searching for fullness
///               certificates; must lie strictly between 0 and 1
struct ToleranceConfig {
  double eig_floor = 1e-9;
  double identity_tol = 1e-10;
  double cert_margin = 0.5;

  void validate() const {
    if (!(eig_floor > 0.0))
      throw std::invalid_argument("ToleranceConfig: eig_floor must be positive");
    if (!(identity_tol > 0.0))
      throw std::invalid_argument("ToleranceConfig: identity_tol must be positive");
    if (!(cert_margin > 0.0 && cert_margin < 1.0))
      throw std::invalid_argument("ToleranceConfig: cert_margin must lie in (0,1)");
  }
};

/// Thrown when an iterative search exhausts its sampling or iteration budget
/// without reaching its goal. The message records which budget ran out.
class BudgetExhausted : public std::runtime_error {
 public:
  explicit BudgetExhausted(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cstar
