#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include "cstar/types.hpp"

namespace cstar {

// ---------------------------------------------------------------------------
// Construction helpers
// ---------------------------------------------------------------------------

ComplexMatrix identity_matrix(int n);

/// Matrix unit e_{st} in M_n (1 at row s, column t, zero elsewhere).
ComplexMatrix matrix_unit(int n, int s, int t);

/// Kronecker product a (x) b; the left factor indexes the outer blocks.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

/// Block-diagonal direct sum.
ComplexMatrix direct_sum(const std::vector<ComplexMatrix>& blocks);

// ---------------------------------------------------------------------------
// Hermitian structure
// ---------------------------------------------------------------------------

ComplexMatrix hermitian_part(const ComplexMatrix& a);

/// Largest entrywise deviation of a from a*.
double hermiticity_defect(const ComplexMatrix& a);

bool is_hermitian(const ComplexMatrix& a, double tol);

/// Smallest eigenvalue of a Hermitian matrix. Throws std::invalid_argument
/// when the hermiticity defect exceeds tol scaled by max(1, ||a||_F).
double min_eigenvalue(const ComplexMatrix& a, double tol = 1e-10);
double max_eigenvalue(const ComplexMatrix& a, double tol = 1e-10);

/// Ascending spectrum of a Hermitian matrix.
RealVector hermitian_spectrum(const ComplexMatrix& a, double tol = 1e-10);

/// Spectral projection of a Hermitian matrix onto eigenvalues <= cut.
ComplexMatrix spectral_projection_below(const ComplexMatrix& a, double cut,
                                        double tol = 1e-10);

/// Apply a real function to a Hermitian matrix through its eigenbasis.
ComplexMatrix hermitian_function(const ComplexMatrix& a,
                                 const std::function<double(double)>& f,
                                 double tol = 1e-10);

/// (a - shift)_+ : positive part of a Hermitian matrix after subtracting
/// shift times the identity.
ComplexMatrix positive_part_shift(const ComplexMatrix& a, double shift,
                                  double tol = 1e-10);

/// Continuous cutoff applied spectrally: 0 on (-inf, delta], 1 on
/// [eps, inf), linear ramp in between. Requires delta < eps.
ComplexMatrix cutoff_apply(const ComplexMatrix& a, double delta, double eps,
                           double tol = 1e-10);

/// Square root of a positive semidefinite matrix; small negative
/// eigenvalues within tol are clamped to zero.
ComplexMatrix psd_sqrt(const ComplexMatrix& a, double tol = 1e-10);

/// Inverse square root on the range; eigenvalues at or below floor are
/// rejected with std::invalid_argument.
ComplexMatrix psd_inv_sqrt(const ComplexMatrix& a, double floor = 1e-12);

// ---------------------------------------------------------------------------
// Norms and pairings
// ---------------------------------------------------------------------------

/// Operator norm (largest singular value).
double operator_norm(const ComplexMatrix& a);

double frobenius_norm(const ComplexMatrix& a);

/// Hilbert-Schmidt inner product <a,b> = tr(a* b).
Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);

// ---------------------------------------------------------------------------
// Predicates
// ---------------------------------------------------------------------------

bool is_unitary(const ComplexMatrix& u, double tol);
bool is_projection(const ComplexMatrix& p, double tol);

// ---------------------------------------------------------------------------
// Random generation
// ---------------------------------------------------------------------------

/// Haar-distributed unitary from the QR decomposition of a complex Ginibre
/// matrix, with the phase correction that makes the distribution exact.
ComplexMatrix haar_unitary(int n, std::mt19937_64& rng);
ComplexMatrix haar_unitary(int n, std::uint64_t seed);

/// Complex Gaussian matrix, entries N(0,1) + i N(0,1).
ComplexMatrix ginibre(int n, int m, std::mt19937_64& rng);

}  // namespace cstar
