#pragma once

#include <optional>
#include <vector>

#include "cstar/matrix_ops.hpp"
#include "cstar/types.hpp"

namespace cstar {

/// Abstract shape of a finite-dimensional C*-algebra: a direct sum of full
/// matrix blocks M_{n_1} (+) ... (+) M_{n_r}.
struct BlockStructure {
  std::vector<int> blocks;

  int block_count() const { return static_cast<int>(blocks.size()); }

  /// Sum of n_i^2, the dimension of the abstract algebra as a vector space.
  int abstract_dim() const;

  void validate() const;
};

/// An element of the abstract block algebra: one n_i x n_i matrix per block.
using AbstractElement = std::vector<ComplexMatrix>;

/// A unital *-isomorphism of a block algebra onto a subalgebra of M_N,
/// stored through the images of all matrix units. unit_images[i] holds the
/// images of block i in row-major pair order, so the image of e^{(i)}_{st}
/// sits at unit_images[i][s * n_i + t] (0-based s, t).
struct SubalgebraEmbedding {
  int ambient_dim = 0;
  BlockStructure structure;
  std::vector<std::vector<ComplexMatrix>> unit_images;

  int block_count() const { return structure.block_count(); }
  int block_dim(int i) const { return structure.blocks.at(i); }
  const ComplexMatrix& unit(int i, int s, int t) const;
};

/// A linear subspace of M_N given by a basis.
struct OperatorSubspace {
  int ambient_dim = 0;
  std::vector<ComplexMatrix> basis;

  int dim() const { return static_cast<int>(basis.size()); }
};

/// Diagnostics from validate_embedding. Residuals are worst-case entrywise
/// violation magnitudes per relation family.
struct EmbeddingReport {
  double relation_residual = 0.0;   // e_{s1}e_{1t} = e_{st}, e_{1s}e_{t1} = d_{st} e_{11}
  double adjoint_residual = 0.0;    // (e_{st})* = e_{ts}
  double unit_residual = 0.0;       // sum of diagonal images = 1_N
  double independence_gap = 0.0;    // smallest eigenvalue of the HS Gram matrix
  std::vector<int> multiplicities;  // m_i = round(tr of e^{(i)}_{11} image)
  bool dims_consistent = false;     // sum m_i n_i = N with every m_i >= 1

  bool valid(const ToleranceConfig& tol = {}) const {
    return relation_residual <= tol.identity_tol &&
           adjoint_residual <= tol.identity_tol &&
           unit_residual <= tol.identity_tol && independence_gap > tol.eig_floor &&
           dims_consistent;
  }
};

/// Checks the matrix-unit relations, adjoint symmetry, unitality, and linear
/// independence of an embedding. Reports violations instead of throwing;
/// throws only on shape mismatch.
///
/// The relation family is checked through the generating identities
/// e_{s1}e_{1t} = e_{st} and e_{1s}e_{t1} = d_{st}e_{11}, which imply the
/// full O(n^4) family; when the total number of pairwise products is small
/// the full family is checked directly.
EmbeddingReport validate_embedding(const SubalgebraEmbedding& emb,
                                   const ToleranceConfig& tol = {});

/// Per-block isometries onto the multiplicity decomposition of an embedding.
/// Columns of isometry(i) are grouped by abstract row index: column s*m_i + m
/// is the image of e^{(i)}_{s1} applied to the m-th orthonormal vector of
/// range(e^{(i)}_{11}).
class ExpectationOperator {
 public:
  explicit ExpectationOperator(const SubalgebraEmbedding& emb,
                               const ToleranceConfig& tol = {});

  /// E(x): the Hilbert-Schmidt-orthogonal projection of x onto the commutant
  /// of the embedded algebra. Unital, positive, idempotent, trace preserving.
  ComplexMatrix apply(const ComplexMatrix& x) const;

  int ambient_dim() const { return ambient_dim_; }
  const std::vector<int>& multiplicities() const { return multiplicities_; }
  const ComplexMatrix& isometry(int i) const { return isometries_.at(i); }

 private:
  int ambient_dim_;
  std::vector<int> block_dims_;
  std::vector<int> multiplicities_;
  std::vector<ComplexMatrix> isometries_;
};

/// Orthonormal (Hilbert-Schmidt) basis of the commutant of the embedded
/// algebra inside M_N. Dimension is the sum of squared multiplicities.
OperatorSubspace commutant(const SubalgebraEmbedding& emb,
                           const ToleranceConfig& tol = {});

/// One-shot conditional expectation onto the commutant. Equals the Haar
/// average of u x u* over the unitary group of the embedded algebra.
ComplexMatrix conditional_expectation(const SubalgebraEmbedding& emb,
                                      const ComplexMatrix& a,
                                      const ToleranceConfig& tol = {});

/// Images of the block identities, one per block: pairwise orthogonal
/// projections summing to the ambient identity.
std::vector<ComplexMatrix> minimal_central_projections(const SubalgebraEmbedding& emb);

/// Coefficients of the HS projection of x onto the span of the unit images,
/// returned in abstract coordinates. When x lies in the algebra this is the
/// inverse parametrization; in general it is the trace-preserving
/// conditional expectation onto the embedded algebra.
AbstractElement abstract_coordinates(const SubalgebraEmbedding& emb,
                                     const ComplexMatrix& x);

/// Realizes an abstract element in the ambient algebra.
ComplexMatrix apply_embedding(const SubalgebraEmbedding& emb,
                              const AbstractElement& coeffs);

/// Frobenius distance from x to the span of the unit images.
double membership_residual(const SubalgebraEmbedding& emb, const ComplexMatrix& x);

/// HS projection of x onto the embedded algebra, as an ambient matrix.
ComplexMatrix project_onto_algebra(const SubalgebraEmbedding& emb,
                                   const ComplexMatrix& x);

/// Decision wrapper and certificate data for fullness INSIDE the algebra:
/// a positive element of B is full in B iff it does not vanish in any block.
struct FullInAlgebraResult {
  bool full = false;
  std::vector<double> block_norms;           // operator norm of each block component
  std::vector<ComplexMatrix> unitaries;      // ambient images, present iff full
  double margin = 0.0;                       // min eigenvalue of sum u* a u
};

/// Decides fullness of a (given in ambient coordinates, must lie in the
/// algebra span) inside the embedded algebra, and when full produces
/// unitaries u_r of the algebra with sum u_r* a u_r >= margin > 0. The
/// construction conjugates each block's spectral decomposition through the
/// cyclic shift, giving margin at least min_i tr(a_i).
FullInAlgebraResult full_in_algebra(const ComplexMatrix& a,
                                    const SubalgebraEmbedding& emb,
                                    const ToleranceConfig& tol = {});

/// Kronecker product of two embeddings: B1 (x) B2 inside A1 (x) A2, with
/// pairwise product block structure ordered with e1's blocks outermost.
SubalgebraEmbedding tensor_embedding(const SubalgebraEmbedding& e1,
                                     const SubalgebraEmbedding& e2);

/// Samples an ambient unitary by drawing a Haar unitary in each abstract
/// block and pushing the result through the embedding.
ComplexMatrix haar_element(const SubalgebraEmbedding& emb, std::mt19937_64& rng);

/// The commutant packaged as an embedding of its own block algebra (blocks
/// are the multiplicities of emb). Intended for moderate ambient dimensions;
/// the basis is materialized explicitly.
SubalgebraEmbedding commutant_embedding(const SubalgebraEmbedding& emb,
                                        const ToleranceConfig& tol = {});

// Factory embeddings used throughout tests and the CLI.

/// M_n as all of M_n.
SubalgebraEmbedding identity_embedding(int n);

/// C * 1_n inside M_n.
SubalgebraEmbedding scalar_embedding(int n);

/// The diagonal subalgebra C^n inside M_n (n blocks of size 1).
SubalgebraEmbedding diagonal_embedding(int n);

/// M_n (x) 1_m inside M_{nm}.
SubalgebraEmbedding left_factor_embedding(int n, int m);

/// 1_m (x) M_n inside M_{mn}.
SubalgebraEmbedding right_factor_embedding(int m, int n);

/// Block-diagonal direct sum embedding of the given blocks into M_N with
/// N = sum of blocks (multiplicity one each).
SubalgebraEmbedding direct_sum_embedding(const std::vector<int>& blocks);

/// Conjugates every unit image: e_st maps to u* (image) u.
SubalgebraEmbedding conjugate_embedding(const SubalgebraEmbedding& emb,
                                        const ComplexMatrix& u);

}  // namespace cstar
