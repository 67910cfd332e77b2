#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "subclust/errors.hpp"

namespace subclust {

// Default relative singular-value cutoff for numerical rank decisions.
inline constexpr double kDefaultRankTol = 1e-8;

// A point on the Grassmannian Gr(l, n): an n x l matrix with orthonormal
// columns. Two bases related by a right orthogonal factor represent the same
// subspace; everything in this library is invariant under that choice.
class Subspace {
 public:
  Subspace() = default;
  explicit Subspace(Eigen::MatrixXd basis) : basis_(std::move(basis)) {}

  const Eigen::MatrixXd& basis() const { return basis_; }
  Eigen::Index ambient_dim() const { return basis_.rows(); }
  Eigen::Index dim() const { return basis_.cols(); }

  // max |B^T B - I|; zero for an exactly orthonormal basis.
  double orthonormality_error() const;

 private:
  Eigen::MatrixXd basis_;
};

// Principal angles in radians, non-decreasing, each in [0, pi/2].
using AngleVector = std::vector<double>;

// Orthonormal basis spanning the columns of raw. Throws RankDeficient when
// the numerical rank of raw (singular values >= tol * sigma_max) is below its
// column count.
Subspace orthonormalize(const Eigen::MatrixXd& raw, double tol = kDefaultRankTol);

// All min(dim U, dim V) principal angles between the two subspaces.
AngleVector principal_angles(const Subspace& u, const Subspace& v);

// Squared sine of the smallest principal angle: 1 - sigma_max(U^T V)^2.
// Only the top singular value is computed.
double sin2_theta1(const Subspace& u, const Subspace& v);

// Elementwise sine of principal_angles(u, v), same ordering.
std::vector<double> sin_theta_vector(const Subspace& u, const Subspace& v);

// Basis of the span of the top-k left singular vectors of `columns`.
// When the matrix has fewer than k columns the basis is padded to k: first
// with directions from `prefer_completion` (orthogonalized against what was
// kept), then with a deterministic orthonormal complement. Padded or
// rank-deficient results are flagged degenerate.
struct SpectralBasisResult {
  Subspace subspace;
  // True when sigma_k and sigma_{k+1} are relatively closer than 1e-10, or
  // when rank < k or padding was required: the top-k subspace is not unique.
  bool degenerate = false;
  Eigen::Index rank = 0;
  Eigen::VectorXd singular_values;
};
SpectralBasisResult top_left_singular_basis(
    const Eigen::MatrixXd& columns, Eigen::Index k,
    const Eigen::MatrixXd* prefer_completion = nullptr);

// Extends an orthonormal n x p basis to n x k using the Householder
// complement. Deterministic; the original columns are kept verbatim.
Eigen::MatrixXd complete_basis_deterministic(const Eigen::MatrixXd& basis,
                                             Eigen::Index k);

// Extends an orthonormal n x p basis to n x k with seeded Gaussian directions
// orthogonalized against it. The original columns are kept verbatim.
Eigen::MatrixXd complete_basis_random(const Eigen::MatrixXd& basis,
                                      Eigen::Index k, std::mt19937_64& rng);

}  // namespace subclust
