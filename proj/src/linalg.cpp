#include "subclust/linalg.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "subclust/random.hpp"

namespace subclust {

namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// Cosines of the principal angles: singular values of U^T V, descending.
Eigen::VectorXd angle_cosines(const Subspace& u, const Subspace& v) {
  Eigen::MatrixXd product = u.basis().transpose() * v.basis();
  if (product.rows() == 1 || product.cols() == 1) {
    Eigen::VectorXd sigma(1);
    sigma(0) = product.norm();
    return sigma;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(product);
  return svd.singularValues();
}

void check_ambient(const Subspace& u, const Subspace& v) {
  if (u.ambient_dim() != v.ambient_dim())
    throw AmbientMismatch(u.ambient_dim(), v.ambient_dim());
}

}  // namespace

double Subspace::orthonormality_error() const {
  if (basis_.cols() == 0) return 0.0;
  Eigen::MatrixXd gram = basis_.transpose() * basis_;
  gram.diagonal().array() -= 1.0;
  return gram.cwiseAbs().maxCoeff();
}

Subspace orthonormalize(const Eigen::MatrixXd& raw, double tol) {
  const Eigen::Index n = raw.rows();
  const Eigen::Index l = raw.cols();
  if (l < 1 || n < l) throw DimensionTooLarge(l, n);

  Eigen::BDCSVD<Eigen::MatrixXd> svd(raw, Eigen::ComputeThinU);
  const Eigen::VectorXd& sigma = svd.singularValues();
  Eigen::Index rank = 0;
  if (sigma(0) > 0.0) {
    const double cutoff = tol * sigma(0);
    while (rank < sigma.size() && sigma(rank) >= cutoff) ++rank;
  }
  if (rank < l) throw RankDeficient(rank, l);
  return Subspace(svd.matrixU().leftCols(l));
}

AngleVector principal_angles(const Subspace& u, const Subspace& v) {
  check_ambient(u, v);
  const Eigen::Index r = std::min(u.dim(), v.dim());
  AngleVector angles(static_cast<std::size_t>(r));
  if (r == 0) return angles;

  Eigen::VectorXd cosines = angle_cosines(u, v);

  // arccos loses half the significant digits near sigma = 1, so angles below
  // pi/4 are recovered from the sines instead. Projecting the smaller basis
  // onto the complement of the larger subspace yields exactly r singular
  // values, sin(theta_r) >= ... >= sin(theta_1); the opposite orientation
  // would add spurious values that interleave with the true sines.
  Eigen::VectorXd sines;
  if (cosines(0) * cosines(0) > 0.5) {
    const Subspace& small = u.dim() <= v.dim() ? u : v;
    const Subspace& big = u.dim() <= v.dim() ? v : u;
    Eigen::MatrixXd residual =
        small.basis() -
        big.basis() * (big.basis().transpose() * small.basis());
    Eigen::BDCSVD<Eigen::MatrixXd> svd(residual);
    sines = svd.singularValues().reverse();
  }

  for (Eigen::Index i = 0; i < r; ++i) {
    const double c = clamp01(cosines(i));
    if (c * c > 0.5)
      angles[static_cast<std::size_t>(i)] = std::asin(clamp01(sines(i)));
    else
      angles[static_cast<std::size_t>(i)] = std::acos(c);
  }
  return angles;
}

double sin2_theta1(const Subspace& u, const Subspace& v) {
  check_ambient(u, v);
  Eigen::MatrixXd product = u.basis().transpose() * v.basis();
  double sigma_max;
  if (product.rows() == 1 || product.cols() == 1) {
    sigma_max = product.norm();
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(product);
    sigma_max = svd.singularValues()(0);
  }
  sigma_max = clamp01(sigma_max);
  return 1.0 - sigma_max * sigma_max;
}

std::vector<double> sin_theta_vector(const Subspace& u, const Subspace& v) {
  AngleVector angles = principal_angles(u, v);
  std::vector<double> sines(angles.size());
  std::transform(angles.begin(), angles.end(), sines.begin(),
                 [](double a) { return std::sin(a); });
  return sines;
}

SpectralBasisResult top_left_singular_basis(
    const Eigen::MatrixXd& columns, Eigen::Index k,
    const Eigen::MatrixXd* prefer_completion) {
  const Eigen::Index n = columns.rows();
  const Eigen::Index m = columns.cols();
  if (k < 1 || k > n) throw DimensionTooLarge(k, n);

  Eigen::BDCSVD<Eigen::MatrixXd> svd(columns, Eigen::ComputeThinU);
  const Eigen::VectorXd& sigma = svd.singularValues();

  SpectralBasisResult result;
  result.singular_values = sigma;
  if (sigma.size() > 0 && sigma(0) > 0.0) {
    const double cutoff = kDefaultRankTol * sigma(0);
    while (result.rank < sigma.size() && sigma(result.rank) >= cutoff)
      ++result.rank;
  }

  const Eigen::Index q = sigma.size();  // = min(n, m)
  if (q >= k) {
    result.subspace = Subspace(svd.matrixU().leftCols(k));
    if (result.rank < k) {
      result.degenerate = true;
    } else if (k < q) {
      // Tie at the cutoff: sigma_k and sigma_{k+1} relatively closer than
      // 1e-10 means the returned span is an eigensolver-order choice.
      const double gap = sigma(k - 1) - sigma(k);
      result.degenerate = (sigma(k - 1) <= 0.0) || (gap < 1e-10 * sigma(k - 1));
    }
  } else {
    // Fewer singular directions than k. All of the input's range is already
    // captured, so any orthonormal completion is a valid top-k choice;
    // prefer_completion directions (e.g. the previous iterate) keep more
    // continuity than a raw complement.
    Eigen::MatrixXd padded = svd.matrixU();
    if (prefer_completion && prefer_completion->rows() == n) {
      padded.conservativeResize(n, k);
      Eigen::Index have = q;
      for (Eigen::Index j = 0;
           j < prefer_completion->cols() && have < k; ++j) {
        Eigen::VectorXd g = prefer_completion->col(j);
        auto kept = padded.leftCols(have);
        g -= kept * (kept.transpose() * g);
        g -= kept * (kept.transpose() * g);
        const double norm = g.norm();
        if (norm > 1e-8) padded.col(have++) = g / norm;
      }
      padded.conservativeResize(n, have);
    }
    result.subspace = Subspace(complete_basis_deterministic(padded, k));
    result.degenerate = true;
  }
  (void)m;
  return result;
}

Eigen::MatrixXd complete_basis_deterministic(const Eigen::MatrixXd& basis,
                                             Eigen::Index k) {
  const Eigen::Index n = basis.rows();
  const Eigen::Index p = basis.cols();
  if (k > n) throw DimensionTooLarge(k, n);
  if (p >= k) return basis.leftCols(k);
  if (p == 0) return Eigen::MatrixXd::Identity(n, k);

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
  Eigen::MatrixXd head_q =
      qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  Eigen::MatrixXd out(n, k);
  out.leftCols(p) = basis;
  out.rightCols(k - p) = head_q.rightCols(k - p);
  return out;
}

Eigen::MatrixXd complete_basis_random(const Eigen::MatrixXd& basis,
                                      Eigen::Index k, std::mt19937_64& rng) {
  const Eigen::Index n = basis.rows();
  const Eigen::Index p = basis.cols();
  if (k > n) throw DimensionTooLarge(k, n);
  if (p >= k) return basis.leftCols(k);

  Eigen::MatrixXd out(n, k);
  out.leftCols(p) = basis;
  for (Eigen::Index j = p; j < k; ++j) {
    double norm = 0.0;
    for (int attempt = 0; attempt < 16; ++attempt) {
      Eigen::VectorXd g = gaussian_vector(n, rng);
      auto built = out.leftCols(j);
      g -= built * (built.transpose() * g);
      g -= built * (built.transpose() * g);  // second pass for orthogonality
      norm = g.norm();
      if (norm > 1e-8) {
        out.col(j) = g / norm;
        break;
      }
    }
    if (norm <= 1e-8)
      throw Error("failed to draw an orthogonal complement direction");
  }
  return out;
}

}  // namespace subclust
