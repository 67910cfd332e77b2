#include "subclust/prototypes.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <numeric>
#include <random>

#include "subclust/parallel.hpp"
#include "subclust/random.hpp"

namespace subclust {

namespace {

Eigen::Index checked_ambient(std::span<const Subspace> samples) {
  if (samples.empty()) throw EmptyInput();
  const Eigen::Index n = samples[0].ambient_dim();
  for (const Subspace& s : samples)
    if (s.ambient_dim() != n) throw AmbientMismatch(n, s.ambient_dim());
  return n;
}

// [X_1 | ... | X_p], optionally with per-sample column scales.
Eigen::MatrixXd concat_bases(std::span<const Subspace> samples,
                             const std::vector<double>* scales = nullptr) {
  const Eigen::Index n = samples[0].ambient_dim();
  Eigen::Index total = 0;
  for (const Subspace& s : samples) total += s.dim();
  Eigen::MatrixXd cat(n, total);
  Eigen::Index offset = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Eigen::Index l = samples[i].dim();
    if (scales)
      cat.middleCols(offset, l) = samples[i].basis() * (*scales)[i];
    else
      cat.middleCols(offset, l) = samples[i].basis();
    offset += l;
  }
  return cat;
}

double objective_sum(std::span<const Subspace> samples, const Subspace& k) {
  std::vector<double> dist(samples.size());
  parallel_for(0, samples.size(),
               [&](std::size_t i) { dist[i] = sin2_theta1(samples[i], k); });
  return std::accumulate(dist.begin(), dist.end(), 0.0);
}

// Unit vector in span(X) closest to span(K).
Eigen::VectorXd closest_direction(const Subspace& x, const Subspace& k) {
  Eigen::MatrixXd product = x.basis().transpose() * k.basis();  // l x k
  if (product.cols() == 1) {
    const double norm = product.col(0).norm();
    if (norm > 0.0) return x.basis() * (product.col(0) / norm);
    return x.basis().col(0);  // X orthogonal to K: any direction works
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(product, Eigen::ComputeThinU);
  return x.basis() * svd.matrixU().col(0);
}

Subspace initial_prototype(std::span<const Subspace> samples,
                           const SvbfConfig& cfg, Eigen::Index n) {
  switch (cfg.init) {
    case SvbfInit::FromFlagMean:
      return flag_mean(samples, cfg.prototype_dim).prototype;
    case SvbfInit::FromGivenSubspace: {
      if (!cfg.init_subspace)
        throw Error("FromGivenSubspace init requires an init_subspace");
      const Subspace& given = *cfg.init_subspace;
      if (given.ambient_dim() != n) throw AmbientMismatch(n, given.ambient_dim());
      if (given.dim() != cfg.prototype_dim)
        throw Error("init_subspace dimension does not match prototype_dim");
      return given;
    }
    case SvbfInit::RandomOrthonormal: {
      std::mt19937_64 rng(cfg.seed);
      return orthonormalize(gaussian_matrix(n, cfg.prototype_dim, rng));
    }
  }
  throw Error("unknown SvbfInit");
}

}  // namespace

FitResult svbf_fit(std::span<const Subspace> samples, const SvbfConfig& cfg) {
  const Eigen::Index n = checked_ambient(samples);
  const Eigen::Index k = cfg.prototype_dim;
  if (k < 1 || k > n) throw DimensionTooLarge(k, n);

  FitResult result;
  result.prototype = initial_prototype(samples, cfg, n);

  double objective = objective_sum(samples, result.prototype);
  result.objective_history.push_back(objective);

  const std::size_t p = samples.size();
  Eigen::MatrixXd directions(n, static_cast<Eigen::Index>(p));
  for (int iter = 0; iter < cfg.max_inner_iters; ++iter) {
    parallel_for(0, p, [&](std::size_t i) {
      directions.col(static_cast<Eigen::Index>(i)) =
          closest_direction(samples[i], result.prototype);
    });
    const Eigen::MatrixXd previous_basis = result.prototype.basis();
    result.prototype =
        top_left_singular_basis(directions, k, &previous_basis).subspace;

    const double previous = objective;
    objective = objective_sum(samples, result.prototype);
    result.objective_history.push_back(objective);
    ++result.iterations_used;

    if (previous - objective <= cfg.objective_tol * previous) break;
  }

  result.objective = objective;
  return result;
}

FlagMeanResult flag_mean(std::span<const Subspace> samples, Eigen::Index k) {
  const Eigen::Index n = checked_ambient(samples);
  if (k < 1 || k > n) throw DimensionTooLarge(k, n);

  SpectralBasisResult top = top_left_singular_basis(concat_bases(samples), k);
  return FlagMeanResult{std::move(top.subspace), top.degenerate};
}

Subspace flag_median(std::span<const Subspace> samples, Eigen::Index k,
                     int max_irls_iters, double eps, double tol) {
  const Eigen::Index n = checked_ambient(samples);
  if (k < 1 || k > n) throw DimensionTooLarge(k, n);

  Subspace center = flag_mean(samples, k).prototype;

  std::vector<double> scales(samples.size());
  for (int iter = 0; iter < max_irls_iters; ++iter) {
    parallel_for(0, samples.size(), [&](std::size_t i) {
      const std::vector<double> sines = sin_theta_vector(samples[i], center);
      double d2 = 0.0;
      for (double s : sines) d2 += s * s;
      scales[i] = std::sqrt(1.0 / std::max(std::sqrt(d2), eps));
    });

    Subspace updated =
        top_left_singular_basis(concat_bases(samples, &scales), k).subspace;
    const double moved = principal_angles(center, updated).back();
    center = std::move(updated);
    if (moved < tol) break;
  }
  return center;
}

}  // namespace subclust
