#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "subclust/linalg.hpp"

namespace subclust {

enum class SvbfInit { FromFlagMean, FromGivenSubspace, RandomOrthonormal };

struct SvbfConfig {
  Eigen::Index prototype_dim = 1;  // k
  int max_inner_iters = 100;
  double objective_tol = 1e-9;  // relative objective change per sweep
  SvbfInit init = SvbfInit::FromFlagMean;
  std::uint64_t seed = 0;  // used by RandomOrthonormal init
  // Starting prototype for SvbfInit::FromGivenSubspace (e.g. a warm start).
  std::optional<Subspace> init_subspace;
};

struct FitResult {
  Subspace prototype;
  double objective = 0.0;  // final sum of sin^2(theta_1) over the samples
  std::vector<double> objective_history;  // entry 0 is the initial objective
  int iterations_used = 0;
};

// Fits a k-dimensional prototype K minimizing sum_i sin^2(theta_1(X_i, K))
// by block-coordinate ascent on the complementary sum of cos^2(theta_1):
//   (a) w_i <- the unit vector in span(X_i) closest to K
//       (X_i v_i, v_i the top right singular vector of K^T X_i),
//   (b) K <- span of the top-k left singular vectors of [w_1 | ... | w_p].
// Each sweep cannot increase the objective; iteration stops when the
// improvement drops below objective_tol relative to the previous value.
FitResult svbf_fit(std::span<const Subspace> samples, const SvbfConfig& cfg);

struct FlagMeanResult {
  Subspace prototype;
  // Tie at the k-th singular value of the concatenation (or rank below k):
  // the prototype is a deterministic eigensolver-order choice, not unique.
  bool degenerate_spectrum = false;
};

// Chordal flag mean: the top-k left singular vectors of [X_1 | ... | X_p].
FlagMeanResult flag_mean(std::span<const Subspace> samples, Eigen::Index k);

// IRLS flag median: repeat
//   d_i = ||sin_theta_vector(X_i, K)||_2,  w_i = 1 / max(d_i, eps),
//   K <- top-k left singular vectors of [sqrt(w_1) X_1 | ... | sqrt(w_p) X_p]
// until K moves by less than tol in largest principal angle or the iteration
// cap is reached. Starts from the unweighted flag mean.
Subspace flag_median(std::span<const Subspace> samples, Eigen::Index k,
                     int max_irls_iters = 50, double eps = 1e-8,
                     double tol = 1e-8);

}  // namespace subclust
