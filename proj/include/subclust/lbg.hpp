#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "subclust/data.hpp"
#include "subclust/prototypes.hpp"

namespace subclust {

enum class PrototypeMethod { Svbf, FlagMean, FlagMedian };
enum class InitStrategy { SampleSeeded, RandomOrthonormal };

const char* to_string(PrototypeMethod method);
std::optional<PrototypeMethod> parse_prototype_method(std::string_view name);

struct LbgConfig {
  int num_centers = 1;  // m
  int max_outer_iters = 7;
  double distortion_rel_tol = 1e-4;
  PrototypeMethod prototype_method = PrototypeMethod::Svbf;
  Eigen::Index prototype_dim = 1;  // k
  InitStrategy init_strategy = InitStrategy::SampleSeeded;
  std::uint64_t seed = 0;
  // Inner-solver settings when prototype_method is Svbf. prototype_dim,
  // init, and init_subspace are overridden per cluster by the outer loop.
  SvbfConfig svbf;
};

struct ClusterModel {
  std::vector<Subspace> prototypes;
  std::vector<int> labels;
  // Mean assigned distance after every assign pass; entry 0 is the
  // post-initialization value. Non-increasing within solver tolerance.
  std::vector<double> distortion_history;
  LbgConfig config;
  int iterations_used = 0;  // update passes performed
};

// Initial prototypes. SampleSeeded draws m distinct samples and converts
// each to dimension k (first k basis columns, or random orthonormal padding
// when k exceeds the sample's dimension). RandomOrthonormal draws m
// independent orthonormalized Gaussian bases.
std::vector<Subspace> init_prototypes(const SubspaceDataset& dataset,
                                      const LbgConfig& cfg);

struct AssignResult {
  std::vector<int> labels;
  std::vector<double> distances;  // sin^2(theta_1) to the assigned prototype
  double distortion = 0.0;        // mean of distances
};

// Labels every sample with its first-angle-nearest prototype; ties go to
// the lowest prototype index.
AssignResult assign(const SubspaceDataset& dataset,
                    const std::vector<Subspace>& prototypes);

// Refits each non-empty cluster's prototype from its members using
// cfg.prototype_method (SVBF warm-starts from the current prototype).
// Empty clusters are re-seeded from the samples that sit farthest from
// their assigned centers, worst first.
std::vector<Subspace> update_prototypes(const SubspaceDataset& dataset,
                                        const std::vector<int>& labels,
                                        const std::vector<Subspace>& current,
                                        const LbgConfig& cfg);

// Full loop: init, then assign/update rounds until the relative distortion
// improvement between consecutive assign passes drops below
// cfg.distortion_rel_tol or max_outer_iters updates have run. Labels always
// correspond to the returned prototypes.
ClusterModel lbg_cluster(const SubspaceDataset& dataset, const LbgConfig& cfg);

}  // namespace subclust
