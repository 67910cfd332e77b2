#include "subclust/lbg.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "subclust/parallel.hpp"
#include "subclust/random.hpp"

namespace subclust {

namespace {

constexpr std::uint64_t kPickTag = 0x7069636bULL;  // SampleSeeded draw
constexpr std::uint64_t kPadTag = 0x706164ULL;     // k > sample dim padding
constexpr std::uint64_t kRandTag = 0x72616e64ULL;  // RandomOrthonormal bases
constexpr std::uint64_t kHealTag = 0x6865616cULL;  // empty-cluster reseed

// k-dim prototype from one sample: its leading basis columns, padded with
// seeded random complement directions when the sample is too small.
Subspace prototype_from_sample(const Subspace& sample, Eigen::Index k,
                               std::uint64_t pad_seed) {
  if (k <= sample.dim()) return Subspace(sample.basis().leftCols(k));
  std::mt19937_64 rng(pad_seed);
  return Subspace(complete_basis_random(sample.basis(), k, rng));
}

void check_config(const SubspaceDataset& dataset, const LbgConfig& cfg) {
  if (dataset.samples.empty()) throw EmptyInput();
  if (cfg.num_centers < 1) throw Error("num_centers must be at least 1");
  if (cfg.max_outer_iters < 1) throw Error("max_outer_iters must be at least 1");
  const Eigen::Index n = dataset.ambient_dim();
  if (cfg.prototype_dim < 1 || cfg.prototype_dim > n)
    throw DimensionTooLarge(cfg.prototype_dim, n);
}

}  // namespace

const char* to_string(PrototypeMethod method) {
  switch (method) {
    case PrototypeMethod::Svbf: return "svbf";
    case PrototypeMethod::FlagMean: return "flagmean";
    case PrototypeMethod::FlagMedian: return "flagmedian";
  }
  return "unknown";
}

std::optional<PrototypeMethod> parse_prototype_method(std::string_view name) {
  if (name == "svbf") return PrototypeMethod::Svbf;
  if (name == "flagmean") return PrototypeMethod::FlagMean;
  if (name == "flagmedian") return PrototypeMethod::FlagMedian;
  return std::nullopt;
}

std::vector<Subspace> init_prototypes(const SubspaceDataset& dataset,
                                      const LbgConfig& cfg) {
  check_config(dataset, cfg);
  const Eigen::Index n = dataset.ambient_dim();
  const Eigen::Index k = cfg.prototype_dim;
  const std::size_t m = static_cast<std::size_t>(cfg.num_centers);

  std::vector<Subspace> prototypes;
  prototypes.reserve(m);

  if (cfg.init_strategy == InitStrategy::SampleSeeded) {
    if (m > dataset.samples.size())
      throw TooManyCenters(cfg.num_centers,
                           static_cast<long>(dataset.samples.size()));
    std::vector<std::size_t> indices(dataset.samples.size());
    std::iota(indices.begin(), indices.end(), std::size_t{0});
    std::mt19937_64 rng(derive_seed(cfg.seed, kPickTag));
    partial_shuffle(indices, m, rng);
    for (std::size_t i = 0; i < m; ++i)
      prototypes.push_back(prototype_from_sample(
          dataset.samples[indices[i]], k, derive_seed(cfg.seed, kPadTag, i)));
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      std::mt19937_64 rng(derive_seed(cfg.seed, kRandTag, i));
      prototypes.push_back(orthonormalize(gaussian_matrix(n, k, rng)));
    }
  }
  return prototypes;
}

AssignResult assign(const SubspaceDataset& dataset,
                    const std::vector<Subspace>& prototypes) {
  if (dataset.samples.empty() || prototypes.empty()) throw EmptyInput();
  const Eigen::Index n = dataset.ambient_dim();
  for (const Subspace& p : prototypes)
    if (p.ambient_dim() != n) throw AmbientMismatch(n, p.ambient_dim());

  const std::size_t count = dataset.samples.size();
  AssignResult result;
  result.labels.resize(count);
  result.distances.resize(count);
  parallel_for(0, count, [&](std::size_t j) {
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < prototypes.size(); ++i) {
      const double d = sin2_theta1(prototypes[i], dataset.samples[j]);
      if (d < best_dist) {
        best_dist = d;
        best = static_cast<int>(i);
      }
    }
    result.labels[j] = best;
    result.distances[j] = best_dist;
  });
  result.distortion =
      std::accumulate(result.distances.begin(), result.distances.end(), 0.0) /
      static_cast<double>(count);
  return result;
}

std::vector<Subspace> update_prototypes(const SubspaceDataset& dataset,
                                        const std::vector<int>& labels,
                                        const std::vector<Subspace>& current,
                                        const LbgConfig& cfg) {
  const std::size_t count = dataset.samples.size();
  const std::size_t m = current.size();
  if (labels.size() != count) throw LengthMismatch(count, labels.size());
  for (int label : labels)
    if (label < 0 || static_cast<std::size_t>(label) >= m)
      throw Error("label " + std::to_string(label) + " outside [0, " +
                  std::to_string(m) + ")");

  std::vector<std::vector<std::size_t>> members(m);
  for (std::size_t j = 0; j < count; ++j)
    members[static_cast<std::size_t>(labels[j])].push_back(j);

  const Eigen::Index k = cfg.prototype_dim;
  std::vector<Subspace> updated = current;
  std::vector<std::size_t> empty_clusters;
  for (std::size_t i = 0; i < m; ++i) {
    if (members[i].empty()) {
      empty_clusters.push_back(i);
      continue;
    }
    std::vector<Subspace> cluster;
    cluster.reserve(members[i].size());
    for (std::size_t j : members[i]) cluster.push_back(dataset.samples[j]);

    switch (cfg.prototype_method) {
      case PrototypeMethod::Svbf: {
        SvbfConfig sub = cfg.svbf;
        sub.prototype_dim = k;
        sub.init = SvbfInit::FromGivenSubspace;
        sub.init_subspace = current[i];
        updated[i] = svbf_fit(cluster, sub).prototype;
        break;
      }
      case PrototypeMethod::FlagMean:
        updated[i] = flag_mean(cluster, k).prototype;
        break;
      case PrototypeMethod::FlagMedian:
        updated[i] = flag_median(cluster, k);
        break;
    }
  }

  if (!empty_clusters.empty()) {
    // Farthest-point heal: the worst-fitting samples (against the centers
    // the labels were assigned to) re-seed the empty clusters, worst first.
    std::vector<double> distances(count);
    parallel_for(0, count, [&](std::size_t j) {
      distances[j] = sin2_theta1(
          current[static_cast<std::size_t>(labels[j])], dataset.samples[j]);
    });
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (distances[a] != distances[b]) return distances[a] > distances[b];
      return a < b;
    });
    for (std::size_t e = 0; e < empty_clusters.size(); ++e) {
      const std::size_t cluster_index = empty_clusters[e];
      const std::size_t sample_index = order[e % count];
      updated[cluster_index] = prototype_from_sample(
          dataset.samples[sample_index], k,
          derive_seed(cfg.seed, kHealTag, cluster_index));
    }
  }
  return updated;
}

ClusterModel lbg_cluster(const SubspaceDataset& dataset, const LbgConfig& cfg) {
  check_config(dataset, cfg);

  ClusterModel model;
  model.config = cfg;
  model.prototypes = init_prototypes(dataset, cfg);

  AssignResult pass = assign(dataset, model.prototypes);
  model.distortion_history.push_back(pass.distortion);

  for (int iter = 0; iter < cfg.max_outer_iters; ++iter) {
    model.prototypes =
        update_prototypes(dataset, pass.labels, model.prototypes, cfg);
    pass = assign(dataset, model.prototypes);
    model.distortion_history.push_back(pass.distortion);
    ++model.iterations_used;

    const double previous =
        model.distortion_history[model.distortion_history.size() - 2];
    const double improvement = previous - pass.distortion;
    if (previous <= 0.0 || improvement < cfg.distortion_rel_tol * previous)
      break;
  }

  model.labels = std::move(pass.labels);
  return model;
}

}  // namespace subclust
