#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "subclust/linalg.hpp"

namespace subclust {

// A collection of subspaces sharing one ambient dimension, with optional
// integer class labels (same length as samples when present).
struct SubspaceDataset {
  std::vector<Subspace> samples;
  std::optional<std::vector<int>> class_labels;
  std::string name;

  std::size_t size() const { return samples.size(); }
  Eigen::Index ambient_dim() const {
    return samples.empty() ? 0 : samples.front().ambient_dim();
  }
};

struct SynthSpec {
  int num_prototypes = 5;
  int samples_per_prototype = 10;
  Eigen::Index ambient_dim = 25;  // n, must exceed sample_dim
  Eigen::Index sample_dim = 10;   // l
  double noise_level = 0.0;
  std::uint64_t seed = 0;
};

// Draws num_prototypes random unit vectors w_g, then for each sample of
// group g builds an l-dim subspace containing u = normalize(w_g +
// noise_level * gaussian), completed with l-1 Gaussian directions. At
// noise_level 0 every sample contains its generator line exactly.
// generator_lines, when given, receives the w_g as 1-dim subspaces.
SubspaceDataset synth_generate(const SynthSpec& spec,
                               std::vector<Subspace>* generator_lines = nullptr);

// MNIST-style IDX pair: one row per image, pixels scaled into [0,1].
struct IdxImages {
  Eigen::MatrixXd pixels;
  std::vector<int> labels;
};
IdxImages load_idx_images(const std::string& images_path,
                          const std::string& labels_path);

// Filters rows to keep_classes (empty = keep all), shuffles within each
// class (seeded per class), partitions into consecutive groups of
// group_size rows dropping the remainder, and orthonormalizes each group
// into a Subspace labeled with its class. Rank-deficient groups are dropped
// with a message appended to warnings.
SubspaceDataset group_into_subspaces(const Eigen::MatrixXd& vectors,
                                     const std::vector<int>& classes,
                                     Eigen::Index group_size,
                                     const std::vector<int>& keep_classes,
                                     std::uint64_t seed,
                                     std::vector<std::string>* warnings = nullptr);

// CSV with header `class,f0,f1,...`: one labeled feature vector per row.
struct MatrixDataset {
  Eigen::MatrixXd features;  // one row per vector
  std::vector<int> classes;
};
MatrixDataset load_matrix_dataset(const std::string& path);

// Native binary container for subspace datasets (magic "SUBDS1"): flags
// byte (bit 0 = class labels present), ambient dim, sample count, then per
// sample its dimension, optional class, and column-major float64 basis.
// All multi-byte fields little-endian. Round-trips bit-exactly.
void save_dataset(const SubspaceDataset& dataset, const std::string& path);
SubspaceDataset load_dataset(const std::string& path);

}  // namespace subclust
