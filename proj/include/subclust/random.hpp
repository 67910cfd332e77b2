#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace subclust {

// splitmix64 finalizer; stable across platforms and builds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t seed_combine(std::uint64_t seed, std::uint64_t value) {
  return splitmix64(seed ^ splitmix64(value));
}

// Folds any number of tags into a base seed. Each distinct tag sequence
// yields an independent, reproducible stream.
template <class... Tags>
std::uint64_t derive_seed(std::uint64_t seed, Tags... tags) {
  ((seed = seed_combine(seed, static_cast<std::uint64_t>(tags))), ...);
  return seed;
}

// FNV-1a, used to fold strings (e.g. method names) into seeds.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// First `take` steps of a Fisher-Yates shuffle: indices[0..take) becomes a
// uniform sample without replacement. take = size gives a full shuffle.
// Draws rng() % span directly, so results do not depend on the standard
// library's std::shuffle implementation.
inline void partial_shuffle(std::vector<std::size_t>& indices,
                            std::size_t take, std::mt19937_64& rng) {
  const std::size_t n = indices.size();
  if (n < 2) return;
  const std::size_t steps = std::min(take, n - 1);
  for (std::size_t i = 0; i < steps; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
    std::swap(indices[i], indices[j]);
  }
}

// Standard-normal matrix filled in a fixed column-major order.
inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                                       std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = gauss(rng);
  return m;
}

inline Eigen::VectorXd gaussian_vector(Eigen::Index size, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = gauss(rng);
  return v;
}

}  // namespace subclust
