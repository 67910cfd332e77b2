#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "subclust/lbg.hpp"

namespace subclust {

// Fraction of samples whose cluster's majority class matches theirs:
// sum over clusters of the most frequent class count, divided by N.
// Invariant under relabeling of cluster indices.
double purity(const std::vector<int>& labels, const std::vector<int>& classes);

// Lower-middle element: for even counts the smaller of the two middle
// values, so medians are always values that actually occurred.
double median_lower(std::vector<double> values);

struct SweepRecord {
  PrototypeMethod method = PrototypeMethod::Svbf;
  int num_centers = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  double purity = 0.0;
  double distortion = 0.0;
  int iters = 0;
  double seconds = 0.0;
};

struct SweepCellMedian {
  PrototypeMethod method = PrototypeMethod::Svbf;
  int num_centers = 0;
  double median_purity = 0.0;
  double median_distortion = 0.0;
};

struct SweepReport {
  std::vector<SweepRecord> records;
  std::vector<SweepCellMedian> medians;
};

// Observers invoked after each completed run, in record order. on_record
// supports incremental flushing; on_model exposes the full ClusterModel
// (e.g. for distortion-history checks) without storing every model.
struct SweepHooks {
  std::function<void(const SweepRecord&)> on_record;
  std::function<void(const ClusterModel&, const SweepRecord&)> on_model;
};

// Runs lbg_cluster over the full methods x center_counts x trials grid.
// Each cell's seed is derived from (base_cfg.seed, method, centers, trial),
// so any cell reproduces in isolation and extra trials never disturb
// earlier ones. Records appear in cross-product order.
SweepReport sweep(const SubspaceDataset& dataset,
                  const std::vector<PrototypeMethod>& methods,
                  const std::vector<int>& center_counts, int trials,
                  const LbgConfig& base_cfg, const SweepHooks& hooks = {});

// CSV emission. Headers:
//   method,num_centers,trial,seed,purity,distortion,iters,seconds
//   method,num_centers,median_purity,median_distortion
void write_sweep_records_csv(std::ostream& out, const SweepReport& report);
void write_sweep_medians_csv(std::ostream& out, const SweepReport& report);
void write_sweep_records_csv(const std::string& path, const SweepReport& report);
void write_sweep_medians_csv(const std::string& path, const SweepReport& report);

}  // namespace subclust
