#include "subclust/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>

#include "subclust/random.hpp"

namespace subclust {

namespace {

// Shortest round-trippable-ish decimal without trailing zero noise; matches
// what generic CSV consumers expect.
std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");
  return out;
}

}  // namespace

double purity(const std::vector<int>& labels, const std::vector<int>& classes) {
  if (labels.size() != classes.size())
    throw LengthMismatch(labels.size(), classes.size());
  if (labels.empty()) throw EmptyInput();

  std::map<int, std::map<int, std::size_t>> class_counts_by_cluster;
  for (std::size_t i = 0; i < labels.size(); ++i)
    ++class_counts_by_cluster[labels[i]][classes[i]];

  std::size_t majority_total = 0;
  for (const auto& [cluster, counts] : class_counts_by_cluster) {
    std::size_t best = 0;
    for (const auto& [cls, count] : counts) best = std::max(best, count);
    majority_total += best;
  }
  return static_cast<double>(majority_total) /
         static_cast<double>(labels.size());
}

double median_lower(std::vector<double> values) {
  if (values.empty()) throw EmptyInput();
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

SweepReport sweep(const SubspaceDataset& dataset,
                  const std::vector<PrototypeMethod>& methods,
                  const std::vector<int>& center_counts, int trials,
                  const LbgConfig& base_cfg, const SweepHooks& hooks) {
  if (!dataset.class_labels) throw MissingClassLabels();
  if (methods.empty() || center_counts.empty())
    throw Error("sweep needs at least one method and one center count");
  if (trials < 1) throw Error("sweep needs at least one trial");

  SweepReport report;
  report.records.reserve(methods.size() * center_counts.size() *
                         static_cast<std::size_t>(trials));

  for (PrototypeMethod method : methods) {
    const std::uint64_t method_tag = fnv1a64(to_string(method));
    for (int centers : center_counts) {
      std::vector<double> cell_purities, cell_distortions;
      for (int trial = 0; trial < trials; ++trial) {
        LbgConfig cfg = base_cfg;
        cfg.prototype_method = method;
        cfg.num_centers = centers;
        cfg.seed = derive_seed(base_cfg.seed, method_tag,
                               static_cast<std::uint64_t>(centers),
                               static_cast<std::uint64_t>(trial));

        const auto start = std::chrono::steady_clock::now();
        ClusterModel model = lbg_cluster(dataset, cfg);
        const std::chrono::duration<double> elapsed =
            std::chrono::steady_clock::now() - start;

        SweepRecord record;
        record.method = method;
        record.num_centers = centers;
        record.trial = trial;
        record.seed = cfg.seed;
        record.purity = purity(model.labels, *dataset.class_labels);
        record.distortion = model.distortion_history.back();
        record.iters = model.iterations_used;
        record.seconds = elapsed.count();

        cell_purities.push_back(record.purity);
        cell_distortions.push_back(record.distortion);
        report.records.push_back(record);
        if (hooks.on_record) hooks.on_record(record);
        if (hooks.on_model) hooks.on_model(model, record);
      }
      report.medians.push_back({method, centers, median_lower(cell_purities),
                                median_lower(cell_distortions)});
    }
  }
  return report;
}

void write_sweep_records_csv(std::ostream& out, const SweepReport& report) {
  out << "method,num_centers,trial,seed,purity,distortion,iters,seconds\n";
  for (const SweepRecord& r : report.records)
    out << to_string(r.method) << ',' << r.num_centers << ',' << r.trial << ','
        << r.seed << ',' << format_double(r.purity) << ','
        << format_double(r.distortion) << ',' << r.iters << ','
        << format_double(r.seconds) << '\n';
}

void write_sweep_medians_csv(std::ostream& out, const SweepReport& report) {
  out << "method,num_centers,median_purity,median_distortion\n";
  for (const SweepCellMedian& m : report.medians)
    out << to_string(m.method) << ',' << m.num_centers << ','
        << format_double(m.median_purity) << ','
        << format_double(m.median_distortion) << '\n';
}

void write_sweep_records_csv(const std::string& path,
                             const SweepReport& report) {
  std::ofstream out = open_output(path);
  write_sweep_records_csv(out, report);
  if (!out) throw Error("write failed: " + path);
}

void write_sweep_medians_csv(const std::string& path,
                             const SweepReport& report) {
  std::ofstream out = open_output(path);
  write_sweep_medians_csv(out, report);
  if (!out) throw Error("write failed: " + path);
}

}  // namespace subclust
