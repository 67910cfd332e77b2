// subclust: generate or ingest subspace datasets, cluster them, and run
// center-count sweeps. Every command writes a .manifest.json next to its
// outputs; rerunning the recorded command line reproduces them bit-for-bit.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "subclust/data.hpp"
#include "subclust/lbg.hpp"
#include "subclust/metrics.hpp"
#include "subclust/parallel.hpp"

namespace {

constexpr const char* kArtifactVersion = "0.1.0";

using ordered_json = nlohmann::ordered_json;

// Command-line misuse distinct from pipeline failure: exits 2, not 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

std::string join_command_line(int argc, char** argv) {
  std::string joined;
  for (int i = 0; i < argc; ++i) {
    if (i) joined += ' ';
    joined += argv[i];
  }
  return joined;
}

long parse_long_token(const std::string& token, const std::string& what) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const long value = std::strtol(begin, &end, 10);
  if (end == begin || end != begin + token.size())
    throw UsageError("bad " + what + ": '" + token + "'");
  return value;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) {
      tokens.push_back(text.substr(start));
      return tokens;
    }
    tokens.push_back(text.substr(start, comma - start));
    start = comma + 1;
  }
}

// "3,5,7" and "2..15" freely mixed: "2..4,10" -> {2,3,4,10}.
std::vector<int> parse_center_list(const std::string& text) {
  std::vector<int> centers;
  for (const std::string& token : split_commas(text)) {
    const std::size_t dots = token.find("..");
    if (dots != std::string::npos) {
      const long lo = parse_long_token(token.substr(0, dots), "center range");
      const long hi = parse_long_token(token.substr(dots + 2), "center range");
      if (lo < 1 || hi < lo)
        throw UsageError("bad center range: '" + token + "'");
      for (long c = lo; c <= hi; ++c) centers.push_back(static_cast<int>(c));
    } else {
      const long c = parse_long_token(token, "center count");
      if (c < 1) throw UsageError("center counts must be >= 1");
      centers.push_back(static_cast<int>(c));
    }
  }
  return centers;
}

std::vector<subclust::PrototypeMethod> parse_method_list(
    const std::string& text) {
  std::vector<subclust::PrototypeMethod> methods;
  for (const std::string& token : split_commas(text)) {
    const auto method = subclust::parse_prototype_method(token);
    if (!method)
      throw UsageError("unknown method '" + token +
                       "' (expected svbf, flagmean, or flagmedian)");
    methods.push_back(*method);
  }
  return methods;
}

std::vector<int> parse_class_list(const std::string& text) {
  std::vector<int> classes;
  for (const std::string& token : split_commas(text)) {
    const long c = parse_long_token(token, "class");
    if (c < 0) throw UsageError("classes must be non-negative");
    classes.push_back(static_cast<int>(c));
  }
  return classes;
}

subclust::InitStrategy parse_init(const std::string& name) {
  if (name == "sample") return subclust::InitStrategy::SampleSeeded;
  if (name == "random") return subclust::InitStrategy::RandomOrthonormal;
  throw UsageError("unknown init '" + name + "' (expected sample or random)");
}

void write_manifest(const std::string& path, const std::string& command_line,
                    std::uint64_t seed, ordered_json config,
                    const std::vector<std::string>& outputs) {
  ordered_json manifest;
  manifest["command_line"] = command_line;
  manifest["artifact_version"] = kArtifactVersion;
  manifest["seed"] = seed;
  manifest["config"] = std::move(config);
  manifest["outputs"] = outputs;

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw subclust::Error("cannot open " + path + " for writing");
  out << manifest.dump(2) << '\n';
  if (!out) throw subclust::Error("write failed: " + path);
}

void log_class_counts(const subclust::SubspaceDataset& dataset,
                      const std::vector<std::string>& warnings) {
  std::map<int, std::size_t> counts;
  if (dataset.class_labels)
    for (int cls : *dataset.class_labels) ++counts[cls];
  for (const auto& [cls, count] : counts)
    std::cerr << "class " << cls << ": " << count << " subspace samples\n";
  for (const std::string& warning : warnings)
    std::cerr << "warning: " << warning << '\n';
}

struct GenerateArgs {
  subclust::SynthSpec spec;
  std::string out;
};

int run_generate(const GenerateArgs& args, const std::string& command_line) {
  if (args.spec.sample_dim >= args.spec.ambient_dim)
    throw UsageError("sample dim must be < ambient");

  subclust::SubspaceDataset dataset = subclust::synth_generate(args.spec);
  subclust::save_dataset(dataset, args.out);

  ordered_json config;
  config["prototypes"] = args.spec.num_prototypes;
  config["per_group"] = args.spec.samples_per_prototype;
  config["ambient"] = args.spec.ambient_dim;
  config["dim"] = args.spec.sample_dim;
  config["noise"] = args.spec.noise_level;
  config["seed"] = args.spec.seed;
  write_manifest(args.out + ".manifest.json", command_line, args.spec.seed,
                 std::move(config), {args.out});

  std::cerr << "wrote " << dataset.size() << " samples to " << args.out << '\n';
  return 0;
}

struct IngestMnistArgs {
  std::string images, labels, classes_text = "", out;
  Eigen::Index group = 10;
  std::uint64_t seed = 0;
};

int run_ingest_mnist(const IngestMnistArgs& args,
                     const std::string& command_line) {
  const std::vector<int> keep =
      args.classes_text.empty() ? std::vector<int>{}
                                : parse_class_list(args.classes_text);

  subclust::IdxImages idx = subclust::load_idx_images(args.images, args.labels);
  std::vector<std::string> warnings;
  subclust::SubspaceDataset dataset = subclust::group_into_subspaces(
      idx.pixels, idx.labels, args.group, keep, args.seed, &warnings);
  dataset.name = std::filesystem::path(args.out).stem().string();
  log_class_counts(dataset, warnings);
  subclust::save_dataset(dataset, args.out);

  ordered_json config;
  config["images"] = args.images;
  config["labels"] = args.labels;
  config["classes"] = keep;
  config["group"] = args.group;
  config["seed"] = args.seed;
  write_manifest(args.out + ".manifest.json", command_line, args.seed,
                 std::move(config), {args.out});
  return 0;
}

struct IngestCsvArgs {
  std::string in, out;
  Eigen::Index group = 10;
  std::uint64_t seed = 0;
};

int run_ingest_csv(const IngestCsvArgs& args, const std::string& command_line) {
  subclust::MatrixDataset matrix = subclust::load_matrix_dataset(args.in);
  std::vector<std::string> warnings;
  subclust::SubspaceDataset dataset = subclust::group_into_subspaces(
      matrix.features, matrix.classes, args.group, {}, args.seed, &warnings);
  dataset.name = std::filesystem::path(args.out).stem().string();
  log_class_counts(dataset, warnings);
  subclust::save_dataset(dataset, args.out);

  ordered_json config;
  config["in"] = args.in;
  config["group"] = args.group;
  config["seed"] = args.seed;
  write_manifest(args.out + ".manifest.json", command_line, args.seed,
                 std::move(config), {args.out});
  return 0;
}

struct ClusterArgs {
  std::string data, method = "svbf", init = "sample", out_prefix;
  subclust::LbgConfig cfg;
};

int run_cluster(const ClusterArgs& args, const std::string& command_line) {
  subclust::LbgConfig cfg = args.cfg;
  const auto method = subclust::parse_prototype_method(args.method);
  if (!method)
    throw UsageError("unknown method '" + args.method +
                     "' (expected svbf, flagmean, or flagmedian)");
  cfg.prototype_method = *method;
  cfg.init_strategy = parse_init(args.init);

  subclust::SubspaceDataset dataset = subclust::load_dataset(args.data);
  subclust::ClusterModel model = subclust::lbg_cluster(dataset, cfg);

  const std::string labels_path = args.out_prefix + ".labels.csv";
  {
    std::ofstream out(labels_path, std::ios::trunc);
    if (!out) throw subclust::Error("cannot open " + labels_path);
    out << "sample_index,label,class,distance\n";
    for (std::size_t j = 0; j < dataset.size(); ++j) {
      const double distance = subclust::sin2_theta1(
          model.prototypes[static_cast<std::size_t>(model.labels[j])],
          dataset.samples[j]);
      out << j << ',' << model.labels[j] << ',';
      if (dataset.class_labels) out << (*dataset.class_labels)[j];
      out << ',' << format_double(distance) << '\n';
    }
  }

  const std::string prototypes_path = args.out_prefix + ".prototypes.subds";
  subclust::SubspaceDataset prototype_set;
  prototype_set.samples = model.prototypes;
  prototype_set.name = "prototypes";
  subclust::save_dataset(prototype_set, prototypes_path);

  const std::string history_path = args.out_prefix + ".history.csv";
  {
    std::ofstream out(history_path, std::ios::trunc);
    if (!out) throw subclust::Error("cannot open " + history_path);
    out << "iter,distortion\n";
    for (std::size_t i = 0; i < model.distortion_history.size(); ++i)
      out << i << ',' << format_double(model.distortion_history[i]) << '\n';
  }

  ordered_json config;
  config["data"] = args.data;
  config["method"] = subclust::to_string(cfg.prototype_method);
  config["centers"] = cfg.num_centers;
  config["proto_dim"] = cfg.prototype_dim;
  config["iters"] = cfg.max_outer_iters;
  config["tol"] = cfg.distortion_rel_tol;
  config["init"] = args.init;
  config["seed"] = cfg.seed;
  write_manifest(args.out_prefix + ".manifest.json", command_line, cfg.seed,
                 std::move(config),
                 {labels_path, prototypes_path, history_path});

  std::cout << "final distortion: "
            << format_double(model.distortion_history.back()) << '\n';
  if (dataset.class_labels)
    std::cout << "purity: "
              << format_double(
                     subclust::purity(model.labels, *dataset.class_labels))
              << '\n';
  return 0;
}

struct SweepArgs {
  std::string data, methods_text = "svbf,flagmean,flagmedian";
  std::string centers_text, init = "sample", out_prefix;
  int trials = 5;
  subclust::LbgConfig cfg;
};

int run_sweep(const SweepArgs& args, const std::string& command_line) {
  const std::vector<subclust::PrototypeMethod> methods =
      parse_method_list(args.methods_text);
  const std::vector<int> centers = parse_center_list(args.centers_text);
  subclust::LbgConfig cfg = args.cfg;
  cfg.init_strategy = parse_init(args.init);

  subclust::SubspaceDataset dataset = subclust::load_dataset(args.data);

  const std::string records_path = args.out_prefix + ".records.csv";
  const std::string medians_path = args.out_prefix + ".medians.csv";
  const std::string partial_path = records_path + ".partial";

  // Completed runs stream to the .partial file so a failing sweep still
  // leaves its finished records behind; success replaces it with the final
  // pair of CSVs.
  std::ofstream partial(partial_path, std::ios::trunc);
  if (!partial) throw subclust::Error("cannot open " + partial_path);
  partial << "method,num_centers,trial,seed,purity,distortion,iters,seconds\n";
  partial.flush();

  subclust::SweepHooks hooks;
  hooks.on_record = [&partial](const subclust::SweepRecord& r) {
    partial << subclust::to_string(r.method) << ',' << r.num_centers << ','
            << r.trial << ',' << r.seed << ',' << format_double(r.purity)
            << ',' << format_double(r.distortion) << ',' << r.iters << ','
            << format_double(r.seconds) << '\n';
    partial.flush();
  };

  subclust::SweepReport report =
      subclust::sweep(dataset, methods, centers, args.trials, cfg, hooks);

  subclust::write_sweep_records_csv(records_path, report);
  subclust::write_sweep_medians_csv(medians_path, report);
  partial.close();
  std::filesystem::remove(partial_path);

  ordered_json config;
  config["data"] = args.data;
  ordered_json method_names = ordered_json::array();
  for (subclust::PrototypeMethod m : methods)
    method_names.push_back(subclust::to_string(m));
  config["methods"] = std::move(method_names);
  config["centers"] = centers;
  config["trials"] = args.trials;
  config["iters"] = cfg.max_outer_iters;
  config["proto_dim"] = cfg.prototype_dim;
  config["tol"] = cfg.distortion_rel_tol;
  config["init"] = args.init;
  config["seed"] = cfg.seed;
  write_manifest(args.out_prefix + ".manifest.json", command_line, cfg.seed,
                 std::move(config), {records_path, medians_path});

  std::cerr << "wrote " << report.records.size() << " records to "
            << records_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string command_line = join_command_line(argc, argv);

  CLI::App app{"LBG clustering of subspace data with trainable first-angle "
               "prototypes"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads,
                 "worker thread cap (0 = logical cores)")
      ->envname("SUBCLUST_THREADS")
      ->check(CLI::NonNegativeNumber);

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand(
      "generate", "write a synthetic subspace dataset (SUBDS1)");
  generate->add_option("--prototypes", gen.spec.num_prototypes,
                       "number of generator lines")
      ->check(CLI::PositiveNumber);
  generate->add_option("--per-group", gen.spec.samples_per_prototype,
                       "samples per generator line")
      ->check(CLI::PositiveNumber);
  generate->add_option("--ambient", gen.spec.ambient_dim, "ambient dimension")
      ->check(CLI::PositiveNumber);
  generate->add_option("--dim", gen.spec.sample_dim, "sample subspace dimension")
      ->check(CLI::PositiveNumber);
  generate->add_option("--noise", gen.spec.noise_level,
                       "Gaussian perturbation level")
      ->check(CLI::NonNegativeNumber);
  generate->add_option("--seed", gen.spec.seed, "generator seed");
  generate->add_option("--out", gen.out, "output dataset path")->required();

  CLI::App* ingest = app.add_subcommand("ingest", "convert external data");
  ingest->require_subcommand(1);

  IngestMnistArgs mnist;
  CLI::App* ingest_mnist =
      ingest->add_subcommand("mnist", "group IDX images into subspaces");
  ingest_mnist->add_option("--images", mnist.images, "IDX image file")
      ->required();
  ingest_mnist->add_option("--labels", mnist.labels, "IDX label file")
      ->required();
  ingest_mnist->add_option("--classes", mnist.classes_text,
                           "comma list of digits to keep (default: all)");
  ingest_mnist->add_option("--group", mnist.group, "vectors per subspace")
      ->check(CLI::PositiveNumber);
  ingest_mnist->add_option("--seed", mnist.seed, "grouping shuffle seed");
  ingest_mnist->add_option("--out", mnist.out, "output dataset path")
      ->required();

  IngestCsvArgs csv;
  CLI::App* ingest_csv =
      ingest->add_subcommand("csv", "group labeled CSV vectors into subspaces");
  ingest_csv->add_option("--in", csv.in, "input CSV (class,f0,f1,...)")
      ->required();
  ingest_csv->add_option("--group", csv.group, "vectors per subspace")
      ->check(CLI::PositiveNumber);
  ingest_csv->add_option("--seed", csv.seed, "grouping shuffle seed");
  ingest_csv->add_option("--out", csv.out, "output dataset path")->required();

  ClusterArgs cluster;
  CLI::App* cluster_cmd =
      app.add_subcommand("cluster", "run one LBG clustering");
  cluster_cmd->add_option("--data", cluster.data, "SUBDS1 dataset")->required();
  cluster_cmd->add_option("--method", cluster.method,
                          "svbf | flagmean | flagmedian");
  cluster_cmd->add_option("--centers", cluster.cfg.num_centers,
                          "number of prototypes")
      ->check(CLI::PositiveNumber);
  cluster_cmd->add_option("--proto-dim", cluster.cfg.prototype_dim,
                          "prototype dimension k")
      ->check(CLI::PositiveNumber);
  cluster_cmd->add_option("--iters", cluster.cfg.max_outer_iters,
                          "outer iteration cap")
      ->check(CLI::PositiveNumber);
  cluster_cmd->add_option("--tol", cluster.cfg.distortion_rel_tol,
                          "relative distortion stopping tolerance")
      ->check(CLI::NonNegativeNumber);
  cluster_cmd->add_option("--init", cluster.init, "sample | random");
  cluster_cmd->add_option("--seed", cluster.cfg.seed, "clustering seed");
  cluster_cmd->add_option("--out-prefix", cluster.out_prefix,
                          "prefix for output files")
      ->required();

  SweepArgs sweep_args;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "multi-trial center-count sweep");
  sweep_cmd->add_option("--data", sweep_args.data, "SUBDS1 dataset")
      ->required();
  sweep_cmd->add_option("--methods", sweep_args.methods_text,
                        "comma list of methods");
  sweep_cmd->add_option("--centers", sweep_args.centers_text,
                        "center counts: comma list and/or a..b ranges")
      ->required();
  sweep_cmd->add_option("--trials", sweep_args.trials, "trials per cell")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--iters", sweep_args.cfg.max_outer_iters,
                        "outer iteration cap")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--proto-dim", sweep_args.cfg.prototype_dim,
                        "prototype dimension k")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--tol", sweep_args.cfg.distortion_rel_tol,
                        "relative distortion stopping tolerance")
      ->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--init", sweep_args.init, "sample | random");
  sweep_cmd->add_option("--seed", sweep_args.cfg.seed, "base sweep seed");
  sweep_cmd->add_option("--out-prefix", sweep_args.out_prefix,
                        "prefix for output files")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    subclust::set_max_threads(threads);
    if (generate->parsed()) return run_generate(gen, command_line);
    if (ingest_mnist->parsed()) return run_ingest_mnist(mnist, command_line);
    if (ingest_csv->parsed()) return run_ingest_csv(csv, command_line);
    if (cluster_cmd->parsed()) return run_cluster(cluster, command_line);
    if (sweep_cmd->parsed()) return run_sweep(sweep_args, command_line);
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
