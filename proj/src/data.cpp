#include "subclust/data.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "subclust/parallel.hpp"
#include "subclust/random.hpp"

static_assert(std::endian::native == std::endian::little,
              "SUBDS1 i/o assumes a little-endian host");

namespace subclust {

namespace {

// Stream tags so the generator's independent random draws never alias.
constexpr std::uint64_t kLineTag = 0x6c696e6573ULL;      // prototype lines
constexpr std::uint64_t kSampleTag = 0x73616d706cULL;    // per-sample stream
constexpr std::uint64_t kGroupTag = 0x67726f7570ULL;     // per-class shuffle

std::ifstream open_input(const std::string& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw Error("cannot open " + path);
  return in;
}

void read_exact(std::ifstream& in, char* out, std::streamsize bytes,
                const std::string& path) {
  in.read(out, bytes);
  if (in.gcount() != bytes) throw TruncatedFile(path);
}

std::uint32_t read_be_u32(std::ifstream& in, const std::string& path) {
  unsigned char b[4];
  read_exact(in, reinterpret_cast<char*>(b), 4, path);
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

std::uint64_t read_u64(std::ifstream& in, const std::string& path) {
  std::uint64_t v;
  read_exact(in, reinterpret_cast<char*>(&v), sizeof v, path);
  return v;
}

std::int64_t read_i64(std::ifstream& in, const std::string& path) {
  std::int64_t v;
  read_exact(in, reinterpret_cast<char*>(&v), sizeof v, path);
  return v;
}

void write_u64(std::ofstream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_i64(std::ofstream& out, std::int64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

double parse_double_token(const std::string& token, std::size_t line) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || end != begin + token.size())
    throw ParseError(line, "not a number: '" + token + "'");
  return value;
}

int parse_class_token(const std::string& token, std::size_t line) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const long value = std::strtol(begin, &end, 10);
  if (end == begin || end != begin + token.size() || value < 0)
    throw ParseError(line, "class must be a non-negative integer, got '" +
                               token + "'");
  return static_cast<int>(value);
}

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

SubspaceDataset synth_generate(const SynthSpec& spec,
                               std::vector<Subspace>* generator_lines) {
  const Eigen::Index n = spec.ambient_dim;
  const Eigen::Index l = spec.sample_dim;
  if (spec.num_prototypes < 1 || spec.samples_per_prototype < 1)
    throw Error("synthetic spec needs at least one prototype and one sample");
  if (l < 1 || l >= n) throw DimensionTooLarge(l, n);
  if (spec.noise_level < 0.0) throw Error("noise_level must be >= 0");

  std::vector<Eigen::VectorXd> lines(spec.num_prototypes);
  {
    std::mt19937_64 rng(derive_seed(spec.seed, kLineTag));
    for (auto& w : lines) w = gaussian_vector(n, rng).normalized();
  }
  if (generator_lines) {
    generator_lines->clear();
    for (const auto& w : lines) generator_lines->emplace_back(Eigen::MatrixXd(w));
  }

  SubspaceDataset dataset;
  dataset.name = "synth";
  dataset.class_labels.emplace();
  dataset.samples.reserve(
      static_cast<std::size_t>(spec.num_prototypes) * spec.samples_per_prototype);

  for (int g = 0; g < spec.num_prototypes; ++g) {
    for (int j = 0; j < spec.samples_per_prototype; ++j) {
      std::mt19937_64 rng(derive_seed(spec.seed, kSampleTag,
                                      static_cast<std::uint64_t>(g),
                                      static_cast<std::uint64_t>(j)));
      // Rank deficiency of a Gaussian draw has probability zero, but a retry
      // keeps generation total; each retry consumes fresh randomness.
      for (int attempt = 0;; ++attempt) {
        Eigen::VectorXd u = lines[g];
        if (spec.noise_level > 0.0)
          u += spec.noise_level * gaussian_vector(n, rng);
        u.normalize();

        Eigen::MatrixXd raw(n, l);
        raw.col(0) = u;
        if (l > 1) raw.rightCols(l - 1) = gaussian_matrix(n, l - 1, rng);
        try {
          dataset.samples.push_back(orthonormalize(raw));
          break;
        } catch (const RankDeficient&) {
          if (attempt >= 4) throw;
        }
      }
      dataset.class_labels->push_back(g);
    }
  }
  return dataset;
}

IdxImages load_idx_images(const std::string& images_path,
                          const std::string& labels_path) {
  std::ifstream img = open_input(images_path, std::ios::binary);
  if (read_be_u32(img, images_path) != 0x00000803u) throw BadMagic(images_path);
  const std::uint32_t count = read_be_u32(img, images_path);
  const std::uint32_t rows = read_be_u32(img, images_path);
  const std::uint32_t cols = read_be_u32(img, images_path);

  std::ifstream lab = open_input(labels_path, std::ios::binary);
  if (read_be_u32(lab, labels_path) != 0x00000801u) throw BadMagic(labels_path);
  const std::uint32_t label_count = read_be_u32(lab, labels_path);
  if (count != label_count) throw CountMismatch(count, label_count);

  const std::size_t pixel_count = std::size_t(count) * rows * cols;
  std::vector<unsigned char> bytes(pixel_count);
  if (pixel_count > 0)
    read_exact(img, reinterpret_cast<char*>(bytes.data()),
               static_cast<std::streamsize>(pixel_count), images_path);

  IdxImages out;
  out.pixels.resize(count, std::size_t(rows) * cols);
  for (std::uint32_t i = 0; i < count; ++i)
    for (std::uint32_t p = 0; p < rows * cols; ++p)
      out.pixels(i, p) = bytes[std::size_t(i) * rows * cols + p] / 255.0;

  std::vector<unsigned char> label_bytes(count);
  if (count > 0)
    read_exact(lab, reinterpret_cast<char*>(label_bytes.data()), count,
               labels_path);
  out.labels.assign(label_bytes.begin(), label_bytes.end());
  return out;
}

SubspaceDataset group_into_subspaces(const Eigen::MatrixXd& vectors,
                                     const std::vector<int>& classes,
                                     Eigen::Index group_size,
                                     const std::vector<int>& keep_classes,
                                     std::uint64_t seed,
                                     std::vector<std::string>* warnings) {
  const std::size_t count = static_cast<std::size_t>(vectors.rows());
  if (classes.size() != count) throw LengthMismatch(count, classes.size());
  if (group_size < 1 || group_size > vectors.cols())
    throw DimensionTooLarge(group_size, vectors.cols());

  std::vector<int> kept = keep_classes;
  if (kept.empty()) {
    kept = classes;
  }
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < count; ++i)
    if (std::binary_search(kept.begin(), kept.end(), classes[i]))
      by_class[classes[i]].push_back(i);

  // Groups are fixed up front so orthonormalization can run in parallel
  // while the output order (class ascending, group ascending) stays stable.
  struct Group {
    int cls;
    int index_in_class;
    std::vector<std::size_t> rows;
  };
  std::vector<Group> groups;
  for (int cls : kept) {
    auto it = by_class.find(cls);
    const std::size_t available = it == by_class.end() ? 0 : it->second.size();
    if (available < static_cast<std::size_t>(group_size))
      throw ClassTooSmall(cls, available, group_size);

    std::vector<std::size_t>& rows = it->second;
    std::mt19937_64 rng(derive_seed(seed, kGroupTag,
                                    static_cast<std::uint64_t>(
                                        static_cast<std::int64_t>(cls))));
    partial_shuffle(rows, rows.size(), rng);

    const std::size_t full = available / static_cast<std::size_t>(group_size);
    for (std::size_t g = 0; g < full; ++g)
      groups.push_back(
          {cls, static_cast<int>(g),
           {rows.begin() + static_cast<std::ptrdiff_t>(g * group_size),
            rows.begin() + static_cast<std::ptrdiff_t>((g + 1) * group_size)}});
  }

  std::vector<std::optional<Subspace>> built(groups.size());
  std::vector<std::string> dropped(groups.size());
  parallel_for(0, groups.size(), [&](std::size_t gi) {
    const Group& group = groups[gi];
    Eigen::MatrixXd raw(vectors.cols(), group_size);
    for (Eigen::Index c = 0; c < group_size; ++c)
      raw.col(c) = vectors.row(group.rows[static_cast<std::size_t>(c)]).transpose();
    try {
      built[gi] = orthonormalize(raw);
    } catch (const RankDeficient& e) {
      dropped[gi] = "class " + std::to_string(group.cls) + " group " +
                    std::to_string(group.index_in_class) +
                    " dropped: " + e.what();
    }
  });

  SubspaceDataset dataset;
  dataset.class_labels.emplace();
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    if (built[gi]) {
      dataset.samples.push_back(std::move(*built[gi]));
      dataset.class_labels->push_back(groups[gi].cls);
    } else if (warnings) {
      warnings->push_back(dropped[gi]);
    }
  }
  return dataset;
}

MatrixDataset load_matrix_dataset(const std::string& path) {
  std::ifstream in = open_input(path, std::ios::in);

  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header row");
  const std::vector<std::string> header = split_csv_line(std::move(line));
  if (header.empty() || header[0] != "class")
    throw ParseError(1, "header must start with 'class'");
  const std::size_t width = header.size() - 1;
  if (width == 0) throw ParseError(1, "header declares no features");

  std::vector<std::vector<double>> rows;
  std::vector<int> classes;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(std::move(line));
    if (fields.size() != width + 1)
      throw InconsistentWidth(line_no, fields.size() - 1, width);
    classes.push_back(parse_class_token(fields[0], line_no));
    std::vector<double> row(width);
    for (std::size_t f = 0; f < width; ++f)
      row[f] = parse_double_token(fields[f + 1], line_no);
    rows.push_back(std::move(row));
  }

  MatrixDataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t f = 0; f < width; ++f)
      out.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)) =
          rows[r][f];
  out.classes = std::move(classes);
  return out;
}

void save_dataset(const SubspaceDataset& dataset, const std::string& path) {
  const bool labeled = dataset.class_labels.has_value();
  if (labeled && dataset.class_labels->size() != dataset.samples.size())
    throw LengthMismatch(dataset.samples.size(), dataset.class_labels->size());
  const Eigen::Index n = dataset.ambient_dim();
  for (const Subspace& s : dataset.samples)
    if (s.ambient_dim() != n) throw AmbientMismatch(n, s.ambient_dim());

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path + " for writing");

  out.write("SUBDS1", 6);
  const char flags = labeled ? 1 : 0;
  out.write(&flags, 1);
  write_u64(out, static_cast<std::uint64_t>(n));
  write_u64(out, dataset.samples.size());
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    const Eigen::MatrixXd& basis = dataset.samples[i].basis();
    write_u64(out, static_cast<std::uint64_t>(basis.cols()));
    if (labeled) write_i64(out, (*dataset.class_labels)[i]);
    out.write(reinterpret_cast<const char*>(basis.data()),
              static_cast<std::streamsize>(sizeof(double)) * basis.size());
  }
  if (!out) throw Error("write failed: " + path);
}

SubspaceDataset load_dataset(const std::string& path) {
  std::ifstream in = open_input(path, std::ios::binary);

  char magic[6];
  read_exact(in, magic, 6, path);
  if (std::memcmp(magic, "SUBDS1", 6) != 0) throw BadMagic(path);
  char flags;
  read_exact(in, &flags, 1, path);
  if (flags != 0 && flags != 1) throw BadMagic(path + ": unknown flags");

  const std::uint64_t n = read_u64(in, path);
  const std::uint64_t count = read_u64(in, path);

  SubspaceDataset dataset;
  dataset.name = std::filesystem::path(path).stem().string();
  if (flags & 1) dataset.class_labels.emplace();
  dataset.samples.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t l = read_u64(in, path);
    if (l < 1 || l > n)
      throw Error(path + ": sample dimension " + std::to_string(l) +
                  " outside [1, " + std::to_string(n) + "]");
    if (flags & 1)
      dataset.class_labels->push_back(static_cast<int>(read_i64(in, path)));
    Eigen::MatrixXd basis(static_cast<Eigen::Index>(n),
                          static_cast<Eigen::Index>(l));
    read_exact(in, reinterpret_cast<char*>(basis.data()),
               static_cast<std::streamsize>(sizeof(double)) * basis.size(),
               path);
    Subspace sample(std::move(basis));
    if (sample.orthonormality_error() > 1e-8)
      throw Error(path + ": stored basis is not orthonormal");
    dataset.samples.push_back(std::move(sample));
  }
  return dataset;
}

}  // namespace subclust
