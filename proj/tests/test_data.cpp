#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "subclust/data.hpp"
#include "subclust/random.hpp"

using namespace subclust;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "subclust_test_data";
  fs::create_directories(dir);
  return dir;
}

std::string scratch(const std::string& leaf) {
  return (scratch_dir() / leaf).string();
}

void write_bytes(const std::string& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

void push_be_u32(std::vector<unsigned char>& bytes, std::uint32_t v) {
  bytes.push_back(static_cast<unsigned char>(v >> 24));
  bytes.push_back(static_cast<unsigned char>(v >> 16));
  bytes.push_back(static_cast<unsigned char>(v >> 8));
  bytes.push_back(static_cast<unsigned char>(v));
}

void push_le_u64(std::vector<unsigned char>& bytes, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void push_le_f64(std::vector<unsigned char>& bytes, double v) {
  unsigned char raw[8];
  std::memcpy(raw, &v, 8);
  bytes.insert(bytes.end(), raw, raw + 8);
}

// A count-image 4x3 IDX pair with fully controlled pixel bytes.
struct IdxFixture {
  std::string images;
  std::string labels;
  std::vector<unsigned char> pixel_bytes;

  explicit IdxFixture(std::uint32_t count = 2)
      : images(scratch("fixture" + std::to_string(count) + ".images.idx")),
        labels(scratch("fixture" + std::to_string(count) + ".labels.idx")) {
    std::vector<unsigned char> img;
    push_be_u32(img, 0x00000803u);
    push_be_u32(img, count);
    push_be_u32(img, 4);
    push_be_u32(img, 3);
    std::mt19937_64 rng(99);
    for (std::uint32_t i = 0; i < count * 12; ++i)
      pixel_bytes.push_back(static_cast<unsigned char>(rng() % 256));
    img.insert(img.end(), pixel_bytes.begin(), pixel_bytes.end());
    write_bytes(images, img);

    std::vector<unsigned char> lab;
    push_be_u32(lab, 0x00000801u);
    push_be_u32(lab, count);
    for (std::uint32_t i = 0; i < count; ++i)
      lab.push_back(static_cast<unsigned char>(3 + 4 * i));
    write_bytes(labels, lab);
  }
};

}  // namespace

TEST_CASE("synthetic generator emits the configured group structure") {
  SynthSpec spec;
  spec.seed = 60;
  const SubspaceDataset dataset = synth_generate(spec);
  REQUIRE(dataset.size() == 50);
  REQUIRE(dataset.class_labels.has_value());
  REQUIRE(dataset.class_labels->size() == 50);
  for (std::size_t j = 0; j < dataset.size(); ++j) {
    CHECK(dataset.samples[j].ambient_dim() == 25);
    CHECK(dataset.samples[j].dim() == 10);
    CHECK(dataset.samples[j].orthonormality_error() < 1e-10);
    CHECK((*dataset.class_labels)[j] == static_cast<int>(j / 10));
  }
}

TEST_CASE("noiseless samples contain their generator line") {
  SynthSpec spec;
  spec.seed = 61;
  std::vector<Subspace> lines;
  const SubspaceDataset dataset = synth_generate(spec, &lines);
  REQUIRE(lines.size() == 5);
  for (std::size_t j = 0; j < dataset.size(); ++j) {
    const Subspace& line = lines[static_cast<std::size_t>((*dataset.class_labels)[j])];
    CHECK(sin2_theta1(line, dataset.samples[j]) < 1e-12);
    CHECK(principal_angles(line, dataset.samples[j]).front() < 1e-10);
  }
}

TEST_CASE("noise pushes samples off the generator line") {
  SynthSpec spec;
  spec.seed = 62;
  spec.noise_level = 0.5;
  std::vector<Subspace> lines;
  const SubspaceDataset dataset = synth_generate(spec, &lines);
  double total = 0.0;
  for (std::size_t j = 0; j < dataset.size(); ++j)
    total += sin2_theta1(lines[static_cast<std::size_t>((*dataset.class_labels)[j])],
                         dataset.samples[j]);
  CHECK(total > 1e-6);
}

TEST_CASE("the generator is seed-deterministic") {
  SynthSpec spec;
  spec.seed = 63;
  spec.noise_level = 0.1;
  const SubspaceDataset a = synth_generate(spec);
  const SubspaceDataset b = synth_generate(spec);
  spec.seed = 64;
  const SubspaceDataset c = synth_generate(spec);

  REQUIRE(a.size() == b.size());
  double same_diff = 0.0, other_diff = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    same_diff += (a.samples[j].basis() - b.samples[j].basis()).cwiseAbs().maxCoeff();
    other_diff += (a.samples[j].basis() - c.samples[j].basis()).cwiseAbs().maxCoeff();
  }
  CHECK(same_diff == 0.0);
  CHECK(other_diff > 1e-6);
}

TEST_CASE("generator rejects sample dim at or above ambient dim") {
  SynthSpec spec;
  spec.ambient_dim = 10;
  spec.sample_dim = 10;
  CHECK_THROWS_AS(synth_generate(spec), DimensionTooLarge);
  spec.sample_dim = 11;
  CHECK_THROWS_AS(synth_generate(spec), DimensionTooLarge);
}

TEST_CASE("idx loader scales bytes into [0,1] exactly") {
  const IdxFixture fx;
  const IdxImages images = load_idx_images(fx.images, fx.labels);
  REQUIRE(images.pixels.rows() == 2);
  REQUIRE(images.pixels.cols() == 12);
  CHECK(images.labels == std::vector<int>{3, 7});
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index p = 0; p < 12; ++p)
      CHECK(images.pixels(i, p) ==
            fx.pixel_bytes[static_cast<std::size_t>(i * 12 + p)] / 255.0);
}

TEST_CASE("idx loader rejects bad magic numbers") {
  const IdxFixture fx;
  std::vector<unsigned char> bogus;
  push_be_u32(bogus, 0x00000802u);
  push_be_u32(bogus, 2);
  push_be_u32(bogus, 4);
  push_be_u32(bogus, 3);
  const std::string bad = scratch("bad_magic.idx");
  write_bytes(bad, bogus);
  CHECK_THROWS_AS(load_idx_images(bad, fx.labels), BadMagic);
  CHECK_THROWS_AS(load_idx_images(fx.images, fx.images), BadMagic);
}

TEST_CASE("idx loader detects truncated pixel data") {
  const IdxFixture fx;
  std::vector<unsigned char> img;
  push_be_u32(img, 0x00000803u);
  push_be_u32(img, 2);
  push_be_u32(img, 4);
  push_be_u32(img, 3);
  img.insert(img.end(), 23, 0);  // one byte short of 2*12
  const std::string truncated = scratch("truncated.idx");
  write_bytes(truncated, img);
  CHECK_THROWS_AS(load_idx_images(truncated, fx.labels), TruncatedFile);
}

TEST_CASE("idx loader rejects mismatched image and label counts") {
  const IdxFixture two(2);
  const IdxFixture three(3);
  CHECK_THROWS_AS(load_idx_images(two.images, three.labels), CountMismatch);
}

TEST_CASE("grouping partitions each class and drops the remainder") {
  std::mt19937_64 rng(65);
  const Eigen::MatrixXd vectors = gaussian_matrix(12, 25, rng).transpose();
  const std::vector<int> classes(25, 4);

  std::vector<std::string> warnings;
  const SubspaceDataset dataset =
      group_into_subspaces(vectors, classes, 10, {}, 66, &warnings);
  REQUIRE(dataset.size() == 2);  // 25 rows -> 2 groups of 10, 5 unused
  CHECK(warnings.empty());
  for (const Subspace& s : dataset.samples) {
    CHECK(s.ambient_dim() == 12);
    CHECK(s.dim() == 10);
    CHECK(s.orthonormality_error() < 1e-10);
  }
  CHECK(*dataset.class_labels == std::vector<int>{4, 4});
}

TEST_CASE("grouping keeps only the requested classes in ascending order") {
  std::mt19937_64 rng(67);
  const Eigen::MatrixXd vectors = gaussian_matrix(8, 30, rng).transpose();
  std::vector<int> classes;
  for (int i = 0; i < 30; ++i) classes.push_back(i % 3);  // 10 rows each

  const SubspaceDataset dataset =
      group_into_subspaces(vectors, classes, 4, {2, 0}, 68);
  REQUIRE(dataset.size() == 4);  // two groups per kept class
  CHECK(*dataset.class_labels == std::vector<int>{0, 0, 2, 2});
}

TEST_CASE("grouping rejects classes with fewer rows than one group") {
  std::mt19937_64 rng(69);
  const Eigen::MatrixXd vectors = gaussian_matrix(8, 5, rng).transpose();
  const std::vector<int> classes = {0, 0, 0, 1, 1};
  CHECK_THROWS_AS(group_into_subspaces(vectors, classes, 3, {}, 70),
                  ClassTooSmall);
  // A requested class that never occurs counts as size zero.
  CHECK_THROWS_AS(group_into_subspaces(vectors, classes, 3, {9}, 70),
                  ClassTooSmall);
}

TEST_CASE("grouping drops rank-deficient groups with a warning") {
  std::mt19937_64 rng(71);
  Eigen::MatrixXd vectors = gaussian_matrix(6, 8, rng).transpose();
  const Eigen::RowVectorXd repeated = vectors.row(0);
  for (int i = 1; i < 4; ++i) vectors.row(i) = repeated;  // class 0 is rank 1
  const std::vector<int> classes = {0, 0, 0, 0, 1, 1, 1, 1};

  std::vector<std::string> warnings;
  const SubspaceDataset dataset =
      group_into_subspaces(vectors, classes, 2, {}, 72, &warnings);
  CHECK(dataset.size() == 2);  // only class 1 survives
  CHECK(*dataset.class_labels == std::vector<int>{1, 1});
  REQUIRE(warnings.size() == 2);
  CHECK(warnings[0].find("class 0") != std::string::npos);
}

TEST_CASE("grouping is deterministic in the seed") {
  std::mt19937_64 rng(73);
  const Eigen::MatrixXd vectors = gaussian_matrix(9, 20, rng).transpose();
  std::vector<int> classes;
  for (int i = 0; i < 20; ++i) classes.push_back(i / 10);

  const SubspaceDataset a = group_into_subspaces(vectors, classes, 5, {}, 74);
  const SubspaceDataset b = group_into_subspaces(vectors, classes, 5, {}, 74);
  const SubspaceDataset c = group_into_subspaces(vectors, classes, 5, {}, 75);
  REQUIRE(a.size() == b.size());
  double same_diff = 0.0, other_diff = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    same_diff += (a.samples[j].basis() - b.samples[j].basis()).cwiseAbs().maxCoeff();
    other_diff += (a.samples[j].basis() - c.samples[j].basis()).cwiseAbs().maxCoeff();
  }
  CHECK(same_diff == 0.0);
  CHECK(other_diff > 1e-8);
}

TEST_CASE("csv matrix loader reads labeled feature rows") {
  const std::string path = scratch("features.csv");
  std::ofstream(path) << "class,f0,f1,f2\n"
                         "1,0.5,-2,3e-1\n"
                         "\n"
                         "0,1,2.25,-0.125\n";
  const MatrixDataset data = load_matrix_dataset(path);
  REQUIRE(data.features.rows() == 2);
  REQUIRE(data.features.cols() == 3);
  CHECK(data.classes == std::vector<int>{1, 0});
  CHECK(data.features(0, 0) == 0.5);
  CHECK(data.features(0, 1) == -2.0);
  CHECK(data.features(0, 2) == 0.3);
  CHECK(data.features(1, 2) == -0.125);
}

TEST_CASE("csv matrix loader tolerates CRLF and a header-only file") {
  const std::string path = scratch("crlf.csv");
  std::ofstream(path) << "class,f0,f1\r\n2,1.5,2.5\r\n";
  const MatrixDataset data = load_matrix_dataset(path);
  REQUIRE(data.features.rows() == 1);
  CHECK(data.features(0, 1) == 2.5);

  const std::string empty = scratch("empty.csv");
  std::ofstream(empty) << "class,f0\n";
  const MatrixDataset none = load_matrix_dataset(empty);
  CHECK(none.features.rows() == 0);
  CHECK(none.classes.empty());
}

TEST_CASE("csv matrix loader reports malformed input precisely") {
  const std::string width = scratch("width.csv");
  std::ofstream(width) << "class,f0,f1\n0,1,2\n1,3\n";
  try {
    load_matrix_dataset(width);
    FAIL("expected InconsistentWidth");
  } catch (const InconsistentWidth& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  const std::string token = scratch("token.csv");
  std::ofstream(token) << "class,f0\n0,abc\n";
  CHECK_THROWS_AS(load_matrix_dataset(token), ParseError);

  const std::string cls = scratch("class.csv");
  std::ofstream(cls) << "class,f0\n-1,2.0\n";
  CHECK_THROWS_AS(load_matrix_dataset(cls), ParseError);

  const std::string header = scratch("header.csv");
  std::ofstream(header) << "label,f0\n0,2.0\n";
  CHECK_THROWS_AS(load_matrix_dataset(header), ParseError);
}

TEST_CASE("dataset container round-trips bit-exactly") {
  SynthSpec spec;
  spec.seed = 76;
  spec.noise_level = 0.2;
  SubspaceDataset dataset = synth_generate(spec);
  const std::string path = scratch("roundtrip.subds");

  for (bool labeled : {true, false}) {
    if (!labeled) dataset.class_labels.reset();
    save_dataset(dataset, path);
    const SubspaceDataset loaded = load_dataset(path);
    REQUIRE(loaded.size() == dataset.size());
    CHECK(loaded.class_labels.has_value() == labeled);
    if (labeled) CHECK(*loaded.class_labels == *dataset.class_labels);
    for (std::size_t j = 0; j < dataset.size(); ++j) {
      CHECK(loaded.samples[j].dim() == dataset.samples[j].dim());
      CHECK((loaded.samples[j].basis() - dataset.samples[j].basis())
                .cwiseAbs()
                .maxCoeff() == 0.0);
    }
  }
  CHECK(load_dataset(path).name == "roundtrip");
}

TEST_CASE("dataset container preserves mixed sample dimensions") {
  std::mt19937_64 rng(77);
  SubspaceDataset dataset;
  dataset.samples.push_back(orthonormalize(gaussian_matrix(6, 1, rng)));
  dataset.samples.push_back(orthonormalize(gaussian_matrix(6, 3, rng)));
  const std::string path = scratch("mixed.subds");
  save_dataset(dataset, path);
  const SubspaceDataset loaded = load_dataset(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded.samples[0].dim() == 1);
  CHECK(loaded.samples[1].dim() == 3);
}

TEST_CASE("dataset loader rejects corrupt containers") {
  const std::string magic = scratch("magic.subds");
  write_bytes(magic, {'S', 'U', 'B', 'D', 'S', '2', 0});
  CHECK_THROWS_AS(load_dataset(magic), BadMagic);

  std::vector<unsigned char> truncated = {'S', 'U', 'B', 'D', 'S', '1', 0};
  push_le_u64(truncated, 4);  // ambient dim but no count
  const std::string short_path = scratch("short.subds");
  write_bytes(short_path, truncated);
  CHECK_THROWS_AS(load_dataset(short_path), TruncatedFile);

  // Structurally valid container holding a non-orthonormal basis.
  std::vector<unsigned char> skewed = {'S', 'U', 'B', 'D', 'S', '1', 0};
  push_le_u64(skewed, 2);  // ambient
  push_le_u64(skewed, 1);  // count
  push_le_u64(skewed, 1);  // sample dim
  push_le_f64(skewed, 2.0);
  push_le_f64(skewed, 0.0);
  const std::string bad_basis = scratch("skewed.subds");
  write_bytes(bad_basis, skewed);
  CHECK_THROWS_AS(load_dataset(bad_basis), Error);

  CHECK_THROWS_AS(load_dataset(scratch("does_not_exist.subds")), Error);
}
