#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace subclust {

// Base class for every error raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input matrix does not have the requested numerical rank.
struct RankDeficient : Error {
  RankDeficient(long effective_rank, long wanted)
      : Error("numerical rank " + std::to_string(effective_rank) +
              " is below the requested dimension " + std::to_string(wanted)),
        effective_rank(effective_rank) {}
  long effective_rank;
};

struct AmbientMismatch : Error {
  AmbientMismatch(long a, long b)
      : Error("ambient dimensions differ: " + std::to_string(a) + " vs " +
              std::to_string(b)) {}
};

struct EmptyInput : Error {
  EmptyInput() : Error("sample list is empty") {}
};

struct DimensionTooLarge : Error {
  DimensionTooLarge(long k, long n)
      : Error("prototype dimension " + std::to_string(k) +
              " exceeds ambient dimension " + std::to_string(n)) {}
};

struct TooManyCenters : Error {
  TooManyCenters(long m, long samples)
      : Error("cannot seed " + std::to_string(m) + " centers from " +
              std::to_string(samples) + " samples") {}
};

struct LengthMismatch : Error {
  LengthMismatch(std::size_t a, std::size_t b)
      : Error("vector lengths differ: " + std::to_string(a) + " vs " +
              std::to_string(b)) {}
};

struct MissingClassLabels : Error {
  MissingClassLabels() : Error("dataset has no class labels") {}
};

struct ClassTooSmall : Error {
  ClassTooSmall(int cls, std::size_t count, long group_size)
      : Error("class " + std::to_string(cls) + " has " +
              std::to_string(count) + " vectors, need at least " +
              std::to_string(group_size)) {}
};

// File format errors.
struct BadMagic : Error {
  explicit BadMagic(const std::string& what) : Error("bad magic: " + what) {}
};

struct TruncatedFile : Error {
  explicit TruncatedFile(const std::string& what)
      : Error("truncated file: " + what) {}
};

struct CountMismatch : Error {
  CountMismatch(std::size_t images, std::size_t labels)
      : Error("image count " + std::to_string(images) +
              " does not match label count " + std::to_string(labels)) {}
};

struct ParseError : Error {
  ParseError(std::size_t line, const std::string& what)
      : Error("parse error at line " + std::to_string(line) + ": " + what),
        line(line) {}
  std::size_t line;
};

struct InconsistentWidth : Error {
  InconsistentWidth(std::size_t line, std::size_t got, std::size_t want)
      : Error("line " + std::to_string(line) + " has " + std::to_string(got) +
              " features, expected " + std::to_string(want)),
        line(line) {}
  std::size_t line;
};

}  // namespace subclust
