#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "msfl/model.hpp"
#include "msfl/svm.hpp"

namespace msfl {

// On-disk container shared by models, feature sets and classifiers:
//   magic "MSFLBIN\n", u32 version, u32 kind, 5 x i32 geometry,
//   u32 array count, then per array a length-prefixed name and a
//   length-prefixed block of little-endian f64 values (matrices flattened
//   row-major), and finally the FNV-1a-64 checksum of all preceding bytes.
// Corruption, version skew, truncation and kind confusion raise the
// distinct errors ChecksumError, VersionError, TruncationError and
// KindMismatchError.
struct ArrayFile {
  static constexpr std::uint32_t kVersion = 1;
  // kind ids: model kinds 0..5 as in ModelKind, 100 feature set, 101 svm.
  std::uint32_t kind = 0;
  std::array<std::int32_t, 5> geometry = {0, 0, 0, 0, 0};
  std::vector<std::pair<std::string, std::vector<double>>> arrays;

  const std::vector<double>& get(const std::string& name) const;
  bool has(const std::string& name) const;
};

void write_array_file(const ArrayFile& file, const std::string& path);
ArrayFile read_array_file(const std::string& path);

void save_model(const Model& model, const std::string& path);

// expect, when given, turns a kind disagreement into a KindMismatchError.
Model load_model(const std::string& path,
                 std::optional<ModelKind> expect = std::nullopt);

// Feature matrix (columns = samples) plus integer labels.
void save_features(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                   const std::string& path);
std::pair<Eigen::MatrixXd, std::vector<int>> load_features(
    const std::string& path);

void save_svm(const SVMModel& model, const std::string& path);
SVMModel load_svm(const std::string& path);

}  // namespace msfl
