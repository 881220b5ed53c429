// Copyright 2026 The aldfit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace aldfit {

// ALDW container, all integers little-endian:
//
//   "ALDW"            4 bytes
//   version (u32)     4 bytes, currently 1
//   header_len (u64)  8 bytes
//   header            header_len bytes of UTF-8 JSON:
//                     {"name": str, "dtype": "f32", "shape": [K, D],
//                      "order": "row_major", "class_labels": [str] (optional)}
//   payload           K*D IEEE-754 binary32 values, row-major
//
// No padding, no trailing bytes.
inline constexpr char kAldwMagic[4] = {'A', 'L', 'D', 'W'};
inline constexpr std::uint32_t kAldwVersion = 1;

/// Final fully-connected layer weights, one row per class.
class WeightMatrix {
 public:
  WeightMatrix() = default;

  /// Throws ShapeMismatch when values.size() != rows*cols or labels are the
  /// wrong length, NonFinite on NaN/Inf, InvalidArgument when rows < 1 or
  /// cols < 2.
  WeightMatrix(std::string name, std::size_t rows, std::size_t cols, std::vector<float> values,
               std::vector<std::string> class_labels = {});

  const std::string& name() const noexcept { return name_; }
  std::size_t num_classes() const noexcept { return rows_; }
  std::size_t num_features() const noexcept { return cols_; }
  std::span<const float> values() const noexcept { return values_; }
  std::span<const float> row(std::size_t k) const;
  const std::vector<std::string>& class_labels() const noexcept { return labels_; }
  bool has_labels() const noexcept { return !labels_.empty(); }

  /// Bitwise comparison of the payload plus name/shape/labels.
  friend bool operator==(const WeightMatrix& a, const WeightMatrix& b);

 private:
  std::string name_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> values_;
  std::vector<std::string> labels_;
};

std::vector<std::uint8_t> encode_aldw(const WeightMatrix& matrix);
WeightMatrix decode_aldw(std::span<const std::uint8_t> bytes);

/// ALDW when the magic is present, otherwise CSV named `csv_name`. Anything
/// that is neither raises BadMagic.
WeightMatrix decode_matrix(std::span<const std::uint8_t> bytes, std::string csv_name);

/// Reads an ALDW file, or falls back to CSV when the magic is absent.
WeightMatrix read_matrix(const std::filesystem::path& path);
void write_matrix(const WeightMatrix& matrix, const std::filesystem::path& path);

// CSV contract: one row per class, comma-separated decimals written with 9
// significant digits (enough to round-trip any binary32 exactly). A leading
// non-numeric token on every row is taken as the class label. The matrix name
// is the file stem.
WeightMatrix parse_csv(std::string_view text, std::string name);
std::string format_csv(const WeightMatrix& matrix);
WeightMatrix read_csv(const std::filesystem::path& path);
void write_csv(const WeightMatrix& matrix, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace aldfit
