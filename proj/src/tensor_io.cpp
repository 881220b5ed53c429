// Copyright 2026 The aldfit Authors
// SPDX-License-Identifier: Apache-2.0

#include "aldfit/tensor_io.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

#include <json.hpp>

#include "aldfit/error.hpp"

namespace aldfit {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::size_t kFixedPrefix = 4 + 4 + 8;

template <typename UInt>
void put_le(std::vector<std::uint8_t>& out, UInt v) {
  for (std::size_t i = 0; i < sizeof(UInt); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <typename UInt>
UInt get_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(bytes[offset + i]) << (8 * i);
  return v;
}

void check_finite(std::span<const float> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorCode::kNonFinite, "non-finite value at flat index " + std::to_string(i));
    }
  }
}

bool parse_float(std::string_view token, float& out) {
  while (!token.empty() && (token.front() == ' ' || token.front() == '\t')) token.remove_prefix(1);
  while (!token.empty() && (token.back() == ' ' || token.back() == '\t' || token.back() == '\r')) {
    token.remove_suffix(1);
  }
  if (token.empty()) return false;
  if (token.front() == '+') token.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

}  // namespace

WeightMatrix::WeightMatrix(std::string name, std::size_t rows, std::size_t cols,
                           std::vector<float> values, std::vector<std::string> class_labels)
    : name_(std::move(name)),
      rows_(rows),
      cols_(cols),
      values_(std::move(values)),
      labels_(std::move(class_labels)) {
  if (rows_ < 1 || cols_ < 2) {
    throw Error(ErrorCode::kInvalidArgument, "matrix needs K >= 1 and D >= 2, got " +
                                                 std::to_string(rows_) + "x" + std::to_string(cols_));
  }
  if (values_.size() != rows_ * cols_) {
    throw Error(ErrorCode::kShapeMismatch, "expected " + std::to_string(rows_ * cols_) +
                                               " values, got " + std::to_string(values_.size()));
  }
  if (!labels_.empty() && labels_.size() != rows_) {
    throw Error(ErrorCode::kShapeMismatch, "class_labels has " + std::to_string(labels_.size()) +
                                               " entries for " + std::to_string(rows_) + " classes");
  }
  check_finite(values_);
}

std::span<const float> WeightMatrix::row(std::size_t k) const {
  if (k >= rows_) throw Error(ErrorCode::kInvalidArgument, "row " + std::to_string(k) + " out of range");
  return std::span<const float>(values_).subspan(k * cols_, cols_);
}

bool operator==(const WeightMatrix& a, const WeightMatrix& b) {
  if (a.name_ != b.name_ || a.rows_ != b.rows_ || a.cols_ != b.cols_ || a.labels_ != b.labels_) {
    return false;
  }
  return a.values_.size() == b.values_.size() &&
         std::memcmp(a.values_.data(), b.values_.data(), a.values_.size() * sizeof(float)) == 0;
}

std::vector<std::uint8_t> encode_aldw(const WeightMatrix& matrix) {
  ordered_json header;
  header["name"] = matrix.name();
  header["dtype"] = "f32";
  header["shape"] = {matrix.num_classes(), matrix.num_features()};
  header["order"] = "row_major";
  if (matrix.has_labels()) header["class_labels"] = matrix.class_labels();
  const std::string text = header.dump();

  const auto values = matrix.values();
  std::vector<std::uint8_t> out;
  out.reserve(kFixedPrefix + text.size() + values.size() * 4);
  out.insert(out.end(), std::begin(kAldwMagic), std::end(kAldwMagic));
  put_le<std::uint32_t>(out, kAldwVersion);
  put_le<std::uint64_t>(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  for (float v : values) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

WeightMatrix decode_aldw(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kAldwMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "missing ALDW magic");
  }
  if (bytes.size() < kFixedPrefix) throw Error(ErrorCode::kShapeMismatch, "truncated ALDW prefix");
  const auto version = get_le<std::uint32_t>(bytes, 4);
  if (version != kAldwVersion) {
    throw Error(ErrorCode::kBadMagic, "unsupported ALDW version " + std::to_string(version));
  }
  const auto header_len = get_le<std::uint64_t>(bytes, 8);
  if (header_len > bytes.size() - kFixedPrefix) {
    throw Error(ErrorCode::kShapeMismatch, "header length exceeds file size");
  }
  const auto* header_begin = reinterpret_cast<const char*>(bytes.data() + kFixedPrefix);
  const auto header = nlohmann::json::parse(header_begin, header_begin + header_len, nullptr, false);
  if (header.is_discarded() || !header.is_object()) {
    throw Error(ErrorCode::kBadMagic, "ALDW header is not a JSON object");
  }

  std::string name;
  std::size_t rows = 0, cols = 0;
  std::vector<std::string> labels;
  try {
    name = header.at("name").get<std::string>();
    if (header.at("dtype").get<std::string>() != "f32") {
      throw Error(ErrorCode::kBadMagic, "unsupported dtype " + header.at("dtype").dump());
    }
    if (header.at("order").get<std::string>() != "row_major") {
      throw Error(ErrorCode::kBadMagic, "unsupported order " + header.at("order").dump());
    }
    const auto& shape = header.at("shape");
    if (!shape.is_array() || shape.size() != 2) {
      throw Error(ErrorCode::kShapeMismatch, "shape must be [K, D]");
    }
    rows = shape[0].get<std::size_t>();
    cols = shape[1].get<std::size_t>();
    if (header.contains("class_labels")) labels = header["class_labels"].get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBadMagic, std::string("malformed ALDW header: ") + e.what());
  }

  const std::size_t payload_offset = kFixedPrefix + header_len;
  const std::size_t payload_bytes = bytes.size() - payload_offset;
  if (cols != 0 && rows > payload_bytes / 4 / cols) {
    throw Error(ErrorCode::kShapeMismatch, "payload shorter than shape");
  }
  if (payload_bytes != rows * cols * 4) {
    throw Error(ErrorCode::kShapeMismatch, "payload is " + std::to_string(payload_bytes) +
                                               " bytes, shape needs " + std::to_string(rows * cols * 4));
  }
  std::vector<float> values(rows * cols);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::bit_cast<float>(get_le<std::uint32_t>(bytes, payload_offset + 4 * i));
  }
  return WeightMatrix(std::move(name), rows, cols, std::move(values), std::move(labels));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIoFailure, "read failed for " + path.string());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path.string());
}

WeightMatrix decode_matrix(std::span<const std::uint8_t> bytes, std::string csv_name) {
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kAldwMagic, 4) == 0) return decode_aldw(bytes);
  try {
    return parse_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                     std::move(csv_name));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kNonFinite) throw;
    throw Error(ErrorCode::kBadMagic, std::string("input is neither ALDW nor CSV (") + e.what() + ")");
  }
}

WeightMatrix read_matrix(const std::filesystem::path& path) {
  return decode_matrix(read_file_bytes(path), path.stem().string());
}

void write_matrix(const WeightMatrix& matrix, const std::filesystem::path& path) {
  write_file_bytes(path, encode_aldw(matrix));
}

WeightMatrix parse_csv(std::string_view text, std::string name) {
  std::vector<float> values;
  std::vector<std::string> labels;
  std::size_t rows = 0, cols = 0;
  bool labelled = false;

  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    std::vector<std::string_view> tokens;
    for (std::size_t start = 0;;) {
      const auto comma = line.find(',', start);
      tokens.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }

    float probe;
    const bool first_is_label = !parse_float(tokens.front(), probe);
    if (rows == 0) labelled = first_is_label;
    if (first_is_label != labelled) {
      throw Error(ErrorCode::kShapeMismatch, "row " + std::to_string(rows) + " disagrees on label column");
    }
    const std::size_t first = labelled ? 1 : 0;
    const std::size_t width = tokens.size() - first;
    if (rows == 0) cols = width;
    if (width != cols || width == 0) {
      throw Error(ErrorCode::kShapeMismatch, "row " + std::to_string(rows) + " has " +
                                                 std::to_string(width) + " values, expected " +
                                                 std::to_string(cols));
    }
    if (labelled) {
      std::string_view label = tokens.front();
      while (!label.empty() && label.front() == ' ') label.remove_prefix(1);
      while (!label.empty() && label.back() == ' ') label.remove_suffix(1);
      labels.emplace_back(label);
    }
    for (std::size_t i = first; i < tokens.size(); ++i) {
      float v;
      if (!parse_float(tokens[i], v)) {
        const std::string token(tokens[i]);
        const auto lowered = [&] {
          std::string s;
          for (char c : token) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
          return s;
        }();
        if (lowered.find("nan") != std::string::npos || lowered.find("inf") != std::string::npos) {
          throw Error(ErrorCode::kNonFinite, "non-finite token '" + token + "'");
        }
        throw Error(ErrorCode::kBadMagic, "unparseable token '" + token + "'");
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw Error(ErrorCode::kBadMagic, "empty CSV");
  return WeightMatrix(std::move(name), rows, cols, std::move(values), std::move(labels));
}

std::string format_csv(const WeightMatrix& matrix) {
  std::string out;
  char buf[32];
  for (std::size_t k = 0; k < matrix.num_classes(); ++k) {
    if (matrix.has_labels()) {
      if (matrix.class_labels()[k].find_first_of(",\n") != std::string::npos) {
        throw Error(ErrorCode::kInvalidArgument, "CSV labels cannot contain commas or newlines");
      }
      out += matrix.class_labels()[k];
      out += ',';
    }
    const auto row = matrix.row(k);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(row[i]));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

WeightMatrix read_csv(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                   path.stem().string());
}

void write_csv(const WeightMatrix& matrix, const std::filesystem::path& path) {
  const auto text = format_csv(matrix);
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace aldfit
