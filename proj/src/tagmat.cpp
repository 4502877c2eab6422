/* Copyright 2026 The f1thresh Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "f1thresh/tagmat.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

#include "f1thresh/errors.hpp"
#include "f1thresh/rng.hpp"
#include "json.hpp"

namespace f1thresh {

namespace {

std::string location(std::size_t r, std::size_t c) {
  return "(" + std::to_string(r) + "," + std::to_string(c) + ")";
}

std::string shape(std::size_t rows, std::size_t cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

void check_score(double v, std::size_t r, std::size_t c) {
  if (!std::isfinite(v)) throw DataError("non-finite score at " + location(r, c));
  if (v < 0.0 || v > 1.0) throw DataError("score out of range at " + location(r, c));
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct CsvTable {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
};

CsvTable parse_csv(std::string_view text, const LoadOptions& options) {
  CsvTable table;
  std::size_t pos = 0;
  bool header_pending = options.skip_header;
  if (text.starts_with("\xEF\xBB\xBF")) pos = 3;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    if (line.empty()) continue;

    const std::size_t r = table.rows;
    std::size_t c = 0;
    std::size_t field_start = 0;
    for (;;) {
      auto comma = line.find(',', field_start);
      const bool last = comma == std::string_view::npos;
      if (last) comma = line.size();
      const std::string_view field = trim(line.substr(field_start, comma - field_start));
      double v = 0.0;
      const char* first = field.data();
      const char* stop = field.data() + field.size();
      if (!field.empty() && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, stop, v);
      if (field.empty() || ec != std::errc() || ptr != stop) {
        throw DataError("non-numeric cell at " + location(r, c));
      }
      table.values.push_back(v);
      ++c;
      if (last) break;
      field_start = comma + 1;
    }
    if (r == 0) {
      table.cols = c;
    } else if (c != table.cols) {
      throw DataError("ragged row " + std::to_string(r) + ": expected " +
                      std::to_string(table.cols) + " columns, found " + std::to_string(c));
    }
    ++table.rows;
  }
  if (table.rows == 0) throw DataError("matrix file contains no rows");
  return table;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw DataError("read error on " + path.string());
  return content;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw DataError("write error on " + path.string());
}

std::uint32_t read_u32_le(const char* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap32(v);
  return v;
}

void append_u32_le(std::string& out, std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap32(v);
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

bool is_binary(std::string_view content) {
  return content.size() >= 4 && std::memcmp(content.data(), kBinaryMagic, 4) == 0;
}

struct BinaryTable {
  std::size_t rows;
  std::size_t cols;
  std::vector<float> values;
};

BinaryTable parse_binary(std::string_view content, const std::filesystem::path& path) {
  if (content.size() < 16) throw DataError("truncated binary header in " + path.string());
  const std::uint32_t version = read_u32_le(content.data() + 4);
  if (version != kBinaryVersion) {
    throw DataError("unsupported binary matrix version " + std::to_string(version));
  }
  const std::size_t rows = read_u32_le(content.data() + 8);
  const std::size_t cols = read_u32_le(content.data() + 12);
  if (rows == 0 || cols == 0) throw DataError("binary matrix has an empty dimension");
  const std::size_t expected = 16 + rows * cols * 4;
  if (content.size() != expected) {
    throw DataError("binary matrix " + path.string() + " has " + std::to_string(content.size()) +
                    " bytes, header implies " + std::to_string(expected));
  }
  BinaryTable table{rows, cols, std::vector<float>(rows * cols)};
  std::memcpy(table.values.data(), content.data() + 16, rows * cols * 4);
  if constexpr (std::endian::native == std::endian::big) {
    for (auto& v : table.values) v = std::bit_cast<float>(__builtin_bswap32(std::bit_cast<std::uint32_t>(v)));
  }
  return table;
}

template <typename T>
void save_binary_impl(const Matrix<T>& m, const std::filesystem::path& path) {
  std::string out(kBinaryMagic, 4);
  append_u32_le(out, kBinaryVersion);
  append_u32_le(out, static_cast<std::uint32_t>(m.rows()));
  append_u32_le(out, static_cast<std::uint32_t>(m.cols()));
  out.reserve(16 + m.size() * 4);
  for (const T v : m.values()) append_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  write_file(path, out);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

template <typename T>
Matrix<T>::Matrix(std::size_t rows, std::size_t cols, std::vector<T> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows_ * cols_ != values_.size()) {
    throw std::invalid_argument("matrix " + shape(rows_, cols_) + " given " +
                                std::to_string(values_.size()) + " values");
  }
}

template class Matrix<double>;
template class Matrix<std::uint8_t>;

ScoreMatrix::ScoreMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : Matrix<double>(rows, cols, std::move(values)) {
  if (rows == 0 || cols == 0) throw DataError("score matrix has an empty dimension");
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) check_score((*this)(r, c), r, c);
  }
}

LabelMatrix::LabelMatrix(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> values)
    : Matrix<std::uint8_t>(rows, cols, std::move(values)) {
  if (rows == 0 || cols == 0) throw DataError("label matrix has an empty dimension");
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if ((*this)(r, c) > 1) throw DataError("label not in {0,1} at " + location(r, c));
    }
  }
}

std::vector<std::int64_t> LabelMatrix::column_sums() const {
  std::vector<std::int64_t> sums(cols(), 0);
  for (std::size_t r = 0; r < rows(); ++r) {
    const auto y = row(r);
    for (std::size_t c = 0; c < cols(); ++c) sums[c] += y[c];
  }
  return sums;
}

ThresholdVector::ThresholdVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("threshold vector is empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw std::invalid_argument("threshold " + std::to_string(i) + " = " + format_double(v) +
                                  " is outside [0, 1]");
    }
  }
}

ThresholdVector::ThresholdVector(std::size_t classes, double value)
    : ThresholdVector(std::vector<double>(classes, value)) {}

ThresholdVector ThresholdVector::clamped(std::vector<double> values) {
  for (double& v : values) v = std::clamp(v, 0.0, 1.0);
  return ThresholdVector(std::move(values));
}

Dataset::Dataset(ScoreMatrix scores, LabelMatrix labels)
    : scores_(std::move(scores)), labels_(std::move(labels)) {
  if (scores_.rows() != labels_.rows() || scores_.cols() != labels_.cols()) {
    throw DataError("dimension mismatch: scores " + shape(scores_.rows(), scores_.cols()) +
                    ", labels " + shape(labels_.rows(), labels_.cols()));
  }
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  const std::size_t c = classes();
  std::vector<double> p;
  std::vector<std::uint8_t> y;
  p.reserve(rows.size() * c);
  y.reserve(rows.size() * c);
  for (const std::size_t r : rows) {
    if (r >= instances()) throw std::out_of_range("subset row out of range");
    const auto pr = scores_.row(r);
    const auto yr = labels_.row(r);
    p.insert(p.end(), pr.begin(), pr.end());
    y.insert(y.end(), yr.begin(), yr.end());
  }
  return Dataset(ScoreMatrix(rows.size(), c, std::move(p)), LabelMatrix(rows.size(), c, std::move(y)));
}

Dataset pair_dataset(ScoreMatrix scores, LabelMatrix labels) {
  return Dataset(std::move(scores), std::move(labels));
}

ScoreMatrix parse_scores_csv(std::string_view text, const LoadOptions& options) {
  CsvTable t = parse_csv(text, options);
  return ScoreMatrix(t.rows, t.cols, std::move(t.values));
}

LabelMatrix parse_labels_csv(std::string_view text, const LoadOptions& options) {
  const CsvTable t = parse_csv(text, options);
  std::vector<std::uint8_t> labels(t.values.size());
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    const double v = t.values[i];
    if (v != 0.0 && v != 1.0) throw DataError("label not in {0,1} at " + location(i / t.cols, i % t.cols));
    labels[i] = v == 1.0 ? 1 : 0;
  }
  return LabelMatrix(t.rows, t.cols, std::move(labels));
}

ScoreMatrix load_scores(const std::filesystem::path& path, const LoadOptions& options) {
  const std::string content = read_file(path);
  if (!is_binary(content)) return parse_scores_csv(content, options);
  const BinaryTable t = parse_binary(content, path);
  std::vector<double> values(t.values.begin(), t.values.end());
  return ScoreMatrix(t.rows, t.cols, std::move(values));
}

LabelMatrix load_labels(const std::filesystem::path& path, const LoadOptions& options) {
  const std::string content = read_file(path);
  if (!is_binary(content)) return parse_labels_csv(content, options);
  const BinaryTable t = parse_binary(content, path);
  std::vector<std::uint8_t> labels(t.values.size());
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    const float v = t.values[i];
    if (v != 0.0f && v != 1.0f) throw DataError("label not in {0,1} at " + location(i / t.cols, i % t.cols));
    labels[i] = v == 1.0f ? 1 : 0;
  }
  return LabelMatrix(t.rows, t.cols, std::move(labels));
}

void save_csv(const Matrix<double>& m, const std::filesystem::path& path) {
  std::string out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  write_file(path, out);
}

void save_csv(const Matrix<std::uint8_t>& m, const std::filesystem::path& path) {
  std::string out;
  out.reserve(m.size() * 2);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += m(r, c) ? '1' : '0';
    }
    out += '\n';
  }
  write_file(path, out);
}

void save_binary(const Matrix<double>& m, const std::filesystem::path& path) { save_binary_impl(m, path); }
void save_binary(const Matrix<std::uint8_t>& m, const std::filesystem::path& path) { save_binary_impl(m, path); }

std::string format_thresholds(const ThresholdVector& t) {
  std::string out = "{\"version\":1,\"num_classes\":" + std::to_string(t.size()) + ",\"thresholds\":[";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ',';
    out += format_double(t[i]);
  }
  out += "]}\n";
  return out;
}

void save_thresholds(const ThresholdVector& t, const std::filesystem::path& path) {
  write_file(path, format_thresholds(t));
}

ThresholdVector parse_thresholds(std::string_view text, std::optional<std::size_t> expected_classes) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("malformed threshold file: ") + e.what());
  }
  if (!j.is_object() || !j.contains("version") || !j.contains("num_classes") || !j.contains("thresholds")) {
    throw DataError("threshold file must contain version, num_classes and thresholds");
  }
  if (j["version"] != 1) throw DataError("unsupported threshold file version");
  if (!j["num_classes"].is_number_unsigned()) throw DataError("num_classes must be a non-negative integer");
  const auto& arr = j["thresholds"];
  if (!arr.is_array()) throw DataError("thresholds must be an array");
  const std::size_t declared = j["num_classes"].get<std::size_t>();
  if (arr.size() != declared) {
    throw DataError("threshold file declares " + std::to_string(declared) + " classes but lists " +
                    std::to_string(arr.size()));
  }
  if (expected_classes && *expected_classes != declared) {
    throw DataError("threshold length mismatch: file has " + std::to_string(declared) + ", expected " +
                    std::to_string(*expected_classes));
  }
  std::vector<double> values;
  values.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number()) throw DataError("non-numeric threshold");
    values.push_back(v.get<double>());
  }
  try {
    return ThresholdVector(std::move(values));
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
}

ThresholdVector load_thresholds(const std::filesystem::path& path, std::optional<std::size_t> expected_classes) {
  return parse_thresholds(read_file(path), expected_classes);
}

FoldPlan make_fold_plan(std::size_t instances, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > instances) {
    throw std::invalid_argument("k = " + std::to_string(k) + " out of range [2, " + std::to_string(instances) + "]");
  }
  std::vector<std::size_t> order(instances);
  for (std::size_t i = 0; i < instances; ++i) order[i] = i;
  Xoshiro256 rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  FoldPlan plan{k, std::vector<std::size_t>(instances), std::vector<std::vector<std::size_t>>(k)};
  const std::size_t base = instances / k;
  const std::size_t extra = instances % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t len = base + (f < extra ? 1 : 0);
    plan.folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                         order.begin() + static_cast<std::ptrdiff_t>(pos + len));
    for (const std::size_t i : plan.folds[f]) plan.assignments[i] = f;
    pos += len;
  }
  return plan;
}

std::vector<FoldPair> kfold_split(const Dataset& dataset, std::size_t k, std::uint64_t seed) {
  const FoldPlan plan = make_fold_plan(dataset.instances(), k, seed);
  std::vector<FoldPair> pairs;
  pairs.reserve(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> val;
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) val.insert(val.end(), plan.folds[g].begin(), plan.folds[g].end());
    }
    pairs.push_back(FoldPair{dataset.subset(val), dataset.subset(plan.folds[f])});
  }
  return pairs;
}

}  // namespace f1thresh
