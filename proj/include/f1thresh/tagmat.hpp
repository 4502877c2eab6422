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

#ifndef F1THRESH_TAGMAT_HPP_
#define F1THRESH_TAGMAT_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace f1thresh {

// Dense row-major matrix. Rows are instances, columns are classes.
template <typename T>
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> values);
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : Matrix(rows, cols, std::vector<T>(rows * cols, fill)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }

  T operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  T& at(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

  std::span<const T> row(std::size_t r) const {
    return std::span<const T>(values_).subspan(r * cols_, cols_);
  }
  std::span<const T> values() const { return values_; }
  std::span<T> mutable_values() { return values_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<T> values_;
};

using RealMatrix = Matrix<double>;

// Classifier confidences, every cell finite and inside [0, 1].
class ScoreMatrix : public Matrix<double> {
 public:
  // Throws DataError naming the first offending (row, col).
  ScoreMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);
};

// Binary ground truth or binary predictions.
class LabelMatrix : public Matrix<std::uint8_t> {
 public:
  LabelMatrix(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> values);

  // Number of positives per class.
  std::vector<std::int64_t> column_sums() const;
};

// Per-class decision thresholds. Values are finite and inside [0, 1].
class ThresholdVector {
 public:
  explicit ThresholdVector(std::vector<double> values);
  ThresholdVector(std::size_t classes, double value);

  // Replaces NaN-free values outside [0, 1] by the nearest bound.
  static ThresholdVector clamped(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const ThresholdVector&, const ThresholdVector&) = default;

 private:
  std::vector<double> values_;
};

class Dataset {
 public:
  // Throws DataError when the shapes differ.
  Dataset(ScoreMatrix scores, LabelMatrix labels);

  const ScoreMatrix& scores() const { return scores_; }
  const LabelMatrix& labels() const { return labels_; }
  std::size_t instances() const { return scores_.rows(); }
  std::size_t classes() const { return scores_.cols(); }

  // Rows picked in the given order; indices may repeat.
  Dataset subset(std::span<const std::size_t> rows) const;

 private:
  ScoreMatrix scores_;
  LabelMatrix labels_;
};

Dataset pair_dataset(ScoreMatrix scores, LabelMatrix labels);

struct LoadOptions {
  // Skip the first line of a CSV file. Ignored for binary files.
  bool skip_header = false;
};

// Binary matrix format, little-endian:
//   bytes 0..3   magic "F1TM"
//   bytes 4..7   u32 version (1)
//   bytes 8..11  u32 rows
//   bytes 12..15 u32 cols
//   then rows*cols IEEE-754 binary32 values, row-major.
// Anything not starting with the magic is parsed as CSV.
inline constexpr char kBinaryMagic[4] = {'F', '1', 'T', 'M'};
inline constexpr std::uint32_t kBinaryVersion = 1;

ScoreMatrix load_scores(const std::filesystem::path& path, const LoadOptions& options = {});
LabelMatrix load_labels(const std::filesystem::path& path, const LoadOptions& options = {});

// Parses CSV text directly; used by the file loaders.
ScoreMatrix parse_scores_csv(std::string_view text, const LoadOptions& options = {});
LabelMatrix parse_labels_csv(std::string_view text, const LoadOptions& options = {});

// CSV output uses 17 significant digits so doubles reload bit-exactly.
// Binary output stores binary32 and is lossless only for float-representable
// values.
void save_csv(const Matrix<double>& m, const std::filesystem::path& path);
void save_csv(const Matrix<std::uint8_t>& m, const std::filesystem::path& path);
void save_binary(const Matrix<double>& m, const std::filesystem::path& path);
void save_binary(const Matrix<std::uint8_t>& m, const std::filesystem::path& path);

// Threshold file: {"version":1,"num_classes":C,"thresholds":[...]}, each value
// written with 17 significant digits.
void save_thresholds(const ThresholdVector& t, const std::filesystem::path& path);
std::string format_thresholds(const ThresholdVector& t);
ThresholdVector load_thresholds(const std::filesystem::path& path,
                                std::optional<std::size_t> expected_classes = std::nullopt);
ThresholdVector parse_thresholds(std::string_view text,
                                 std::optional<std::size_t> expected_classes = std::nullopt);

struct FoldPlan {
  std::size_t k;
  // Fold index in [0, k) per instance.
  std::vector<std::size_t> assignments;
  // Instance indices per fold in shuffled order.
  std::vector<std::vector<std::size_t>> folds;
};

struct FoldPair {
  Dataset val;
  Dataset eval;
};

// Shuffles instance indices with Xoshiro256(seed) and cuts the shuffled order
// into k contiguous folds; the first n % k folds get one extra instance.
// Throws std::invalid_argument unless 2 <= k <= n.
FoldPlan make_fold_plan(std::size_t instances, std::size_t k, std::uint64_t seed);

// Pair i evaluates on fold i and fits on the other folds in fold order.
std::vector<FoldPair> kfold_split(const Dataset& dataset, std::size_t k, std::uint64_t seed);

}  // namespace f1thresh

#endif  // F1THRESH_TAGMAT_HPP_
