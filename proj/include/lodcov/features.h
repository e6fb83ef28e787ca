#ifndef LODCOV_FEATURES_H_
#define LODCOV_FEATURES_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lodcov/ingest.h"
#include "lodcov/langcatalog.h"

namespace lodcov {

enum class Transform { kLog1p, kIdentity };
enum class MissingPolicy { kAsZero, kDropLanguage };

Transform parse_transform(std::string_view text);
MissingPolicy parse_missing_policy(std::string_view text);

struct VariableSpec {
  std::string name;
  std::string source_id;
  CountField field = CountField::kEntities;
  Transform transform = Transform::kLog1p;
  MissingPolicy missing_policy = MissingPolicy::kAsZero;

  bool operator==(const VariableSpec &) const = default;
};

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double> &data() const { return data_; }

  static Matrix from_rows(const std::vector<std::vector<double>> &rows);

  bool operator==(const Matrix &) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct FeatureMatrix {
  std::vector<std::string> languages;  // wals codes, one per row
  std::vector<VariableSpec> variables;
  Matrix values;
  std::vector<bool> zero_coverage_mask;

  std::size_t rows() const { return languages.size(); }
  bool empty() const { return languages.empty(); }

  // Row subset, preserving order.
  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;

  bool operator==(const FeatureMatrix &) const = default;
};

double apply_transform(Transform t, double count);

// One row per catalog languoid targeted by a mapping (sorted by wals_code),
// one column per spec. Counts of several external codes resolving to the
// same languoid are summed. Languages with no record for a spec follow its
// missing policy.
FeatureMatrix build_matrix(const CoverageSnapshot &snapshot, const Catalog &catalog,
                           const MappingTable &mappings,
                           const std::vector<VariableSpec> &specs);

struct ZeroCoverageSplit {
  std::vector<std::string> zero_group;
  FeatureMatrix active;
};

ZeroCoverageSplit partition_zero_coverage(const FeatureMatrix &matrix);

// Column z-scores; zero-variance columns become all zeros. Opt-in.
FeatureMatrix standardize(const FeatureMatrix &matrix);

// Row sums, i.e. the sum of (log) variables used as a scalar coverage score.
std::vector<double> aggregate_scores(const FeatureMatrix &matrix);

}  // namespace lodcov

#endif  // LODCOV_FEATURES_H_
