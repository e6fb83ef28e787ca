#include "lodcov/features.h"

#include <cmath>
#include <map>
#include <optional>
#include <set>

#include "lodcov/csv.h"
#include "lodcov/error.h"

namespace lodcov {

Transform parse_transform(std::string_view text) {
  std::string t = to_lower(trim(text));
  if (t == "log1p") return Transform::kLog1p;
  if (t == "identity") return Transform::kIdentity;
  throw Error(ErrorKind::kConfig, "unknown transform '" + std::string(text) + "'");
}

MissingPolicy parse_missing_policy(std::string_view text) {
  std::string t = to_lower(trim(text));
  if (t == "as_zero") return MissingPolicy::kAsZero;
  if (t == "drop_language") return MissingPolicy::kDropLanguage;
  throw Error(ErrorKind::kConfig, "unknown missing policy '" + std::string(text) + "'");
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>> &rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) {
      throw Error(ErrorKind::kArgument, "ragged matrix rows");
    }
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  FeatureMatrix out;
  out.variables = variables;
  out.values = Matrix(rows.size(), values.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::size_t r = rows[i];
    out.languages.push_back(languages[r]);
    out.zero_coverage_mask.push_back(zero_coverage_mask[r]);
    for (std::size_t c = 0; c < values.cols(); ++c) out.values(i, c) = values(r, c);
  }
  return out;
}

double apply_transform(Transform t, double count) {
  return t == Transform::kLog1p ? std::log1p(count) : count;
}

FeatureMatrix build_matrix(const CoverageSnapshot &snapshot, const Catalog &catalog,
                           const MappingTable &mappings,
                           const std::vector<VariableSpec> &specs) {
  if (specs.empty()) throw Error(ErrorKind::kArgument, "no variables to build");
  if (snapshot.records.empty()) {
    throw Error(ErrorKind::kEmptyMatrix, "snapshot has no records");
  }

  std::set<std::string> known_sources;
  for (const auto &r : snapshot.records) known_sources.insert(r.source_id);
  for (const auto &[id, note] : snapshot.source_versions) known_sources.insert(id);
  std::set<std::string> names;
  for (const auto &spec : specs) {
    if (!known_sources.count(spec.source_id)) {
      throw Error(ErrorKind::kConfig, "variable '" + spec.name +
                                          "' refers to unknown source '" +
                                          spec.source_id + "'");
    }
    if (!names.insert(spec.name).second) {
      throw Error(ErrorKind::kConfig, "duplicate variable name '" + spec.name + "'");
    }
  }

  // (wals_code, spec index) -> summed count, present only if observed.
  std::map<std::pair<std::string, std::size_t>, std::uint64_t> observed;
  for (const auto &rec : snapshot.records) {
    const Languoid *l = resolve_code(catalog, mappings, rec.language);
    if (!l) continue;
    for (std::size_t s = 0; s < specs.size(); ++s) {
      if (specs[s].source_id != rec.source_id) continue;
      if (auto c = rec.count(specs[s].field)) observed[{l->wals_code, s}] += *c;
    }
  }

  FeatureMatrix out;
  out.variables = specs;
  std::vector<std::vector<double>> raw_rows;
  for (const std::string &code : mappings.mapped_wals_codes()) {
    std::vector<double> raw(specs.size(), 0.0);
    bool keep = true;
    for (std::size_t s = 0; s < specs.size(); ++s) {
      auto it = observed.find({code, s});
      if (it != observed.end()) {
        raw[s] = static_cast<double>(it->second);
      } else if (specs[s].missing_policy == MissingPolicy::kDropLanguage) {
        keep = false;
        break;
      }
    }
    if (!keep) continue;
    out.languages.push_back(code);
    raw_rows.push_back(std::move(raw));
  }
  if (out.languages.empty()) {
    throw Error(ErrorKind::kEmptyMatrix, "every language was dropped");
  }

  out.values = Matrix(raw_rows.size(), specs.size());
  for (std::size_t r = 0; r < raw_rows.size(); ++r) {
    bool all_zero = true;
    for (std::size_t s = 0; s < specs.size(); ++s) {
      if (raw_rows[r][s] != 0.0) all_zero = false;
      out.values(r, s) = apply_transform(specs[s].transform, raw_rows[r][s]);
    }
    out.zero_coverage_mask.push_back(all_zero);
  }
  return out;
}

ZeroCoverageSplit partition_zero_coverage(const FeatureMatrix &matrix) {
  ZeroCoverageSplit split;
  std::vector<std::size_t> active_rows;
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    if (matrix.zero_coverage_mask[r]) {
      split.zero_group.push_back(matrix.languages[r]);
    } else {
      active_rows.push_back(r);
    }
  }
  split.active = matrix.select_rows(active_rows);
  return split;
}

FeatureMatrix standardize(const FeatureMatrix &matrix) {
  FeatureMatrix out = matrix;
  std::size_t n = matrix.rows();
  if (n == 0) return out;
  for (std::size_t c = 0; c < matrix.values.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += matrix.values(r, c);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double d = matrix.values(r, c) - mean;
      var += d * d;
    }
    double sd = n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) : 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      out.values(r, c) = sd > 0 ? (matrix.values(r, c) - mean) / sd : 0.0;
    }
  }
  return out;
}

std::vector<double> aggregate_scores(const FeatureMatrix &matrix) {
  std::vector<double> scores(matrix.rows(), 0.0);
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (double v : matrix.values.row(r)) scores[r] += v;
  }
  return scores;
}

}  // namespace lodcov
