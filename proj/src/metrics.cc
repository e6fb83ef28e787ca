#include "lodcov/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "lodcov/cluster.h"
#include "lodcov/csv.h"
#include "lodcov/error.h"

namespace lodcov {

namespace {

// Maps arbitrary labels onto 0..m-1 (ascending label order).
std::vector<int> dense_labels(std::span<const int> labels, int *num_clusters) {
  std::map<int, int> ids;
  for (int l : labels) ids.emplace(l, 0);
  int next = 0;
  for (auto &[label, id] : ids) id = next++;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) out.push_back(ids[l]);
  *num_clusters = next;
  return out;
}

std::vector<int> labels_for(const FeatureMatrix &matrix, const Partition &partition) {
  std::vector<int> labels;
  labels.reserve(matrix.rows());
  for (const auto &code : matrix.languages) {
    auto it = partition.labels.find(code);
    if (it == partition.labels.end()) {
      throw Error(ErrorKind::kArgument, "partition has no label for '" + code + "'");
    }
    labels.push_back(it->second);
  }
  return labels;
}

void check_sizes(const Matrix &points, std::span<const int> labels) {
  if (points.rows() != labels.size()) {
    throw Error(ErrorKind::kArgument, "label count does not match point count");
  }
}

double comb2(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

double silhouette(const Matrix &points, std::span<const int> labels) {
  check_sizes(points, labels);
  int k = 0;
  std::vector<int> dense = dense_labels(labels, &k);
  if (k < 2) {
    throw Error(ErrorKind::kUndefinedMetric, "silhouette needs at least two clusters");
  }
  std::size_t n = points.rows();
  std::vector<std::size_t> sizes(k, 0);
  for (int l : dense) ++sizes[l];

  double total = 0.0;
  std::vector<double> dist_sum(k);
  for (std::size_t i = 0; i < n; ++i) {
    int own = dense[i];
    if (sizes[own] == 1) continue;
    std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      dist_sum[dense[j]] += std::sqrt(squared_distance(points.row(i), points.row(j)));
    }
    double a = dist_sum[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c == own) continue;
      b = std::min(b, dist_sum[c] / static_cast<double>(sizes[c]));
    }
    double denom = std::max(a, b);
    if (denom > 0) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

double silhouette(const FeatureMatrix &matrix, const Partition &partition) {
  std::vector<int> labels = labels_for(matrix, partition);
  return silhouette(matrix.values, labels);
}

double variance_ratio(const Matrix &points, std::span<const int> labels) {
  check_sizes(points, labels);
  int k = 0;
  std::vector<int> dense = dense_labels(labels, &k);
  std::size_t n = points.rows();
  if (k < 2) {
    throw Error(ErrorKind::kArgument, "variance ratio needs at least two clusters");
  }
  if (n <= static_cast<std::size_t>(k)) {
    throw Error(ErrorKind::kArgument, "variance ratio needs more points than clusters");
  }
  std::size_t d = points.cols();
  Matrix centroids(k, d);
  std::vector<double> global(d, 0.0);
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++sizes[dense[i]];
    for (std::size_t j = 0; j < d; ++j) {
      centroids(dense[i], j) += points(i, j);
      global[j] += points(i, j);
    }
  }
  for (std::size_t j = 0; j < d; ++j) global[j] /= static_cast<double>(n);
  for (int c = 0; c < k; ++c) {
    for (std::size_t j = 0; j < d; ++j) centroids(c, j) /= static_cast<double>(sizes[c]);
  }
  double bss = 0.0;
  for (int c = 0; c < k; ++c) {
    bss += static_cast<double>(sizes[c]) * squared_distance(centroids.row(c), global);
  }
  double wss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    wss += squared_distance(points.row(i), centroids.row(dense[i]));
  }
  if (wss == 0.0) return std::numeric_limits<double>::infinity();
  return (bss / static_cast<double>(k - 1)) / (wss / static_cast<double>(n - k));
}

double variance_ratio(const FeatureMatrix &matrix, const Partition &partition) {
  std::vector<int> labels = labels_for(matrix, partition);
  return variance_ratio(matrix.values, labels);
}

bool is_perfect_separation(double value) { return std::isinf(value) && value > 0; }

AlignedLabels align_partitions(const Partition &a, const Partition &b) {
  std::vector<std::string> missing;
  for (const auto &[key, label] : a.labels) {
    if (!b.labels.count(key)) missing.push_back(key + " (missing from second)");
  }
  for (const auto &[key, label] : b.labels) {
    if (!a.labels.count(key)) missing.push_back(key + " (missing from first)");
  }
  if (!missing.empty()) {
    std::string msg = "partition key sets differ:";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i];
    if (missing.size() > 20) msg += " ...";
    throw Error(ErrorKind::kArgument, msg);
  }
  return intersect_partitions(a, b);
}

AlignedLabels intersect_partitions(const Partition &a, const Partition &b) {
  AlignedLabels out;
  for (const auto &[key, label] : a.labels) {
    auto it = b.labels.find(key);
    if (it == b.labels.end()) continue;
    out.keys.push_back(key);
    out.a.push_back(label);
    out.b.push_back(it->second);
  }
  return out;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kArgument, "partitions differ in size");
  }
  std::map<std::pair<int, int>, double> table;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1;
    rows[a[i]] += 1;
    cols[b[i]] += 1;
  }
  double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto &[cell, n] : table) index += comb2(n);
  for (const auto &[label, n] : rows) sum_rows += comb2(n);
  for (const auto &[label, n] : cols) sum_cols += comb2(n);
  double pairs = comb2(static_cast<double>(a.size()));
  double expected = pairs > 0 ? sum_rows * sum_cols / pairs : 0.0;
  double max_index = (sum_rows + sum_cols) / 2.0;
  if (max_index == expected) {
    // Both partitions trivial in the same way (all singletons or one block).
    return table.size() == rows.size() && table.size() == cols.size() ? 1.0 : 0.0;
  }
  return (index - expected) / (max_index - expected);
}

double adjusted_rand_index(const Partition &a, const Partition &b) {
  AlignedLabels aligned = align_partitions(a, b);
  return adjusted_rand_index(aligned.a, aligned.b);
}

NmiNormalization parse_nmi_normalization(std::string_view text) {
  std::string t = to_lower(trim(text));
  if (t == "arithmetic") return NmiNormalization::kArithmetic;
  if (t == "geometric") return NmiNormalization::kGeometric;
  if (t == "min") return NmiNormalization::kMin;
  if (t == "max") return NmiNormalization::kMax;
  throw Error(ErrorKind::kConfig, "unknown NMI normalization '" + std::string(text) + "'");
}

double normalized_mutual_information(std::span<const int> a, std::span<const int> b,
                                     NmiNormalization norm) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kArgument, "partitions differ in size");
  }
  if (a.empty()) throw Error(ErrorKind::kArgument, "empty partitions");
  double n = static_cast<double>(a.size());
  std::map<std::pair<int, int>, double> table;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1;
    rows[a[i]] += 1;
    cols[b[i]] += 1;
  }
  auto entropy = [n](const std::map<int, double> &counts) {
    double h = 0.0;
    for (const auto &[label, c] : counts) h -= (c / n) * std::log(c / n);
    return h;
  };
  double ha = entropy(rows);
  double hb = entropy(cols);
  if (ha == 0.0 && hb == 0.0) return 1.0;
  double mi = 0.0;
  for (const auto &[cell, c] : table) {
    mi += (c / n) * std::log(n * c / (rows[cell.first] * cols[cell.second]));
  }
  double denom = 0.0;
  switch (norm) {
    case NmiNormalization::kArithmetic: denom = (ha + hb) / 2.0; break;
    case NmiNormalization::kGeometric: denom = std::sqrt(ha * hb); break;
    case NmiNormalization::kMin: denom = std::min(ha, hb); break;
    case NmiNormalization::kMax: denom = std::max(ha, hb); break;
  }
  if (denom <= 0.0) return 0.0;
  return std::clamp(mi / denom, 0.0, 1.0);
}

double normalized_mutual_information(const Partition &a, const Partition &b,
                                     NmiNormalization norm) {
  AlignedLabels aligned = align_partitions(a, b);
  return normalized_mutual_information(aligned.a, aligned.b, norm);
}

const char *divergence_name(Divergence d) {
  switch (d) {
    case Divergence::kRightDivergent: return "right_divergent";
    case Divergence::kLeftDivergent: return "left_divergent";
    case Divergence::kAligned: return "aligned";
  }
  return "aligned";
}

TrendModel fit_trend(const FeatureMatrix &matrix, double threshold) {
  if (matrix.values.cols() != 2) {
    throw Error(ErrorKind::kArgument, "trend fit needs a two-column matrix");
  }
  std::size_t n = matrix.rows();
  if (n < 2) throw Error(ErrorKind::kDegenerateFit, "trend fit needs two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += matrix.values(i, 0);
    my += matrix.values(i, 1);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = matrix.values(i, 0) - mx;
    sxx += dx * dx;
    sxy += dx * (matrix.values(i, 1) - my);
  }
  if (sxx == 0.0) {
    throw Error(ErrorKind::kDegenerateFit, "all x values are equal");
  }
  TrendModel trend;
  trend.slope = sxy / sxx;
  trend.intercept = my - trend.slope * mx;
  double ss = 0.0, y_scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double x = matrix.values(i, 0), y = matrix.values(i, 1);
    double r = y - (trend.intercept + trend.slope * x);
    trend.residuals[matrix.languages[i]] = r;
    ss += r * r;
    y_scale = std::max(y_scale, std::abs(y));
  }
  if (threshold > 0) {
    trend.threshold = threshold;
  } else {
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    // Exact fits leave only rounding noise in the residuals.
    trend.threshold = std::max(sd, 1e-9 * (1.0 + y_scale));
  }
  return trend;
}

Divergence classify_divergence(const TrendModel &trend, const std::string &language) {
  auto it = trend.residuals.find(language);
  if (it == trend.residuals.end()) {
    throw Error(ErrorKind::kArgument, "no residual for language '" + language + "'");
  }
  if (it->second < -trend.threshold) return Divergence::kRightDivergent;
  if (it->second > trend.threshold) return Divergence::kLeftDivergent;
  return Divergence::kAligned;
}

}  // namespace lodcov
