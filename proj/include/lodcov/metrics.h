#ifndef LODCOV_METRICS_H_
#define LODCOV_METRICS_H_

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lodcov/features.h"

namespace lodcov {

// Language -> label. Labels need not be contiguous.
struct Partition {
  std::map<std::string, int> labels;
};

// Average silhouette over all points, Euclidean distance. Points in
// singleton clusters score 0. Needs at least two clusters.
double silhouette(const Matrix &points, std::span<const int> labels);
double silhouette(const FeatureMatrix &matrix, const Partition &partition);

// Calinski-Harabasz ratio (BSS/(k-1)) / (WSS/(n-k)). Returns +infinity when
// every cluster is collapsed to a point (WSS = 0).
double variance_ratio(const Matrix &points, std::span<const int> labels);
double variance_ratio(const FeatureMatrix &matrix, const Partition &partition);

bool is_perfect_separation(double variance_ratio_value);

double adjusted_rand_index(std::span<const int> a, std::span<const int> b);
double adjusted_rand_index(const Partition &a, const Partition &b);

enum class NmiNormalization { kArithmetic, kGeometric, kMin, kMax };

NmiNormalization parse_nmi_normalization(std::string_view text);

// I(a;b) divided by the chosen mean of H(a) and H(b), natural logs.
double normalized_mutual_information(
    std::span<const int> a, std::span<const int> b,
    NmiNormalization norm = NmiNormalization::kArithmetic);
double normalized_mutual_information(
    const Partition &a, const Partition &b,
    NmiNormalization norm = NmiNormalization::kArithmetic);

// Labels of both partitions aligned on their (identical) key sets. A key-set
// mismatch is an argument error listing the offending keys.
struct AlignedLabels {
  std::vector<std::string> keys;
  std::vector<int> a;
  std::vector<int> b;
};
AlignedLabels align_partitions(const Partition &a, const Partition &b);

// Restriction of both partitions to their common keys.
AlignedLabels intersect_partitions(const Partition &a, const Partition &b);

enum class Divergence { kRightDivergent, kLeftDivergent, kAligned };

const char *divergence_name(Divergence d);

struct TrendModel {
  double slope = 0.0;
  double intercept = 0.0;
  std::map<std::string, double> residuals;  // observed y - fitted y
  double threshold = 0.0;
};

// Ordinary least squares of column 1 (KG, y) on column 0 (Wikipedia, x).
// The divergence threshold defaults to the sample standard deviation of the
// residuals; pass a positive value to override.
TrendModel fit_trend(const FeatureMatrix &matrix, double threshold = 0.0);

Divergence classify_divergence(const TrendModel &trend, const std::string &language);

}  // namespace lodcov

#endif  // LODCOV_METRICS_H_
