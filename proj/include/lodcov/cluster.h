#ifndef LODCOV_CLUSTER_H_
#define LODCOV_CLUSTER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lodcov/features.h"

namespace lodcov {

inline constexpr int kMaxLloydIterations = 300;
inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr int kDefaultRestarts = 10;
inline constexpr int kDefaultCategories = 6;

struct ClusterModel {
  int k = 0;
  Matrix centroids;          // k x d
  std::vector<int> assignments;
  double inertia = 0.0;
  std::uint64_t seed = 0;
  int iterations_run = 0;
  int best_restart = 0;
  // Inertia after every assignment step, one trace per restart.
  std::vector<std::vector<double>> restart_traces;

  bool operator==(const ClusterModel &) const = default;
};

// k-means++ seeding followed by Lloyd iterations, best of `restarts` runs by
// inertia. Deterministic for a given seed; ties resolve to the lowest index.
ClusterModel kmeans(const Matrix &points, int k, std::uint64_t seed = kDefaultSeed,
                    int restarts = kDefaultRestarts);
ClusterModel kmeans(const FeatureMatrix &matrix, int k,
                    std::uint64_t seed = kDefaultSeed,
                    int restarts = kDefaultRestarts);

double squared_distance(std::span<const double> a, std::span<const double> b);

enum class CategorizationMethod { kKMeans, kQuantile };

struct Categorization {
  std::map<std::string, int> labels;  // wals_code -> category
  CategorizationMethod method = CategorizationMethod::kKMeans;
  std::optional<std::vector<double>> boundaries;
  // Raw cluster index -> ordered category (-1 for a cluster left empty).
  std::vector<int> category_order;

  int num_categories() const;
  bool operator==(const Categorization &) const = default;
};

// Relabels clusters by ascending centroid mean. Languages in `zero_group`
// take category 0 and the clusters start at 1.
Categorization order_categories(const ClusterModel &model, const FeatureMatrix &matrix,
                                const std::vector<std::string> &zero_group = {});

// Label = number of j/n quantile boundaries (linear interpolation) strictly
// below the score, compacted so that used categories are contiguous.
Categorization quantile_categorize(const std::map<std::string, double> &scores,
                                   int num_categories);

// Linear-interpolation empirical quantile of sorted values, p in [0,1].
double quantile_sorted(const std::vector<double> &sorted, double p);

struct KMeansCategorization {
  Categorization categorization;
  std::optional<ClusterModel> model;  // absent when nothing was clustered
  std::vector<std::string> zero_group;
};

// Zero-coverage languages form category 0; the remaining rows are clustered
// into k-1 groups (k groups when there is no zero-coverage language), so
// exactly k categories come out whenever the data allow it.
KMeansCategorization categorize_kmeans(const FeatureMatrix &matrix, int k,
                                       std::uint64_t seed = kDefaultSeed,
                                       int restarts = kDefaultRestarts);

}  // namespace lodcov

#endif  // LODCOV_CLUSTER_H_
