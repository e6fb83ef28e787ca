#include "lodcov/cluster.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "lodcov/error.h"

namespace lodcov {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform in [0, 1) from the top 53 bits; avoids the implementation-defined
// std::uniform_real_distribution so results match across standard libraries.
double unit_uniform(std::mt19937_64 &gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

struct Lloyd {
  const Matrix &points;
  int k;
  Matrix centroids;
  std::vector<int> assignments;
  std::vector<double> trace;

  Lloyd(const Matrix &p, int k_) : points(p), k(k_), centroids(k_, p.cols()) {}

  void seed_plus_plus(std::mt19937_64 &gen) {
    std::size_t n = points.rows();
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    std::vector<bool> chosen(n, false);
    std::size_t first = std::min(n - 1, static_cast<std::size_t>(unit_uniform(gen) * n));
    auto take = [&](int c, std::size_t i) {
      chosen[i] = true;
      auto src = points.row(i);
      std::copy(src.begin(), src.end(), centroids.row(c).begin());
      for (std::size_t j = 0; j < n; ++j) {
        d2[j] = std::min(d2[j], squared_distance(points.row(j), src));
      }
    };
    take(0, first);
    for (int c = 1; c < k; ++c) {
      double total = 0.0;
      for (double v : d2) total += v;
      std::size_t pick = n;
      if (total > 0) {
        double target = unit_uniform(gen) * total;
        double cum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (d2[j] <= 0) continue;
          cum += d2[j];
          pick = j;
          if (cum > target) break;
        }
      } else {
        // Every point coincides with a centroid; fall back to index order.
        for (std::size_t j = 0; j < n && pick == n; ++j) {
          if (!chosen[j]) pick = j;
        }
      }
      take(c, pick);
    }
  }

  // Returns true if any assignment changed.
  bool assign() {
    bool changed = assignments.empty();
    assignments.resize(points.rows(), -1);
    double inertia = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
      int best = 0;
      double best_d = squared_distance(points.row(i), centroids.row(0));
      for (int c = 1; c < k; ++c) {
        double d = squared_distance(points.row(i), centroids.row(c));
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assignments[i] != best) changed = true;
      assignments[i] = best;
      inertia += best_d;
    }
    trace.push_back(inertia);
    return changed;
  }

  void update() {
    std::size_t d = points.cols();
    Matrix sums(k, d);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.rows(); ++i) {
      int c = assignments[i];
      ++counts[c];
      auto row = points.row(i);
      for (std::size_t j = 0; j < d; ++j) sums(c, j) += row[j];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t j = 0; j < d; ++j) {
        centroids(c, j) = sums(c, j) / static_cast<double>(counts[c]);
      }
    }
    // Empty clusters take the point farthest from its current centroid.
    for (int c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = points.rows();
      double far_d = -1.0;
      for (std::size_t i = 0; i < points.rows(); ++i) {
        if (counts[assignments[i]] < 2) continue;
        double dist = squared_distance(points.row(i), centroids.row(assignments[i]));
        if (dist > far_d) {
          far_d = dist;
          far = i;
        }
      }
      if (far == points.rows()) break;
      --counts[assignments[far]];
      assignments[far] = c;
      counts[c] = 1;
      auto src = points.row(far);
      std::copy(src.begin(), src.end(), centroids.row(c).begin());
    }
  }

  int run() {
    assign();
    int iterations = 0;
    while (iterations < kMaxLloydIterations) {
      ++iterations;
      update();
      if (!assign()) break;
    }
    return iterations;
  }
};

}  // namespace

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

ClusterModel kmeans(const Matrix &points, int k, std::uint64_t seed, int restarts) {
  if (k <= 0) throw Error(ErrorKind::kArgument, "k must be positive");
  if (restarts < 1) throw Error(ErrorKind::kArgument, "restarts must be >= 1");
  if (points.rows() < static_cast<std::size_t>(k)) {
    throw Error(ErrorKind::kInsufficientData,
                std::to_string(points.rows()) + " rows cannot form " +
                    std::to_string(k) + " clusters");
  }

  ClusterModel best;
  best.inertia = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> traces;
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 gen(splitmix64(seed + static_cast<std::uint64_t>(r)));
    Lloyd lloyd(points, k);
    lloyd.seed_plus_plus(gen);
    int iterations = lloyd.run();
    double inertia = lloyd.trace.back();
    traces.push_back(lloyd.trace);
    if (inertia < best.inertia) {
      best.k = k;
      best.centroids = std::move(lloyd.centroids);
      best.assignments = std::move(lloyd.assignments);
      best.inertia = inertia;
      best.iterations_run = iterations;
      best.best_restart = r;
    }
  }
  best.seed = seed;
  best.restart_traces = std::move(traces);
  return best;
}

ClusterModel kmeans(const FeatureMatrix &matrix, int k, std::uint64_t seed,
                    int restarts) {
  return kmeans(matrix.values, k, seed, restarts);
}

int Categorization::num_categories() const {
  std::set<int> used;
  for (const auto &[code, label] : labels) used.insert(label);
  return static_cast<int>(used.size());
}

Categorization order_categories(const ClusterModel &model, const FeatureMatrix &matrix,
                                const std::vector<std::string> &zero_group) {
  Categorization cat;
  cat.method = CategorizationMethod::kKMeans;

  std::vector<std::size_t> sizes(model.k, 0);
  for (int a : model.assignments) ++sizes[a];
  std::vector<double> means(model.k, 0.0);
  for (int c = 0; c < model.k; ++c) {
    auto row = model.centroids.row(c);
    for (double v : row) means[c] += v;
    if (!row.empty()) means[c] /= static_cast<double>(row.size());
  }
  std::vector<int> order(model.k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return means[a] < means[b]; });

  int offset = zero_group.empty() ? 0 : 1;
  cat.category_order.assign(model.k, -1);
  int next = offset;
  for (int raw : order) {
    if (sizes[raw] > 0) cat.category_order[raw] = next++;
  }
  for (const auto &code : zero_group) cat.labels[code] = 0;
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    cat.labels[matrix.languages[i]] = cat.category_order[model.assignments[i]];
  }
  return cat;
}

double quantile_sorted(const std::vector<double> &sorted, double p) {
  if (sorted.empty()) throw Error(ErrorKind::kArgument, "quantile of empty data");
  double h = static_cast<double>(sorted.size() - 1) * p;
  auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

Categorization quantile_categorize(const std::map<std::string, double> &scores,
                                   int num_categories) {
  if (num_categories < 1) {
    throw Error(ErrorKind::kArgument, "num_categories must be >= 1");
  }
  if (scores.empty()) throw Error(ErrorKind::kArgument, "no scores to categorize");
  std::vector<double> sorted;
  for (const auto &[code, s] : scores) {
    if (!std::isfinite(s)) {
      throw Error(ErrorKind::kArgument, "non-finite score for '" + code + "'");
    }
    sorted.push_back(s);
  }
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> boundaries;
  for (int j = 1; j < num_categories; ++j) {
    boundaries.push_back(quantile_sorted(
        sorted, static_cast<double>(j) / static_cast<double>(num_categories)));
  }

  std::map<std::string, int> raw;
  std::set<int> used;
  for (const auto &[code, s] : scores) {
    int label = static_cast<int>(
        std::lower_bound(boundaries.begin(), boundaries.end(), s) - boundaries.begin());
    raw[code] = label;
    used.insert(label);
  }
  // Tied boundaries can leave raw labels unused; compact them.
  std::vector<int> dense(num_categories, -1);
  int next = 0;
  for (int label : used) dense[label] = next++;

  Categorization cat;
  cat.method = CategorizationMethod::kQuantile;
  cat.boundaries = boundaries;
  cat.category_order = dense;
  for (const auto &[code, label] : raw) cat.labels[code] = dense[label];
  return cat;
}

KMeansCategorization categorize_kmeans(const FeatureMatrix &matrix, int k,
                                       std::uint64_t seed, int restarts) {
  if (k <= 0) throw Error(ErrorKind::kArgument, "k must be positive");
  KMeansCategorization out;
  ZeroCoverageSplit split = partition_zero_coverage(matrix);
  out.zero_group = split.zero_group;
  int clusters = split.zero_group.empty() ? k : k - 1;

  if (split.active.empty() || clusters == 0) {
    out.categorization.method = CategorizationMethod::kKMeans;
    for (const auto &code : matrix.languages) out.categorization.labels[code] = 0;
    return out;
  }
  ClusterModel model = kmeans(split.active, clusters, seed, restarts);
  out.categorization = order_categories(model, split.active, split.zero_group);
  out.model = std::move(model);
  return out;
}

}  // namespace lodcov
