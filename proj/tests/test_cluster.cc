#include <doctest.h>

#include <random>

#include "lodcov/cluster.h"
#include "lodcov/error.h"
#include "lodcov/metrics.h"
#include "oracles.h"

using namespace lodcov;

namespace {

struct Blobs {
  Matrix points;
  std::vector<int> truth;
};

Blobs blobs(std::uint64_t seed, int per_blob, const std::vector<std::vector<double>> &centers,
            double sigma) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<std::vector<double>> rows;
  Blobs b;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (int i = 0; i < per_blob; ++i) {
      std::vector<double> p = centers[c];
      for (auto &v : p) v += noise(gen);
      rows.push_back(p);
      b.truth.push_back(static_cast<int>(c));
    }
  }
  b.points = Matrix::from_rows(rows);
  return b;
}

FeatureMatrix feature_matrix(const std::vector<std::string> &codes,
                             const std::vector<std::vector<double>> &rows) {
  FeatureMatrix m;
  m.languages = codes;
  m.values = Matrix::from_rows(rows);
  for (const auto &r : rows) {
    bool zero = true;
    for (double v : r) zero = zero && v == 0.0;
    m.zero_coverage_mask.push_back(zero);
  }
  return m;
}

}  // namespace

TEST_CASE("identical points with k=1") {
  Matrix m = Matrix::from_rows({{3, 4}, {3, 4}, {3, 4}});
  ClusterModel model = kmeans(m, 1);
  CHECK(model.inertia == 0.0);
  CHECK(model.centroids(0, 0) == 3.0);
  CHECK(model.centroids(0, 1) == 4.0);
}

TEST_CASE("two separated blobs are recovered") {
  Blobs b = blobs(1, 10, {{0, 0}, {100, 100}}, 1.0);
  ClusterModel model = kmeans(b.points, 2, 42, 10);
  CHECK(adjusted_rand_index(model.assignments, b.truth) == 1.0);
}

TEST_CASE("argument checks") {
  Matrix m = Matrix::from_rows({{1}, {2}});
  CHECK_THROWS_AS(kmeans(m, 0), Error);
  CHECK_THROWS_AS(kmeans(m, 1, 42, 0), Error);
  try {
    kmeans(m, 3);
    FAIL("k above n must fail");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kInsufficientData);
  }
  try {
    kmeans(Matrix(), 1);
    FAIL("empty input must fail");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kInsufficientData);
  }
}

TEST_CASE("same seed gives the same model") {
  Blobs b = blobs(9, 15, {{0, 0}, {5, 5}, {0, 9}}, 2.0);
  CHECK(kmeans(b.points, 3, 7, 5) == kmeans(b.points, 3, 7, 5));
}

TEST_CASE("inertia traces never increase and the best restart is reported") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Blobs b = blobs(seed, 12, {{0, 0}, {3, 1}, {1, 4}, {6, 6}}, 1.5);
    ClusterModel model = kmeans(b.points, 4, seed, 6);
    REQUIRE(model.restart_traces.size() == 6);
    double best = 1e300;
    for (const auto &trace : model.restart_traces) {
      REQUIRE(!trace.empty());
      for (std::size_t i = 1; i < trace.size(); ++i) REQUIRE(trace[i] <= trace[i - 1]);
      best = std::min(best, trace.back());
    }
    CHECK(model.inertia == best);
    CHECK(model.restart_traces[model.best_restart].back() == model.inertia);
  }
}

TEST_CASE("inertia equals the sum of squared distances to assigned centroids") {
  Blobs b = blobs(3, 10, {{0, 0, 0}, {4, 0, 1}}, 1.0);
  ClusterModel model = kmeans(b.points, 2, 1, 3);
  double sum = 0;
  for (std::size_t i = 0; i < b.points.rows(); ++i) {
    sum += squared_distance(b.points.row(i), model.centroids.row(model.assignments[i]));
  }
  CHECK(sum == doctest::Approx(model.inertia).epsilon(1e-12));
}

TEST_CASE("category ordering by centroid mean") {
  FeatureMatrix m = feature_matrix({"a", "b", "c", "d"}, {{9, 9}, {9, 9}, {2, 2}, {2, 2}});
  ClusterModel model = kmeans(m, 2);
  Categorization c = order_categories(model, m);
  CHECK(c.labels["c"] == 0);
  CHECK(c.labels["a"] == 1);

  ClusterModel single = kmeans(m, 1);
  Categorization s = order_categories(single, m);
  for (const auto &[code, label] : s.labels) CHECK(label == 0);
}

TEST_CASE("six clusters are numbered by rank of their means") {
  std::vector<double> means{7, 1, 11, 3, 5, 9};
  std::vector<std::string> codes;
  std::vector<std::vector<double>> rows;
  for (std::size_t c = 0; c < means.size(); ++c) {
    for (int i = 0; i < 3; ++i) {
      codes.push_back("c" + std::to_string(c) + "_" + std::to_string(i));
      rows.push_back({means[c] * 10 + i * 0.01, means[c] * 10});
    }
  }
  FeatureMatrix m = feature_matrix(codes, rows);
  ClusterModel model = kmeans(m, 6, 42, 10);
  Categorization cat = order_categories(model, m);
  std::vector<double> sorted = means;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t c = 0; c < means.size(); ++c) {
    int rank = static_cast<int>(std::find(sorted.begin(), sorted.end(), means[c]) - sorted.begin());
    for (int i = 0; i < 3; ++i) {
      CHECK(cat.labels["c" + std::to_string(c) + "_" + std::to_string(i)] == rank);
    }
  }
}

TEST_CASE("quantile categories on scores 1..10") {
  std::map<std::string, double> scores;
  for (int i = 1; i <= 10; ++i) scores["l" + std::to_string(i)] = i;
  Categorization c = quantile_categorize(scores, 5);
  for (int i = 1; i <= 10; ++i) CHECK(c.labels["l" + std::to_string(i)] == (i - 1) / 2);
  REQUIRE(c.boundaries);
  std::vector<double> values;
  for (int i = 1; i <= 10; ++i) values.push_back(i);
  for (int j = 1; j < 5; ++j) {
    CHECK((*c.boundaries)[j - 1] == doctest::Approx(oracle::quantile(values, j / 5.0)));
  }
}

TEST_CASE("quantile degenerate inputs") {
  std::map<std::string, double> equal{{"a", 2}, {"b", 2}, {"c", 2}};
  Categorization c = quantile_categorize(equal, 4);
  for (const auto &[code, label] : c.labels) CHECK(label == 0);
  for (double b : *c.boundaries) CHECK(b == 2.0);

  Categorization s = quantile_categorize({{"x", 5.0}}, 6);
  CHECK(s.labels["x"] == 0);
  CHECK_THROWS_AS(quantile_categorize(equal, 0), Error);
}

TEST_CASE("quantile labels stay contiguous with tied boundaries") {
  std::mt19937_64 gen(17);
  std::uniform_int_distribution<int> small(0, 3);
  for (int round = 0; round < 100; ++round) {
    std::map<std::string, double> scores;
    int n = 1 + round % 13;
    for (int i = 0; i < n; ++i) scores["l" + std::to_string(i)] = small(gen);
    Categorization c = quantile_categorize(scores, 1 + round % 6);
    std::set<int> used;
    for (const auto &[code, label] : c.labels) used.insert(label);
    int expect = 0;
    for (int l : used) REQUIRE(l == expect++);
    // Order preserving.
    for (const auto &[a, sa] : scores) {
      for (const auto &[b, sb] : scores) {
        if (sa < sb) REQUIRE(c.labels[a] <= c.labels[b]);
        if (sa == sb) REQUIRE(c.labels[a] == c.labels[b]);
      }
    }
  }
}

TEST_CASE("zero-coverage rows form category 0 and k categories are emitted") {
  std::mt19937_64 gen(4);
  std::lognormal_distribution<double> skew(2.0, 1.0);
  std::vector<std::string> codes;
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 60; ++i) {
    codes.push_back("l" + std::to_string(100 + i));
    if (i % 3 == 0) {
      rows.push_back({0, 0});
    } else {
      rows.push_back({skew(gen), skew(gen)});
    }
  }
  FeatureMatrix m = feature_matrix(codes, rows);
  KMeansCategorization kc = categorize_kmeans(m, 6);
  CHECK(kc.categorization.num_categories() == 6);
  CHECK(kc.zero_group.size() == 20);
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (m.zero_coverage_mask[i]) {
      CHECK(kc.categorization.labels[codes[i]] == 0);
    } else {
      CHECK(kc.categorization.labels[codes[i]] >= 1);
    }
  }
}

TEST_CASE("all rows zero skips clustering") {
  FeatureMatrix m = feature_matrix({"a", "b", "c"}, {{0, 0}, {0, 0}, {0, 0}});
  KMeansCategorization kc = categorize_kmeans(m, 6);
  CHECK_FALSE(kc.model.has_value());
  for (const auto &[code, label] : kc.categorization.labels) CHECK(label == 0);
}

TEST_CASE("no zero rows clusters into k groups") {
  FeatureMatrix m = feature_matrix({"a", "b", "c", "d"}, {{1, 1}, {1.1, 1}, {8, 8}, {8, 8.2}});
  KMeansCategorization kc = categorize_kmeans(m, 2);
  CHECK(kc.zero_group.empty());
  CHECK(kc.categorization.labels["a"] == 0);
  CHECK(kc.categorization.labels["d"] == 1);
}
