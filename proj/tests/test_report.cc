#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>

#include "lodcov/commands.h"
#include "lodcov/csv.h"
#include "lodcov/error.h"
#include "oracles.h"

using namespace lodcov;
namespace fs = std::filesystem;

namespace {

std::string temp_path(const std::string &name) {
  return (fs::temp_directory_path() / ("lodcov_report_" + name)).string();
}

std::string write_temp(const std::string &name, const std::string &content) {
  std::string path = temp_path(name);
  std::ofstream(path) << content;
  return path;
}

// Catalog l00..lNN with identity mappings, plus wikipedia and kg records.
struct Synthetic {
  Workspace ws;
  CoverageSnapshot snapshot;
};

Synthetic synthetic(const std::vector<std::pair<std::uint64_t, std::uint64_t>> &counts) {
  Synthetic s;
  std::vector<Languoid> ls;
  std::vector<CodeMapping> maps;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    Languoid l;
    l.wals_code = (i < 10 ? "l0" : "l") + std::to_string(i);
    l.name = "Language " + std::to_string(i);
    ls.push_back(l);
    maps.push_back({l.wals_code, l.wals_code, MappingConfidence::kExact});
    s.snapshot.records.push_back({l.wals_code, "wikipedia", counts[i].first, std::nullopt, std::nullopt});
    s.snapshot.records.push_back({l.wals_code, "kg", std::nullopt, counts[i].second, std::nullopt});
  }
  s.ws.catalog = Catalog(ls);
  s.ws.mappings = MappingTable(s.ws.catalog, maps);
  s.snapshot.retrieved_at = "2025-01-01T00:00:00Z";
  return s;
}

RunConfig config(int k) {
  RunConfig cfg;
  cfg.k = k;
  cfg.quantile_categories = k;
  return cfg;
}

}  // namespace

TEST_CASE("two obvious strata give a high silhouette") {
  std::mt19937_64 g(8);
  std::uniform_int_distribution<std::uint64_t> low(10, 14), high(900000, 1100000);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> counts;
  for (int i = 0; i < 20; ++i) {
    counts.push_back(i < 10 ? std::pair{low(g), low(g)} : std::pair{high(g), high(g)});
  }
  Synthetic s = synthetic(counts);
  ReportBundle b = run_profile(config(2), s.snapshot, s.ws);
  REQUIRE(b.runs.size() == 1);
  const ProfileRun &run = b.runs[0];
  REQUIRE(run.silhouette);
  CHECK(*run.silhouette > 0.5);

  oracle::Points pts;
  std::vector<int> labels;
  for (std::size_t i = 0; i < run.matrix.rows(); ++i) {
    pts.push_back({run.matrix.values(i, 0), run.matrix.values(i, 1)});
    labels.push_back(run.kmeans.categorization.labels.at(run.matrix.languages[i]));
  }
  CHECK(*run.silhouette == doctest::Approx(oracle::silhouette(pts, labels)).epsilon(1e-12));
}

TEST_CASE("all-zero coverage puts everything in category 0") {
  Synthetic s = synthetic({{0, 0}, {0, 0}, {0, 0}, {0, 0}});
  ReportBundle b = run_profile(config(6), s.snapshot, s.ws);
  const ProfileRun &run = b.runs[0];
  for (const auto &[code, label] : run.kmeans.categorization.labels) CHECK(label == 0);
  Table scatter = Table::parse(scatter_csv(run, b));
  for (const auto &row : scatter.rows()) CHECK(row[3] == "0");
  CHECK_FALSE(run.silhouette);
  CHECK_FALSE(run.notes.empty());
}

TEST_CASE("every language appears once per table") {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> counts;
  for (std::uint64_t i = 0; i < 30; ++i) counts.push_back({i % 4 == 0 ? 0 : i * i * 100, i % 4 == 0 ? 0 : i * 37});
  Synthetic s = synthetic(counts);
  ReportBundle b = run_profile(config(4), s.snapshot, s.ws);
  const ProfileRun &run = b.runs[0];
  for (const std::string &text : {categorization_csv(run, b), scatter_csv(run, b), divergence_csv(run)}) {
    Table t = Table::parse(text);
    std::set<std::string> codes;
    for (const auto &row : t.rows()) CHECK(codes.insert(row[0]).second);
    CHECK(codes.size() == 30);
  }
  Table div = Table::parse(divergence_csv(run));
  for (const auto &row : div.rows()) {
    bool zero = std::stoi(row[0].substr(1)) % 4 == 0;
    CHECK((row[2] == "zero_coverage") == zero);
    CHECK(row[1].empty() == zero);
  }
}

TEST_CASE("metrics JSON and HTML") {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> counts;
  for (std::uint64_t i = 0; i < 24; ++i) counts.push_back({i < 8 ? 0 : i * 1000, i < 8 ? 0 : i * 500});
  Synthetic s = synthetic(counts);
  ReportBundle b = run_profile(config(6), s.snapshot, s.ws);
  b.class_names = {{0, "0 Left-Behinds"}, {5, "5 Winners"}};
  auto doc = nlohmann::json::parse(metrics_json(b));
  CHECK(doc["runs"]["kg"]["kmeans_categories"] == 6);
  CHECK(doc["runs"]["kg"]["zero_coverage"] == 8);
  std::string html = report_html(b);
  CHECK(html.find("<svg") != std::string::npos);
  CHECK(html.find("0 Left-Behinds") != std::string::npos);
  CHECK(html.find("5 Winners") != std::string::npos);
  CHECK(html.find("http://") == html.find("http://www.w3.org/2000/svg"));
  CHECK(html.find("<script src") == std::string::npos);

  std::string dir = temp_path("bundle");
  fs::remove_all(dir);
  auto written = write_report_bundle(b, dir);
  CHECK(fs::exists(fs::path(dir) / "categorization_kg.csv"));
  CHECK(fs::exists(fs::path(dir) / "metrics.json"));
  CHECK(written.size() == 5);
}

TEST_CASE("labelled languages and comparison") {
  Synthetic s = synthetic({{1, 1}, {2, 2}, {3, 3}, {4, 4}});
  MappingTable extra(s.ws.catalog, {{"l00", "l00", MappingConfidence::kExact},
                                    {"xa", "l01", MappingConfidence::kManual}});
  std::string ref = write_temp("ref.csv", "code,class,class_name\nl00,0,0 Left-Behinds\nxa,5,5 Winners\nzz,3,3 Rising Stars\n");
  ReferenceTaxonomy tax = load_labelled_languages(ref, &s.ws.catalog, &extra);
  CHECK(tax.partition.labels.size() == 2);
  CHECK(tax.partition.labels.at("l01") == 5);
  CHECK(tax.unresolved == 1);
  CHECK(tax.class_names.at(5) == "5 Winners");

  Partition a{{{"a", 0}, {"b", 0}, {"c", 1}, {"d", 1}}};
  Partition shifted{{{"a", 4}, {"b", 4}, {"c", 2}, {"d", 2}, {"e", 1}}};
  PartitionComparison c = compare_partitions(a, shifted, NmiNormalization::kArithmetic);
  CHECK(c.ari == 1.0);
  CHECK(c.nmi == doctest::Approx(1.0));
  CHECK(c.intersection == 4);
  CHECK(c.coverage_ratio == 1.0);
  Partition disjoint{{{"x", 0}}};
  try {
    compare_partitions(a, disjoint, NmiNormalization::kArithmetic);
    FAIL("expected empty intersection");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kEmptyIntersection);
  }
}

TEST_CASE("hand-built contingency matches the oracle") {
  Partition found{{{"a", 0}, {"b", 0}, {"c", 1}, {"d", 1}, {"e", 1}, {"f", 2}, {"g", 2}, {"h", 0}}};
  Partition ref{{{"a", 0}, {"b", 1}, {"c", 1}, {"d", 1}, {"e", 2}, {"f", 2}, {"g", 2}, {"h", 0}}};
  PartitionComparison c = compare_partitions(found, ref, NmiNormalization::kArithmetic);
  std::vector<int> x, y;
  for (const auto &[k, v] : found.labels) {
    x.push_back(v);
    y.push_back(ref.labels.at(k));
  }
  CHECK(c.ari == doctest::Approx(oracle::ari(x, y)).epsilon(1e-12));
  CHECK(c.nmi == doctest::Approx(oracle::nmi(x, y)).epsilon(1e-12));
}
