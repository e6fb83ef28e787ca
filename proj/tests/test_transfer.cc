#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <random>

#include "lodcov/error.h"
#include "lodcov/transfer.h"

using namespace lodcov;

namespace {

Languoid lang(std::string code, std::string family, std::string genus, std::string area) {
  Languoid l;
  l.wals_code = std::move(code);
  l.name = l.wals_code;
  l.family = std::move(family);
  l.genus = std::move(genus);
  l.macroarea = std::move(area);
  return l;
}

std::string temp_file(const std::string &name, const std::string &content) {
  auto path = std::filesystem::temp_directory_path() / ("lodcov_transfer_" + name);
  std::ofstream(path) << content;
  return path.string();
}

AlignmentRecord record(std::vector<std::string> a, std::vector<std::string> b) {
  AlignmentRecord r;
  r.source_kg = "kg";
  r.entity_a = "x";
  r.entity_b = "y";
  r.lang_a = "en";
  r.lang_b = "fr";
  r.relations_a = std::move(a);
  r.relations_b = std::move(b);
  return r;
}

}  // namespace

TEST_CASE("ranking sorts, truncates and breaks ties by code") {
  std::vector<Candidate> pool{{"c", 1}, {"a", 5}, {"b", 3}};
  auto top = rank_candidates(pool, "t", 2);
  REQUIRE(top.size() == 2);
  CHECK(top[0].language == "a");
  CHECK(top[1].language == "b");
  CHECK(rank_candidates(pool, "t", 10).size() == 3);
  auto tie = rank_candidates({{"zz", 2}, {"aa", 2}, {"t", 9}}, "t", 5);
  REQUIRE(tie.size() == 2);
  CHECK(tie[0].language == "aa");
  CHECK(tie[1].language == "zz");
}

TEST_CASE("proximity plan puts the same-genus language first") {
  Catalog c({lang("nap", "Indo-European", "Romance", "Eurasia"),
             lang("lad", "Indo-European", "Romance", "Eurasia"),
             lang("ger", "Indo-European", "Germanic", "Eurasia"),
             lang("tur", "Altaic", "Turkic", "Eurasia")});
  TransferPlan plan = select_by_proximity("nap", c, {0, 1, 0, 0}, 3);
  REQUIRE(plan.candidates.size() == 3);
  CHECK(plan.candidates[0].language == "lad");
  CHECK(plan.candidates[0].score == 1.0);
  CHECK(plan.candidates[1].score == 0.0);
  CHECK_THROWS_AS(select_by_proximity("nap", c, {0, 1, 0, 0}, 0), Error);
  CHECK_THROWS_AS(select_by_proximity("zzz", c, {0, 1, 0, 0}, 3), Error);

  Catalog alone({lang("nap", "Indo-European", "Romance", "Eurasia")});
  CHECK(select_by_proximity("nap", alone, {}, 3).candidates.empty());
}

TEST_CASE("alignment volume plans") {
  AlignmentStats stats;
  stats.add("kg", "en", "tgt", 100);
  stats.add("kg", "fr", "tgt", 40);
  TransferPlan plan = select_by_alignment_volume("tgt", stats, 5);
  REQUIRE(plan.candidates.size() == 2);
  CHECK(plan.candidates[0].language == "en");
  CHECK(plan.candidates[1].language == "fr");
  CHECK(select_by_alignment_volume("none", stats, 5).candidates.empty());

  AlignmentStats flipped;
  flipped.add("kg", "tgt", "en", 100);
  flipped.add("kg", "tgt", "fr", 40);
  CHECK(select_by_alignment_volume("tgt", flipped, 5).candidates == plan.candidates);
  CHECK(flipped.count("kg", "en", "tgt") == 100);
  flipped.add("other", "en", "tgt", 5);
  CHECK(flipped.total("tgt", "en") == 105);
}

TEST_CASE("coverage plan") {
  Catalog c({lang("aaa", "F", "G", "M"), lang("bbb", "F", "G", "M"), lang("ccc", "F", "G", "M")});
  MappingTable m(c, {{"a", "aaa", MappingConfidence::kExact},
                     {"b", "bbb", MappingConfidence::kExact},
                     {"c", "ccc", MappingConfidence::kExact}});
  CoverageSnapshot s;
  for (auto [code, n] : std::vector<std::pair<std::string, std::uint64_t>>{{"a", 5}, {"b", 300}, {"c", 20}}) {
    CoverageRecord r;
    r.language = code;
    r.source_id = "kg";
    r.entity_count = n;
    s.records.push_back(r);
  }
  TransferPlan plan = select_by_coverage("aaa", s, c, m, 5);
  REQUIRE(plan.candidates.size() == 2);
  CHECK(plan.candidates[0].language == "bbb");
  CHECK(plan.candidates[0].score == doctest::Approx(std::log1p(300.0)));
}

TEST_CASE("combined plan averages reciprocal positions") {
  TransferPlan p1{"t", TransferStrategy::kProximity, {{"a", 3}, {"b", 2}, {"c", 1}}, {}};
  TransferPlan p2{"t", TransferStrategy::kCoverage, {{"b", 9}, {"a", 8}}, {}};
  TransferPlan combined = combine_plans("t", {p1, p2}, 3);
  REQUIRE(combined.candidates.size() == 3);
  // a: (1 + 1/2)/2, b: (1/2 + 1)/2, c: (1/3)/2; a and b tie, broken by code.
  CHECK(combined.candidates[0].language == "a");
  CHECK(combined.candidates[0].score == doctest::Approx(0.75));
  CHECK(combined.candidates[2].language == "c");
  CHECK(combined.candidates[2].score == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("plan JSON") {
  TransferPlan p{"nap", TransferStrategy::kProximity, {{"lad", 1.0}}, {{"weights", "genus"}}};
  auto doc = nlohmann::json::parse(plan_to_json(p));
  CHECK(doc["target"] == "nap");
  CHECK(doc["strategy"] == "proximity");
  CHECK(doc["candidates"][0]["language"] == "lad");
  CHECK(parse_strategy("alignment") == TransferStrategy::kAlignmentVolume);
  CHECK_THROWS_AS(parse_strategy("magic"), Error);
}

TEST_CASE("label entropy and the ln 2 example") {
  CHECK(label_entropy({}) == 0.0);
  CHECK(label_entropy({"r", "r"}) == 0.0);
  CHECK(label_entropy({"a", "b"}) == doctest::Approx(std::log(2.0)));
  EntropyIncreaseRule rule;
  CHECK(rule.noise_increase(record({"r1", "r1"}, {"r2", "r2"})) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(rule.noise_increase(record({"a", "b"}, {"b", "a"})) == doctest::Approx(0.0));

  CurationResult at_half = curate_alignments({record({"r1", "r1"}, {"r2", "r2"})}, 0.5);
  CHECK(at_half.kept.empty());
  REQUIRE(at_half.excluded.size() == 1);
  CHECK(at_half.excluded[0].reason == ExclusionReason::kNoiseIncrease);
  CHECK(curate_alignments({record({"r1", "r1"}, {"r2", "r2"})}, 0.7).kept.size() == 1);

  CurationResult same = curate_alignments({record({"p", "q"}, {"p", "q"})}, 0.0);
  CHECK(same.kept.size() == 1);
  CurationResult inf = curate_alignments({record({"r1"}, {"r2", "r3"})},
                                         std::numeric_limits<double>::infinity());
  CHECK(inf.kept.size() == 1);
  CurationResult empty = curate_alignments({record({}, {})}, 10.0);
  REQUIRE(empty.excluded.size() == 1);
  CHECK(empty.excluded[0].reason == ExclusionReason::kNoEvidence);
}

TEST_CASE("curation conserves records and is threshold monotone") {
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<int> len(0, 5), label(0, 3);
  std::uniform_real_distribution<double> thr(0.0, 1.5);
  for (int round = 0; round < 50; ++round) {
    std::vector<AlignmentRecord> records;
    for (int i = 0; i < 20; ++i) {
      std::vector<std::string> a, b;
      for (int j = len(gen); j > 0; --j) a.push_back("r" + std::to_string(label(gen)));
      for (int j = len(gen); j > 0; --j) b.push_back("r" + std::to_string(label(gen)));
      records.push_back(record(a, b));
      records.back().entity_a = "e" + std::to_string(i);
    }
    double t1 = thr(gen), t2 = thr(gen);
    if (t1 > t2) std::swap(t1, t2);
    CurationResult lo = curate_alignments(records, t1), hi = curate_alignments(records, t2);
    CHECK(lo.kept.size() + lo.excluded.size() == records.size());
    CHECK(lo.kept.size() <= hi.kept.size());
    for (const auto &k : lo.kept) {
      CHECK(std::find(hi.kept.begin(), hi.kept.end(), k) != hi.kept.end());
    }
  }
}

TEST_CASE("alignment file loading") {
  std::string path = temp_file("align.csv",
                               "source_kg,entity_a,entity_b,lang_a,lang_b,relations_a,relations_b\n"
                               "dbp,Q1,Q1,en,fr,r1|r2,r1\n"
                               ",Q2,Q2,en,el,,r3\n");
  auto records = load_alignment_records(path);
  REQUIRE(records.size() == 2);
  CHECK(records[0].relations_a == std::vector<std::string>{"r1", "r2"});
  CHECK(records[1].source_kg == "default");
  CHECK(records[1].relations_a.empty());
  AlignmentStats stats = AlignmentStats::from_records(records);
  CHECK(stats.total("fr", "en") == 1);
  CHECK(stats.partners("en").size() == 2);
}

TEST_CASE("MRR and Hits@k") {
  auto outcomes = [](std::vector<long> ranks) {
    std::vector<RankingOutcome> out;
    for (long r : ranks) out.push_back({"q" + std::to_string(out.size()), r});
    return out;
  };
  CHECK(mean_reciprocal_rank(outcomes({1, 1, 1})) == 1.0);
  CHECK(std::abs(mean_reciprocal_rank(outcomes({1, 2, 4})) - 7.0 / 12.0) < 1e-12);
  CHECK(mean_reciprocal_rank(outcomes({10})) == doctest::Approx(0.1));
  CHECK(hits_at_k(outcomes({1, 3, 10}), 3) == doctest::Approx(2.0 / 3.0));
  CHECK(hits_at_k(outcomes({1, 1}), 1) == 1.0);
  CHECK(hits_at_k(outcomes({4, 9, 2}), 9) == 1.0);
  CHECK_THROWS_AS(mean_reciprocal_rank({}), Error);
  CHECK_THROWS_AS(hits_at_k(outcomes({1}), 0), Error);

  std::string path = temp_file("ranks.csv", "query_id,gold_rank\nq1,1\nq2,2\nq3,4\n");
  CHECK(std::abs(mean_reciprocal_rank(load_ranking_outcomes(path)) - 7.0 / 12.0) < 1e-12);
  CHECK_THROWS_AS(load_ranking_outcomes(temp_file("bad.csv", "query_id,gold_rank\nq,0\n")), Error);
}

TEST_CASE("leaderboard") {
  ModelResults results{{"KENS", {{"Greek", 27.5}, {"French", 25.2}}},
                       {"SS-AGA", {{"Greek", 30.8}, {"French", 27.1}}}};
  Leaderboard board = leaderboard(results);
  CHECK(board.languages == std::vector<std::string>{"Greek", "French"});
  CHECK(board.by_language["Greek"][0].model == "SS-AGA");
  CHECK(board.by_language["Greek"][0].best);
  CHECK_FALSE(board.by_language["Greek"][1].best);
  CHECK(board.best_models("French") == std::vector<std::string>{"SS-AGA"});
  CHECK(board.to_text().find("30.8") != std::string::npos);

  Leaderboard empty = leaderboard({});
  CHECK(empty.languages.empty());
  CHECK(empty.by_language.empty());
}
