// Seeded random inputs shared by unit and acceptance tests.
#ifndef LODCOV_TESTS_GENERATORS_H_
#define LODCOV_TESTS_GENERATORS_H_

#include <random>
#include <set>
#include <string>

#include "lodcov/ingest.h"
#include "lodcov/transfer.h"

namespace gen {

inline std::string random_code(std::mt19937_64 &g) {
  static const std::string kChars = "abcdefghijklmnopqrstuvwxyz";
  std::uniform_int_distribution<int> len(2, 3), ch(0, 25), suffix(0, 9);
  std::string s;
  for (int i = len(g); i > 0; --i) s += kChars[ch(g)];
  if (suffix(g) == 0) s += "-x" + std::to_string(ch(g));
  return s;
}

inline std::optional<std::uint64_t> random_count(std::mt19937_64 &g) {
  std::uniform_int_distribution<int> kind(0, 5);
  switch (kind(g)) {
    case 0: return std::nullopt;
    case 1: return 0;
    case 2: return std::numeric_limits<std::uint64_t>::max();
    default: return std::uniform_int_distribution<std::uint64_t>(0, 1ull << 40)(g);
  }
}

inline lodcov::CoverageSnapshot random_snapshot(std::mt19937_64 &g) {
  lodcov::CoverageSnapshot s;
  std::uniform_int_distribution<int> year(2000, 2099), month(1, 12), day(1, 28), hh(0, 23),
      mm(0, 59), n(0, 30), sources(1, 4), warnings(0, 2);
  char ts[32];
  std::snprintf(ts, sizeof ts, "%04d-%02d-%02dT%02d:%02d:%02dZ", year(g), month(g), day(g), hh(g),
                mm(g), mm(g));
  s.retrieved_at = ts;
  int num_sources = sources(g);
  for (int i = 0; i < num_sources; ++i) {
    s.source_versions["src" + std::to_string(i)] = "dump \"" + random_code(g) + "\" \xC3\xA9";
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (int i = n(g); i > 0; --i) {
    lodcov::CoverageRecord r;
    r.language = random_code(g);
    r.source_id = "src" + std::to_string(std::uniform_int_distribution<int>(0, num_sources - 1)(g));
    if (!seen.insert({r.language, r.source_id}).second) continue;
    r.article_count = random_count(g);
    r.entity_count = random_count(g);
    r.relation_count = random_count(g);
    if (!r.has_any_count()) r.entity_count = 1;
    s.records.push_back(r);
  }
  for (int i = warnings(g); i > 0; --i) s.warnings.push_back("warn\t" + random_code(g) + "\n");
  return s;
}

inline lodcov::AlignmentRecord random_alignment(std::mt19937_64 &g, int index) {
  std::uniform_int_distribution<int> len(0, 6), label(0, 4);
  lodcov::AlignmentRecord r;
  r.source_kg = "kg";
  r.entity_a = "a" + std::to_string(index);
  r.entity_b = "b" + std::to_string(index);
  r.lang_a = "en";
  r.lang_b = "el";
  for (int j = len(g); j > 0; --j) r.relations_a.push_back("r" + std::to_string(label(g)));
  for (int j = len(g); j > 0; --j) r.relations_b.push_back("r" + std::to_string(label(g)));
  return r;
}

}  // namespace gen

#endif  // LODCOV_TESTS_GENERATORS_H_
