#include "lodcov/transfer.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <set>
#include <sstream>

#include "lodcov/csv.h"
#include "lodcov/error.h"

namespace lodcov {

using json = nlohmann::ordered_json;

const char *strategy_name(TransferStrategy s) {
  switch (s) {
    case TransferStrategy::kCoverage: return "coverage";
    case TransferStrategy::kProximity: return "proximity";
    case TransferStrategy::kAlignmentVolume: return "alignment_volume";
    case TransferStrategy::kCombined: return "combined";
  }
  return "coverage";
}

TransferStrategy parse_strategy(std::string_view text) {
  std::string t = to_lower(trim(text));
  if (t == "coverage") return TransferStrategy::kCoverage;
  if (t == "proximity") return TransferStrategy::kProximity;
  if (t == "alignment_volume" || t == "alignment") {
    return TransferStrategy::kAlignmentVolume;
  }
  if (t == "combined") return TransferStrategy::kCombined;
  throw Error(ErrorKind::kArgument, "unknown strategy '" + std::string(text) + "'");
}

std::string plan_to_json(const TransferPlan &plan) {
  json doc;
  doc["target"] = plan.target;
  doc["strategy"] = strategy_name(plan.strategy);
  doc["parameters"] = json::object();
  for (const auto &[k, v] : plan.parameters) doc["parameters"][k] = v;
  doc["candidates"] = json::array();
  for (const auto &c : plan.candidates) {
    doc["candidates"].push_back({{"language", c.language}, {"score", c.score}});
  }
  return doc.dump(2) + "\n";
}

std::vector<Candidate> rank_candidates(std::vector<Candidate> pool,
                                       const std::string &target, std::size_t n) {
  std::erase_if(pool, [&](const Candidate &c) { return c.language == target; });
  std::sort(pool.begin(), pool.end(), [](const Candidate &a, const Candidate &b) {
    if (a.score != b.score) return a.score > b.score;
    return a.language < b.language;
  });
  // A language listed twice keeps its best-scoring entry.
  std::set<std::string> seen;
  std::erase_if(pool, [&](const Candidate &c) { return !seen.insert(c.language).second; });
  if (pool.size() > n) pool.resize(n);
  return pool;
}

namespace {

void require_n(std::size_t n) {
  if (n < 1) throw Error(ErrorKind::kArgument, "candidate count n must be >= 1");
}

}  // namespace

std::map<std::string, double> coverage_scores(const CoverageSnapshot &snapshot,
                                              const Catalog &catalog,
                                              const MappingTable &mappings,
                                              const CoverageScoreOptions &options) {
  std::set<std::string> sources(options.sources.begin(), options.sources.end());
  std::map<std::pair<std::string, std::string>, std::uint64_t> sums;
  for (const auto &rec : snapshot.records) {
    if (!sources.empty() && !sources.count(rec.source_id)) continue;
    auto c = rec.count(options.field);
    if (!c) continue;
    const Languoid *l = resolve_language(catalog, mappings, rec.language);
    if (!l) continue;
    sums[{l->wals_code, rec.source_id}] += *c;
  }
  std::map<std::string, double> scores;
  for (const auto &[key, count] : sums) {
    scores[key.first] += std::log1p(static_cast<double>(count));
  }
  return scores;
}

TransferPlan select_by_coverage(const std::string &target,
                                const CoverageSnapshot &snapshot,
                                const Catalog &catalog, const MappingTable &mappings,
                                std::size_t n, const CoverageScoreOptions &options) {
  require_n(n);
  const Languoid *t = resolve_language(catalog, mappings, target);
  if (!t) throw Error(ErrorKind::kArgument, "unresolved target '" + target + "'");
  std::vector<Candidate> pool;
  for (const auto &[code, score] : coverage_scores(snapshot, catalog, mappings, options)) {
    pool.push_back({code, score});
  }
  TransferPlan plan;
  plan.target = t->wals_code;
  plan.strategy = TransferStrategy::kCoverage;
  plan.candidates = rank_candidates(std::move(pool), plan.target, n);
  plan.parameters["n"] = std::to_string(n);
  plan.parameters["coverage_field"] = count_field_name(options.field);
  return plan;
}

TransferPlan select_by_proximity(const std::string &target, const Catalog &catalog,
                                 const ProximityWeights &weights, std::size_t n) {
  require_n(n);
  const Languoid *t = catalog.find(target);
  if (!t) throw Error(ErrorKind::kArgument, "target '" + target + "' not in catalog");
  ProximityWeights w = weights.normalized();
  std::vector<Candidate> pool;
  for (const auto &l : catalog.languoids()) {
    if (l.wals_code == t->wals_code) continue;
    pool.push_back({l.wals_code, proximity(*t, l, w)});
  }
  TransferPlan plan;
  plan.target = t->wals_code;
  plan.strategy = TransferStrategy::kProximity;
  plan.candidates = rank_candidates(std::move(pool), plan.target, n);
  plan.parameters["n"] = std::to_string(n);
  plan.parameters["family_w"] = format_real(w.family_w);
  plan.parameters["genus_w"] = format_real(w.genus_w);
  plan.parameters["macroarea_w"] = format_real(w.macroarea_w);
  plan.parameters["feature_w"] = format_real(w.feature_w);
  return plan;
}

void AlignmentStats::add(const std::string &source_kg, const std::string &lang_a,
                         const std::string &lang_b, std::uint64_t count) {
  const auto &[lo, hi] = std::minmax(lang_a, lang_b);
  counts_[{source_kg, lo, hi}] += count;
}

std::uint64_t AlignmentStats::count(const std::string &source_kg,
                                    const std::string &lang_a,
                                    const std::string &lang_b) const {
  const auto &[lo, hi] = std::minmax(lang_a, lang_b);
  auto it = counts_.find({source_kg, lo, hi});
  return it == counts_.end() ? 0 : it->second;
}

std::uint64_t AlignmentStats::total(const std::string &lang_a,
                                    const std::string &lang_b) const {
  const auto &[lo, hi] = std::minmax(lang_a, lang_b);
  std::uint64_t sum = 0;
  for (const auto &[key, c] : counts_) {
    if (std::get<1>(key) == lo && std::get<2>(key) == hi) sum += c;
  }
  return sum;
}

std::map<std::string, std::uint64_t> AlignmentStats::partners(
    const std::string &lang) const {
  std::map<std::string, std::uint64_t> out;
  for (const auto &[key, c] : counts_) {
    const auto &[kg, a, b] = key;
    if (a == lang && b != lang) out[b] += c;
    if (b == lang && a != lang) out[a] += c;
  }
  return out;
}

AlignmentStats AlignmentStats::from_records(const std::vector<AlignmentRecord> &records) {
  AlignmentStats stats;
  for (const auto &r : records) stats.add(r.source_kg, r.lang_a, r.lang_b, 1);
  return stats;
}

std::vector<AlignmentRecord> load_alignment_records(const std::string &path) {
  Table table = Table::read_file(path);
  std::size_t ea = table.require_column("entity_a");
  std::size_t eb = table.require_column("entity_b");
  std::size_t la = table.require_column("lang_a");
  std::size_t lb = table.require_column("lang_b");
  std::size_t ra = table.require_column("relations_a");
  std::size_t rb = table.require_column("relations_b");
  auto kg = table.column("source_kg");
  auto labels = [](const std::string &cell) {
    std::vector<std::string> out;
    if (trim(cell).empty()) return out;
    for (auto &part : split(cell, '|')) {
      std::string t = trim(part);
      if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
  };
  std::vector<AlignmentRecord> records;
  for (const auto &row : table.rows()) {
    AlignmentRecord r;
    r.source_kg = kg ? trim(row[*kg]) : "default";
    if (r.source_kg.empty()) r.source_kg = "default";
    r.entity_a = trim(row[ea]);
    r.entity_b = trim(row[eb]);
    r.lang_a = trim(row[la]);
    r.lang_b = trim(row[lb]);
    r.relations_a = labels(row[ra]);
    r.relations_b = labels(row[rb]);
    records.push_back(std::move(r));
  }
  return records;
}

TransferPlan select_by_alignment_volume(const std::string &target,
                                        const AlignmentStats &stats, std::size_t n) {
  require_n(n);
  std::vector<Candidate> pool;
  for (const auto &[lang, total] : stats.partners(target)) {
    if (total > 0) pool.push_back({lang, static_cast<double>(total)});
  }
  TransferPlan plan;
  plan.target = target;
  plan.strategy = TransferStrategy::kAlignmentVolume;
  plan.candidates = rank_candidates(std::move(pool), target, n);
  plan.parameters["n"] = std::to_string(n);
  plan.parameters["aggregation"] = "sum_over_kgs";
  return plan;
}

TransferPlan combine_plans(const std::string &target,
                           const std::vector<TransferPlan> &plans, std::size_t n) {
  require_n(n);
  if (plans.empty()) throw Error(ErrorKind::kArgument, "no plans to combine");
  std::map<std::string, double> sums;
  for (const auto &plan : plans) {
    for (std::size_t i = 0; i < plan.candidates.size(); ++i) {
      sums[plan.candidates[i].language] += 1.0 / static_cast<double>(i + 1);
    }
  }
  std::vector<Candidate> pool;
  for (const auto &[lang, s] : sums) {
    pool.push_back({lang, s / static_cast<double>(plans.size())});
  }
  TransferPlan plan;
  plan.target = target;
  plan.strategy = TransferStrategy::kCombined;
  plan.candidates = rank_candidates(std::move(pool), target, n);
  plan.parameters["n"] = std::to_string(n);
  std::string used;
  for (const auto &p : plans) {
    if (!used.empty()) used += ",";
    used += strategy_name(p.strategy);
  }
  plan.parameters["strategies"] = used;
  return plan;
}

double label_entropy(const std::vector<std::string> &labels) {
  if (labels.empty()) return 0.0;
  std::map<std::string, double> counts;
  for (const auto &l : labels) counts[l] += 1;
  double n = static_cast<double>(labels.size());
  double h = 0.0;
  for (const auto &[label, c] : counts) h -= (c / n) * std::log(c / n);
  return h;
}

double EntropyIncreaseRule::noise_increase(const AlignmentRecord &record) const {
  std::vector<std::string> merged = record.relations_a;
  merged.insert(merged.end(), record.relations_b.begin(), record.relations_b.end());
  double separate =
      (label_entropy(record.relations_a) + label_entropy(record.relations_b)) / 2.0;
  return label_entropy(merged) - separate;
}

const char *exclusion_reason_name(ExclusionReason r) {
  return r == ExclusionReason::kNoEvidence ? "no_evidence" : "noise_increase";
}

CurationResult curate_alignments(const std::vector<AlignmentRecord> &records,
                                 double entropy_threshold, const CurationRule &rule) {
  CurationResult result;
  for (const auto &r : records) {
    if (r.relations_a.empty() && r.relations_b.empty()) {
      result.excluded.push_back({r, ExclusionReason::kNoEvidence, 0.0});
      continue;
    }
    double increase = rule.noise_increase(r);
    if (increase > entropy_threshold) {
      result.excluded.push_back({r, ExclusionReason::kNoiseIncrease, increase});
    } else {
      result.kept.push_back(r);
    }
  }
  return result;
}

std::vector<RankingOutcome> load_ranking_outcomes(const std::string &path) {
  Table table = Table::read_file(path);
  std::size_t q = table.require_column("query_id");
  std::size_t g = table.require_column("gold_rank");
  std::vector<RankingOutcome> out;
  for (const auto &row : table.rows()) {
    auto rank = parse_count(row[g]);
    if (!rank || *rank < 1 ||
        *rank > static_cast<unsigned long long>(std::numeric_limits<long>::max())) {
      throw Error(ErrorKind::kValidation,
                  path + ": gold_rank '" + row[g] + "' is not a positive integer");
    }
    out.push_back({trim(row[q]), static_cast<long>(*rank)});
  }
  return out;
}

double mean_reciprocal_rank(const std::vector<RankingOutcome> &outcomes) {
  if (outcomes.empty()) throw Error(ErrorKind::kArgument, "no ranking outcomes");
  double sum = 0.0;
  for (const auto &o : outcomes) {
    if (o.gold_rank < 1) throw Error(ErrorKind::kArgument, "gold_rank must be >= 1");
    sum += 1.0 / static_cast<double>(o.gold_rank);
  }
  return sum / static_cast<double>(outcomes.size());
}

double hits_at_k(const std::vector<RankingOutcome> &outcomes, long k) {
  if (outcomes.empty()) throw Error(ErrorKind::kArgument, "no ranking outcomes");
  if (k < 1) throw Error(ErrorKind::kArgument, "k must be >= 1");
  std::size_t hits = 0;
  for (const auto &o : outcomes) {
    if (o.gold_rank < 1) throw Error(ErrorKind::kArgument, "gold_rank must be >= 1");
    if (o.gold_rank <= k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(outcomes.size());
}

Leaderboard leaderboard(const ModelResults &results) {
  Leaderboard board;
  for (const auto &[model, scores] : results) {
    for (const auto &[language, score] : scores) {
      if (!board.by_language.count(language)) board.languages.push_back(language);
      board.by_language[language].push_back({model, score, false});
    }
  }
  for (auto &[language, entries] : board.by_language) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const LeaderboardEntry &a, const LeaderboardEntry &b) {
                       return a.score > b.score;
                     });
    for (auto &e : entries) e.best = e.score == entries.front().score;
  }
  return board;
}

std::vector<std::string> Leaderboard::best_models(const std::string &language) const {
  std::vector<std::string> out;
  auto it = by_language.find(language);
  if (it == by_language.end()) return out;
  for (const auto &e : it->second) {
    if (e.best) out.push_back(e.model);
  }
  return out;
}

std::string Leaderboard::to_text() const {
  std::ostringstream out;
  for (const auto &language : languages) {
    out << language << "\n";
    int rank = 1;
    for (const auto &e : by_language.at(language)) {
      out << "  " << rank++ << ". " << e.model;
      for (std::size_t pad = e.model.size(); pad < 12; ++pad) out << ' ';
      out << ' ' << format_real(e.score) << (e.best ? "  (best)" : "") << "\n";
    }
  }
  return out.str();
}

std::string Leaderboard::to_json() const {
  json doc = json::object();
  for (const auto &language : languages) {
    json rows = json::array();
    for (const auto &e : by_language.at(language)) {
      rows.push_back({{"model", e.model}, {"score", e.score}, {"best", e.best}});
    }
    doc[language] = rows;
  }
  return doc.dump(2) + "\n";
}

ModelResults load_model_results(const std::string &path) {
  Table table = Table::read_file(path);
  std::size_t model_col = table.require_column("model");
  auto numeric = [](const std::string &cell, double *out) {
    std::string t = trim(cell);
    if (t.empty()) return false;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), *out);
    return ec == std::errc() && ptr == t.data() + t.size();
  };
  std::vector<std::size_t> score_cols;
  for (std::size_t c = 0; c < table.header().size(); ++c) {
    if (c == model_col || table.rows().empty()) continue;
    double v;
    bool all_numeric = std::all_of(table.rows().begin(), table.rows().end(),
                                   [&](const auto &row) { return numeric(row[c], &v); });
    if (all_numeric) score_cols.push_back(c);
  }
  ModelResults results;
  for (const auto &row : table.rows()) {
    std::vector<std::pair<std::string, double>> scores;
    for (std::size_t c : score_cols) {
      double v = 0;
      numeric(row[c], &v);
      scores.emplace_back(table.header()[c], v);
    }
    results.emplace_back(trim(row[model_col]), std::move(scores));
  }
  return results;
}

}  // namespace lodcov
