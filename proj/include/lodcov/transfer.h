#ifndef LODCOV_TRANSFER_H_
#define LODCOV_TRANSFER_H_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "lodcov/ingest.h"
#include "lodcov/langcatalog.h"

namespace lodcov {

enum class TransferStrategy { kCoverage, kProximity, kAlignmentVolume, kCombined };

const char *strategy_name(TransferStrategy s);
TransferStrategy parse_strategy(std::string_view text);

struct Candidate {
  std::string language;  // wals code
  double score = 0.0;

  bool operator==(const Candidate &) const = default;
};

struct TransferPlan {
  std::string target;
  TransferStrategy strategy = TransferStrategy::kCoverage;
  std::vector<Candidate> candidates;  // score desc, then wals_code asc
  std::map<std::string, std::string> parameters;
};

std::string plan_to_json(const TransferPlan &plan);

// Sorts by score descending, wals_code ascending, drops the target and
// truncates to n.
std::vector<Candidate> rank_candidates(std::vector<Candidate> pool,
                                       const std::string &target, std::size_t n);

struct CoverageScoreOptions {
  CountField field = CountField::kEntities;
  // Restricts the sum to these sources; empty means every source.
  std::vector<std::string> sources;
};

// Per-languoid coverage score: sum over sources of log1p(count).
std::map<std::string, double> coverage_scores(const CoverageSnapshot &snapshot,
                                              const Catalog &catalog,
                                              const MappingTable &mappings,
                                              const CoverageScoreOptions &options = {});

TransferPlan select_by_coverage(const std::string &target,
                                const CoverageSnapshot &snapshot,
                                const Catalog &catalog, const MappingTable &mappings,
                                std::size_t n,
                                const CoverageScoreOptions &options = {});

TransferPlan select_by_proximity(const std::string &target, const Catalog &catalog,
                                 const ProximityWeights &weights, std::size_t n);

struct AlignmentRecord {
  std::string source_kg;
  std::string entity_a;
  std::string entity_b;
  std::string lang_a;
  std::string lang_b;
  std::vector<std::string> relations_a;  // multiset
  std::vector<std::string> relations_b;

  bool operator==(const AlignmentRecord &) const = default;
};

// Seed-alignment counts keyed by (source_kg, language pair). Stored with the
// pair in canonical order, so lookups are symmetric.
class AlignmentStats {
 public:
  void add(const std::string &source_kg, const std::string &lang_a,
           const std::string &lang_b, std::uint64_t count);
  std::uint64_t count(const std::string &source_kg, const std::string &lang_a,
                      const std::string &lang_b) const;
  // Summed over source KGs.
  std::uint64_t total(const std::string &lang_a, const std::string &lang_b) const;
  // Every language sharing at least one alignment with `lang`, with totals.
  std::map<std::string, std::uint64_t> partners(const std::string &lang) const;

  static AlignmentStats from_records(const std::vector<AlignmentRecord> &records);

 private:
  std::map<std::tuple<std::string, std::string, std::string>, std::uint64_t> counts_;
};

// Reads alignment records: entity_a, entity_b, lang_a, lang_b, relations_a,
// relations_b (labels joined by '|'), optional source_kg.
std::vector<AlignmentRecord> load_alignment_records(const std::string &path);

TransferPlan select_by_alignment_volume(const std::string &target,
                                        const AlignmentStats &stats, std::size_t n);

// Rank aggregation: each language scores the mean over the given plans of
// 1/position (0 where it is absent).
TransferPlan combine_plans(const std::string &target,
                           const std::vector<TransferPlan> &plans, std::size_t n);

// Scores how much merging an aligned pair adds to the relation-label noise.
class CurationRule {
 public:
  virtual ~CurationRule() = default;
  virtual std::string name() const = 0;
  virtual double noise_increase(const AlignmentRecord &record) const = 0;
};

// Shannon entropy (nats) of the merged relation-label distribution minus the
// mean entropy of the two separate distributions.
class EntropyIncreaseRule : public CurationRule {
 public:
  std::string name() const override { return "entropy_increase"; }
  double noise_increase(const AlignmentRecord &record) const override;
};

double label_entropy(const std::vector<std::string> &labels);

enum class ExclusionReason { kNoiseIncrease, kNoEvidence };

const char *exclusion_reason_name(ExclusionReason r);

struct ExcludedAlignment {
  AlignmentRecord record;
  ExclusionReason reason;
  double increase = 0.0;
};

struct CurationResult {
  std::vector<AlignmentRecord> kept;
  std::vector<ExcludedAlignment> excluded;
};

CurationResult curate_alignments(const std::vector<AlignmentRecord> &records,
                                 double entropy_threshold,
                                 const CurationRule &rule = EntropyIncreaseRule());

struct RankingOutcome {
  std::string query_id;
  long gold_rank = 1;
};

// Columns: query_id, gold_rank.
std::vector<RankingOutcome> load_ranking_outcomes(const std::string &path);

double mean_reciprocal_rank(const std::vector<RankingOutcome> &outcomes);
double hits_at_k(const std::vector<RankingOutcome> &outcomes, long k);

// Hits@1 percentages per model and language.
struct LeaderboardEntry {
  std::string model;
  double score = 0.0;
  bool best = false;
};

struct Leaderboard {
  std::vector<std::string> languages;  // first-seen order
  std::map<std::string, std::vector<LeaderboardEntry>> by_language;

  std::string to_text() const;
  std::string to_json() const;
  std::vector<std::string> best_models(const std::string &language) const;
};

using ModelResults = std::vector<std::pair<std::string, std::vector<std::pair<std::string, double>>>>;

Leaderboard leaderboard(const ModelResults &results);

// Wide table: a model column, optional non-numeric columns (e.g. family),
// then one numeric column per language.
ModelResults load_model_results(const std::string &path);

}  // namespace lodcov

#endif  // LODCOV_TRANSFER_H_
