#ifndef LODCOV_INGEST_H_
#define LODCOV_INGEST_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lodcov/error.h"

namespace lodcov {

enum class SourceKind { kMediaWikiApi, kSparqlEndpoint, kStatsFile };

const char *source_kind_name(SourceKind kind);
SourceKind parse_source_kind(std::string_view text);

enum class CountField { kArticles, kEntities, kRelations };

const char *count_field_name(CountField field);
CountField parse_count_field(std::string_view text);

// Where per-language counts come from. For MediaWiki sources the locator is
// an API URL with a {lang} placeholder for the edition subdomain/path. For
// SPARQL sources `query_template` counts entities and the optional
// `relation_query_template` counts relations; both need {lang}.
struct SourceDescriptor {
  std::string source_id;
  SourceKind kind = SourceKind::kStatsFile;
  std::string locator;
  std::optional<std::string> query_template;
  std::optional<std::string> relation_query_template;

  // Raises a config error when the kind-specific requirements are unmet.
  void validate() const;
};

void validate_sources(const std::vector<SourceDescriptor> &sources);

struct CoverageRecord {
  std::string language;
  std::string source_id;
  std::optional<std::uint64_t> article_count;
  std::optional<std::uint64_t> entity_count;
  std::optional<std::uint64_t> relation_count;

  std::optional<std::uint64_t> count(CountField field) const;
  bool has_any_count() const {
    return article_count || entity_count || relation_count;
  }

  bool operator==(const CoverageRecord &) const = default;
};

inline constexpr int kSnapshotSchemaVersion = 1;

struct CoverageSnapshot {
  std::vector<CoverageRecord> records;
  std::string retrieved_at;  // UTC, "YYYY-MM-DDTHH:MM:SSZ"
  std::map<std::string, std::string> source_versions;
  // Per-language failures recorded by a partial ingest run.
  std::vector<std::string> warnings;

  // Unique (language, source_id) pairs, a count on every record and a
  // well-formed timestamp; raises a validation error otherwise.
  void validate() const;

  bool operator==(const CoverageSnapshot &) const = default;
};

std::string utc_timestamp_now();

std::string snapshot_to_json(const CoverageSnapshot &snapshot);
CoverageSnapshot snapshot_from_json(std::string_view text);
void save_snapshot(const CoverageSnapshot &snapshot, const std::string &path);
CoverageSnapshot load_snapshot(const std::string &path);

// Transport settings shared by every remote source.
struct FetchPolicy {
  int attempts = 3;
  std::chrono::milliseconds backoff_base{500};
  int concurrency = 4;
  std::chrono::milliseconds request_delay{0};
  std::chrono::seconds timeout{60};
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// GET with bounded retries. Connection failures, 429 and 5xx are retried
// with exponential backoff (base, 2*base, ...); the last response is
// returned once attempts are exhausted. A transport error is raised only if
// no response was ever received. Honors HTTP(S)_PROXY.
HttpResponse http_get(const std::string &url,
                      const std::vector<std::pair<std::string, std::string>> &params,
                      const std::vector<std::pair<std::string, std::string>> &headers,
                      const FetchPolicy &policy);

// Language codes are restricted to [A-Za-z0-9-]+ before substitution into
// URLs or queries.
bool is_valid_language_code(std::string_view code);
std::string substitute_language(std::string_view templ, std::string_view code);

// Per-language failure from a batch fetch.
struct FetchFailure {
  std::string language;
  ErrorKind kind;
  std::string message;
};

struct FetchOutcome {
  std::vector<CoverageRecord> records;  // input language order
  std::vector<FetchFailure> failures;
};

FetchOutcome fetch_wikipedia_outcome(const SourceDescriptor &descriptor,
                                     const std::vector<std::string> &languages,
                                     const FetchPolicy &policy);

// Throws the first failure (in input order) if any language failed.
std::vector<CoverageRecord> fetch_wikipedia_counts(
    const SourceDescriptor &descriptor, const std::vector<std::string> &languages,
    const FetchPolicy &policy = {});

// One count query for one language; `role` selects the template (entities or
// relations) and the record field filled.
CoverageRecord fetch_sparql_count(const SourceDescriptor &descriptor,
                                  const std::string &language,
                                  CountField role = CountField::kEntities,
                                  const FetchPolicy &policy = {});

// Entity (and relation, when templated) counts for every language, merged
// into one record per language.
FetchOutcome fetch_sparql_outcome(const SourceDescriptor &descriptor,
                                  const std::vector<std::string> &languages,
                                  const FetchPolicy &policy);

// Extracts the single numeric binding from a SPARQL JSON results document.
std::uint64_t parse_sparql_count(std::string_view body);

// Extracts statistics.articles from a MediaWiki siteinfo response;
// nullopt when the API reports a missing site.
std::optional<std::uint64_t> parse_siteinfo_articles(std::string_view body);

// Columns: language, entity_count, and optionally relation_count and
// article_count.
std::vector<CoverageRecord> load_stats_file(const SourceDescriptor &descriptor);

// Runs `task(i)` for i in [0, n) on at most `concurrency` threads.
void bounded_parallel_for(std::size_t n, int concurrency,
                          const std::function<void(std::size_t)> &task);

}  // namespace lodcov

#endif  // LODCOV_INGEST_H_
