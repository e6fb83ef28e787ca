#include "lodcov/ingest.h"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "lodcov/csv.h"

namespace lodcov {

using json = nlohmann::ordered_json;

const char *source_kind_name(SourceKind kind) {
  switch (kind) {
    case SourceKind::kMediaWikiApi: return "mediawiki_api";
    case SourceKind::kSparqlEndpoint: return "sparql_endpoint";
    case SourceKind::kStatsFile: return "stats_file";
  }
  return "stats_file";
}

SourceKind parse_source_kind(std::string_view text) {
  std::string t = to_lower(trim(text));
  if (t == "mediawiki_api") return SourceKind::kMediaWikiApi;
  if (t == "sparql_endpoint") return SourceKind::kSparqlEndpoint;
  if (t == "stats_file") return SourceKind::kStatsFile;
  throw Error(ErrorKind::kConfig, "unknown source kind '" + std::string(text) + "'");
}

const char *count_field_name(CountField field) {
  switch (field) {
    case CountField::kArticles: return "article_count";
    case CountField::kEntities: return "entity_count";
    case CountField::kRelations: return "relation_count";
  }
  return "entity_count";
}

CountField parse_count_field(std::string_view text) {
  std::string t = to_lower(trim(text));
  if (t == "article_count") return CountField::kArticles;
  if (t == "entity_count") return CountField::kEntities;
  if (t == "relation_count") return CountField::kRelations;
  throw Error(ErrorKind::kConfig, "unknown count field '" + std::string(text) + "'");
}

std::optional<std::uint64_t> CoverageRecord::count(CountField field) const {
  switch (field) {
    case CountField::kArticles: return article_count;
    case CountField::kEntities: return entity_count;
    case CountField::kRelations: return relation_count;
  }
  return std::nullopt;
}

void SourceDescriptor::validate() const {
  if (source_id.empty()) throw Error(ErrorKind::kConfig, "source with empty id");
  if (locator.empty()) {
    throw Error(ErrorKind::kConfig, "source '" + source_id + "' has no locator");
  }
  if (kind == SourceKind::kSparqlEndpoint) {
    if (!query_template ||
        query_template->find("{lang}") == std::string::npos) {
      throw Error(ErrorKind::kConfig, "sparql source '" + source_id +
                                          "' needs a query template with {lang}");
    }
    if (relation_query_template &&
        relation_query_template->find("{lang}") == std::string::npos) {
      throw Error(ErrorKind::kConfig, "relation query of '" + source_id +
                                          "' lacks a {lang} placeholder");
    }
  }
}

void validate_sources(const std::vector<SourceDescriptor> &sources) {
  std::set<std::string> ids;
  for (const auto &s : sources) {
    s.validate();
    if (!ids.insert(s.source_id).second) {
      throw Error(ErrorKind::kConfig, "duplicate source id '" + s.source_id + "'");
    }
  }
}

// ---------------------------------------------------------------------------
// Snapshots

namespace {

const std::regex kTimestampRe(R"(^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z$)");

json optional_count(const std::optional<std::uint64_t> &v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<std::uint64_t> read_count(const json &obj, const char *key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer()) {
    throw Error(ErrorKind::kValidation, std::string(key) + " must be an integer");
  }
  if (it->is_number_unsigned()) return it->get<std::uint64_t>();
  auto v = it->get<std::int64_t>();
  if (v < 0) {
    throw Error(ErrorKind::kValidation, std::string(key) + " is negative");
  }
  return static_cast<std::uint64_t>(v);
}

}  // namespace

void CoverageSnapshot::validate() const {
  if (!std::regex_match(retrieved_at, kTimestampRe)) {
    throw Error(ErrorKind::kValidation,
                "retrieved_at '" + retrieved_at + "' is not a UTC timestamp");
  }
  std::set<std::pair<std::string, std::string>> keys;
  for (const auto &r : records) {
    if (r.language.empty() || r.source_id.empty()) {
      throw Error(ErrorKind::kValidation, "record with empty language or source");
    }
    if (!r.has_any_count()) {
      throw Error(ErrorKind::kValidation, "record (" + r.language + ", " +
                                              r.source_id + ") carries no count");
    }
    if (!keys.emplace(r.language, r.source_id).second) {
      throw Error(ErrorKind::kValidation, "duplicate record (" + r.language +
                                              ", " + r.source_id + ")");
    }
  }
}

std::string utc_timestamp_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string snapshot_to_json(const CoverageSnapshot &snapshot) {
  json doc;
  doc["schema_version"] = kSnapshotSchemaVersion;
  doc["retrieved_at"] = snapshot.retrieved_at;
  doc["source_versions"] = json::object();
  for (const auto &[id, note] : snapshot.source_versions) {
    doc["source_versions"][id] = note;
  }
  doc["records"] = json::array();
  for (const auto &r : snapshot.records) {
    doc["records"].push_back({{"language", r.language},
                              {"source_id", r.source_id},
                              {"article_count", optional_count(r.article_count)},
                              {"entity_count", optional_count(r.entity_count)},
                              {"relation_count", optional_count(r.relation_count)}});
  }
  doc["warnings"] = snapshot.warnings;
  return doc.dump(2) + "\n";
}

CoverageSnapshot snapshot_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error &e) {
    throw Error(ErrorKind::kParse, std::string("snapshot is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("schema_version")) {
    throw Error(ErrorKind::kIncompatibleSnapshot, "snapshot lacks schema_version");
  }
  if (!doc["schema_version"].is_number_integer() ||
      doc["schema_version"].get<int>() != kSnapshotSchemaVersion) {
    throw Error(ErrorKind::kIncompatibleSnapshot,
                "unsupported snapshot schema_version " +
                    doc["schema_version"].dump());
  }
  CoverageSnapshot s;
  try {
    s.retrieved_at = doc.at("retrieved_at").get<std::string>();
    if (doc.contains("source_versions")) {
      for (const auto &[id, note] : doc["source_versions"].items()) {
        s.source_versions[id] = note.get<std::string>();
      }
    }
    for (const auto &r : doc.at("records")) {
      CoverageRecord rec;
      rec.language = r.at("language").get<std::string>();
      rec.source_id = r.at("source_id").get<std::string>();
      rec.article_count = read_count(r, "article_count");
      rec.entity_count = read_count(r, "entity_count");
      rec.relation_count = read_count(r, "relation_count");
      s.records.push_back(std::move(rec));
    }
    if (doc.contains("warnings")) {
      s.warnings = doc["warnings"].get<std::vector<std::string>>();
    }
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kValidation, std::string("malformed snapshot: ") + e.what());
  }
  s.validate();
  return s;
}

void save_snapshot(const CoverageSnapshot &snapshot, const std::string &path) {
  snapshot.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << snapshot_to_json(snapshot);
  if (!out) throw Error(ErrorKind::kIo, "write failed for " + path);
}

CoverageSnapshot load_snapshot(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return snapshot_from_json(ss.str());
  } catch (const Error &e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// HTTP

namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl parse_url(const std::string &url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::kConfig, "not an absolute URL: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

void apply_proxy(httplib::Client &client, bool https) {
  const char *names[] = {https ? "HTTPS_PROXY" : "HTTP_PROXY",
                         https ? "https_proxy" : "http_proxy"};
  for (const char *name : names) {
    const char *value = std::getenv(name);
    if (!value || !*value) continue;
    std::string proxy = value;
    if (auto p = proxy.find("://"); p != std::string::npos) proxy = proxy.substr(p + 3);
    if (!proxy.empty() && proxy.back() == '/') proxy.pop_back();
    auto colon = proxy.rfind(':');
    if (colon == std::string::npos) {
      client.set_proxy(proxy, https ? 443 : 80);
    } else {
      client.set_proxy(proxy.substr(0, colon), std::atoi(proxy.c_str() + colon + 1));
    }
    return;
  }
}

bool is_transient(int status) { return status == 429 || status >= 500; }

std::string excerpt(std::string_view body) {
  constexpr std::size_t kMax = 200;
  if (body.size() <= kMax) return std::string(body);
  return std::string(body.substr(0, kMax)) + "...";
}

}  // namespace

HttpResponse http_get(const std::string &url,
                      const std::vector<std::pair<std::string, std::string>> &params,
                      const std::vector<std::pair<std::string, std::string>> &headers,
                      const FetchPolicy &policy) {
  ParsedUrl parsed = parse_url(url);
  httplib::Params query;
  for (const auto &[k, v] : params) query.emplace(k, v);
  httplib::Headers hdrs;
  for (const auto &[k, v] : headers) hdrs.emplace(k, v);
  hdrs.emplace("User-Agent", "lodcov/1.0 (language coverage profiler)");

  std::optional<HttpResponse> last;
  std::string last_error;
  int attempts = std::max(1, policy.attempts);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(policy.backoff_base * (1LL << (attempt - 1)));
    }
    httplib::Client client(parsed.origin);
    client.set_connection_timeout(policy.timeout);
    client.set_read_timeout(policy.timeout);
    client.set_follow_location(true);
    apply_proxy(client, parsed.origin.rfind("https", 0) == 0);
    auto result = query.empty() ? client.Get(parsed.path, hdrs)
                                : client.Get(parsed.path, query, hdrs);
    if (!result) {
      last_error = httplib::to_string(result.error());
      continue;
    }
    last = HttpResponse{result->status, result->body};
    if (!is_transient(result->status)) break;
  }
  if (!last) {
    throw Error(ErrorKind::kTransport, url + ": " + last_error + " after " +
                                          std::to_string(attempts) + " attempts");
  }
  return *last;
}

bool is_valid_language_code(std::string_view code) {
  if (code.empty()) return false;
  return std::all_of(code.begin(), code.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '-';
  });
}

std::string substitute_language(std::string_view templ, std::string_view code) {
  if (!is_valid_language_code(code)) {
    throw Error(ErrorKind::kArgument,
                "invalid language code '" + std::string(code) + "'");
  }
  std::string out;
  std::size_t pos = 0;
  while (true) {
    std::size_t hit = templ.find("{lang}", pos);
    out.append(templ.substr(pos, hit - pos));
    if (hit == std::string_view::npos) break;
    out.append(code);
    pos = hit + 6;
  }
  return out;
}

void bounded_parallel_for(std::size_t n, int concurrency,
                          const std::function<void(std::size_t)> &task) {
  if (n == 0) return;
  std::size_t workers = std::min<std::size_t>(n, std::max(1, concurrency));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < n; i = next++) task(i);
  };
  std::vector<std::thread> threads;
  for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(worker);
  worker();
  for (auto &t : threads) t.join();
}

// ---------------------------------------------------------------------------
// MediaWiki

std::optional<std::uint64_t> parse_siteinfo_articles(std::string_view body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error &) {
    throw Error(ErrorKind::kParse, "siteinfo response is not JSON: " + excerpt(body));
  }
  if (doc.contains("error")) {
    std::string code = doc["error"].value("code", "");
    if (code == "missingsite" || code == "nosuchsite") return std::nullopt;
    throw Error(ErrorKind::kParse, "siteinfo error response: " + excerpt(body));
  }
  const json *articles = nullptr;
  if (doc.contains("query") && doc["query"].contains("statistics")) {
    const json &stats = doc["query"]["statistics"];
    if (stats.contains("articles")) articles = &stats["articles"];
  }
  if (!articles || !articles->is_number_integer() ||
      (articles->is_number_integer() && !articles->is_number_unsigned() &&
       articles->get<std::int64_t>() < 0)) {
    throw Error(ErrorKind::kParse,
                "siteinfo response without statistics.articles: " + excerpt(body));
  }
  return articles->get<std::uint64_t>();
}

namespace {

template <typename Fn>
FetchOutcome run_per_language(const std::vector<std::string> &languages,
                              const FetchPolicy &policy, Fn fetch_one) {
  std::vector<std::optional<CoverageRecord>> slots(languages.size());
  std::vector<std::optional<FetchFailure>> failures(languages.size());
  bounded_parallel_for(languages.size(), policy.concurrency, [&](std::size_t i) {
    try {
      slots[i] = fetch_one(languages[i]);
    } catch (const Error &e) {
      failures[i] = FetchFailure{languages[i], e.kind(), e.what()};
    }
    if (policy.request_delay.count() > 0) {
      std::this_thread::sleep_for(policy.request_delay);
    }
  });
  FetchOutcome out;
  for (std::size_t i = 0; i < languages.size(); ++i) {
    if (slots[i]) out.records.push_back(std::move(*slots[i]));
    if (failures[i]) out.failures.push_back(std::move(*failures[i]));
  }
  return out;
}

[[noreturn]] void rethrow_first(const FetchOutcome &outcome) {
  const FetchFailure &f = outcome.failures.front();
  throw Error(f.kind, f.message);
}

}  // namespace

FetchOutcome fetch_wikipedia_outcome(const SourceDescriptor &descriptor,
                                     const std::vector<std::string> &languages,
                                     const FetchPolicy &policy) {
  if (descriptor.kind != SourceKind::kMediaWikiApi) {
    throw Error(ErrorKind::kArgument,
                "source '" + descriptor.source_id + "' is not a MediaWiki API");
  }
  return run_per_language(languages, policy, [&](const std::string &lang) {
    std::string url = substitute_language(descriptor.locator, lang);
    HttpResponse resp;
    try {
      resp = http_get(url,
                      {{"action", "query"},
                       {"meta", "siteinfo"},
                       {"siprop", "statistics"},
                       {"format", "json"}},
                      {{"Accept", "application/json"}}, policy);
    } catch (const Error &e) {
      throw Error(e.kind(), "[" + lang + "] " + e.what());
    }
    CoverageRecord rec{lang, descriptor.source_id, 0, std::nullopt, std::nullopt};
    if (resp.status == 404) return rec;
    if (resp.status < 200 || resp.status >= 300) {
      throw Error(ErrorKind::kTransport, "[" + lang + "] HTTP " +
                                             std::to_string(resp.status) + " from " + url);
    }
    try {
      rec.article_count = parse_siteinfo_articles(resp.body).value_or(0);
    } catch (const Error &e) {
      throw Error(e.kind(), "[" + lang + "] " + e.what());
    }
    return rec;
  });
}

std::vector<CoverageRecord> fetch_wikipedia_counts(
    const SourceDescriptor &descriptor, const std::vector<std::string> &languages,
    const FetchPolicy &policy) {
  FetchOutcome outcome = fetch_wikipedia_outcome(descriptor, languages, policy);
  if (!outcome.failures.empty()) rethrow_first(outcome);
  return std::move(outcome.records);
}

// ---------------------------------------------------------------------------
// SPARQL

std::uint64_t parse_sparql_count(std::string_view body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error &) {
    throw Error(ErrorKind::kParse, "SPARQL response is not JSON: " + excerpt(body));
  }
  if (!doc.contains("results") || !doc["results"].contains("bindings") ||
      !doc["results"]["bindings"].is_array()) {
    throw Error(ErrorKind::kShape, "SPARQL response has no results.bindings");
  }
  const json &bindings = doc["results"]["bindings"];
  if (bindings.size() != 1 || !bindings[0].is_object() || bindings[0].size() != 1) {
    throw Error(ErrorKind::kShape,
                "expected one row with one binding, got " + excerpt(bindings.dump()));
  }
  const json &cell = bindings[0].begin().value();
  if (!cell.is_object() || !cell.contains("value") || !cell["value"].is_string()) {
    throw Error(ErrorKind::kShape, "binding without a literal value");
  }
  std::string value = cell["value"].get<std::string>();
  auto count = parse_count(value);
  if (!count) {
    throw Error(ErrorKind::kShape, "binding '" + value + "' is not a count");
  }
  return *count;
}

CoverageRecord fetch_sparql_count(const SourceDescriptor &descriptor,
                                  const std::string &language, CountField role,
                                  const FetchPolicy &policy) {
  if (descriptor.kind != SourceKind::kSparqlEndpoint) {
    throw Error(ErrorKind::kArgument,
                "source '" + descriptor.source_id + "' is not a SPARQL endpoint");
  }
  const std::optional<std::string> &templ = role == CountField::kRelations
                                                ? descriptor.relation_query_template
                                                : descriptor.query_template;
  if (!templ || role == CountField::kArticles) {
    throw Error(ErrorKind::kConfig, "source '" + descriptor.source_id +
                                        "' has no query for " + count_field_name(role));
  }
  std::string query = substitute_language(*templ, language);
  HttpResponse resp;
  try {
    resp = http_get(descriptor.locator, {{"query", query}},
                    {{"Accept", "application/sparql-results+json"}}, policy);
  } catch (const Error &e) {
    throw Error(e.kind(), "[" + language + "] " + e.what());
  }
  if (resp.status < 200 || resp.status >= 300) {
    throw Error(ErrorKind::kTransport, "[" + language + "] HTTP " +
                                           std::to_string(resp.status) + " from " +
                                           descriptor.locator);
  }
  std::uint64_t count;
  try {
    count = parse_sparql_count(resp.body);
  } catch (const Error &e) {
    throw Error(e.kind(), "[" + language + "] " + e.what());
  }
  CoverageRecord rec{language, descriptor.source_id, std::nullopt, std::nullopt,
                     std::nullopt};
  if (role == CountField::kRelations) {
    rec.relation_count = count;
  } else {
    rec.entity_count = count;
  }
  return rec;
}

FetchOutcome fetch_sparql_outcome(const SourceDescriptor &descriptor,
                                  const std::vector<std::string> &languages,
                                  const FetchPolicy &policy) {
  return run_per_language(languages, policy, [&](const std::string &lang) {
    CoverageRecord rec = fetch_sparql_count(descriptor, lang, CountField::kEntities, policy);
    if (descriptor.relation_query_template) {
      rec.relation_count =
          fetch_sparql_count(descriptor, lang, CountField::kRelations, policy)
              .relation_count;
    }
    return rec;
  });
}

// ---------------------------------------------------------------------------
// Statistics files

std::vector<CoverageRecord> load_stats_file(const SourceDescriptor &descriptor) {
  Table table = Table::read_file(descriptor.locator);
  std::size_t lang_col = table.require_column("language");
  std::size_t entity_col = table.require_column("entity_count");
  auto relation_col = table.column("relation_count");
  auto article_col = table.column("article_count");

  auto cell = [&](const std::vector<std::string> &row, std::optional<std::size_t> col,
                  const char *name, std::size_t line) -> std::optional<std::uint64_t> {
    if (!col) return std::nullopt;
    std::string text = trim(row[*col]);
    if (text.empty()) return std::nullopt;
    if (auto v = parse_count(text)) return v;
    ErrorKind kind = text.front() == '-' ? ErrorKind::kValidation : ErrorKind::kParse;
    throw Error(kind, descriptor.locator + ": row " + std::to_string(line) + ": " +
                          name + " '" + text + "' is not a non-negative integer");
  };

  std::vector<CoverageRecord> records;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < table.rows().size(); ++i) {
    const auto &row = table.rows()[i];
    CoverageRecord rec;
    rec.language = trim(row[lang_col]);
    rec.source_id = descriptor.source_id;
    if (rec.language.empty()) {
      throw Error(ErrorKind::kValidation, descriptor.locator + ": row " +
                                              std::to_string(i + 1) + " has no language");
    }
    rec.entity_count = cell(row, entity_col, "entity_count", i + 1);
    rec.relation_count = cell(row, relation_col, "relation_count", i + 1);
    rec.article_count = cell(row, article_col, "article_count", i + 1);
    if (!rec.has_any_count()) {
      throw Error(ErrorKind::kValidation, descriptor.locator + ": row " +
                                              std::to_string(i + 1) + " has no count");
    }
    if (!seen.insert(rec.language).second) {
      throw Error(ErrorKind::kValidation,
                  descriptor.locator + ": language '" + rec.language + "' repeated");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace lodcov
