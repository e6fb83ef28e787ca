#include "lodcov/config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "lodcov/csv.h"
#include "lodcov/error.h"

namespace lodcov {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

std::string unquote(std::string value) {
  value = trim(value);
  if (value.size() >= 2 && ((value.front() == '"' && value.back() == '"') ||
                            (value.front() == '\'' && value.back() == '\''))) {
    return value.substr(1, value.size() - 2);
  }
  return value;
}

class Section {
 public:
  Section(std::string name, const pt::ptree &tree) : name_(std::move(name)), tree_(tree) {}

  std::optional<std::string> get(const std::string &key) const {
    for (const auto &[k, child] : tree_) {
      if (k == key) return unquote(child.data());
    }
    return std::nullopt;
  }

  std::string require(const std::string &key) const {
    if (auto v = get(key)) return *v;
    throw Error(ErrorKind::kConfig, "[" + name_ + "] needs '" + key + "'");
  }

  template <typename T>
  std::optional<T> number(const std::string &key) const {
    auto text = get(key);
    if (!text) return std::nullopt;
    T value{};
    auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), value);
    if (ec != std::errc() || ptr != text->data() + text->size()) {
      throw Error(ErrorKind::kConfig,
                  "[" + name_ + "] " + key + " = '" + *text + "' is not a number");
    }
    return value;
  }

  std::optional<bool> flag(const std::string &key) const {
    auto text = get(key);
    if (!text) return std::nullopt;
    std::string t = to_lower(*text);
    if (t == "true" || t == "yes" || t == "1") return true;
    if (t == "false" || t == "no" || t == "0") return false;
    throw Error(ErrorKind::kConfig, "[" + name_ + "] " + key + " is not a boolean");
  }

  std::vector<std::string> list(const std::string &key) const {
    std::vector<std::string> out;
    if (auto text = get(key)) {
      for (auto &item : split(*text, ',')) {
        std::string t = trim(item);
        if (!t.empty()) out.push_back(t);
      }
    }
    return out;
  }

 private:
  std::string name_;
  const pt::ptree &tree_;
};

std::string resolve(const std::string &base, const std::string &path) {
  if (path.empty() || fs::path(path).is_absolute() || base.empty()) return path;
  return (fs::path(base) / path).lexically_normal().string();
}

}  // namespace

RunConfig parse_config(const std::string &text, const std::string &base_dir) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error &e) {
    throw Error(ErrorKind::kConfig, std::string("bad config: ") + e.what());
  }

  RunConfig cfg;
  cfg.config_dir = base_dir;
  static const pt::ptree kEmpty;
  auto section = [&](const std::string &name) {
    for (const auto &[k, child] : tree) {
      if (k == name) return Section(name, child);
    }
    return Section(name, kEmpty);
  };

  Section run = section("run");
  if (auto v = run.get("catalog")) cfg.catalog_path = resolve(base_dir, *v);
  if (auto v = run.get("mappings")) cfg.mapping_path = resolve(base_dir, *v);
  if (auto v = run.get("taxonomy")) cfg.taxonomy_path = resolve(base_dir, *v);
  cfg.snapshot_path = resolve(base_dir, run.get("snapshot").value_or(cfg.snapshot_path));
  cfg.output_dir = resolve(base_dir, run.get("output_dir").value_or(cfg.output_dir));
  if (auto v = run.get("wikipedia_source")) cfg.wikipedia_source = *v;
  cfg.languages = run.list("languages");
  if (auto v = run.number<int>("k")) cfg.k = *v;
  if (auto v = run.number<std::uint64_t>("seed")) cfg.seed = *v;
  if (auto v = run.number<int>("restarts")) cfg.restarts = *v;
  if (auto v = run.number<int>("quantile_categories")) cfg.quantile_categories = *v;
  if (auto v = run.get("divergence_threshold")) {
    if (to_lower(*v) != "stddev") {
      cfg.divergence_threshold = run.number<double>("divergence_threshold");
      if (*cfg.divergence_threshold <= 0) {
        throw Error(ErrorKind::kConfig, "divergence_threshold must be positive");
      }
    }
  }
  if (auto v = run.get("nmi_normalization")) {
    cfg.nmi_normalization = parse_nmi_normalization(*v);
  }
  if (auto v = run.flag("iso_mappings")) cfg.iso_mappings = *v;
  if (auto v = run.flag("heuristic_mapping")) cfg.heuristic_mapping = *v;
  if (auto v = run.get("heuristic_names")) cfg.heuristic_names_path = resolve(base_dir, *v);

  Section fetch = section("fetch");
  if (auto v = fetch.number<int>("attempts")) cfg.fetch.attempts = *v;
  if (auto v = fetch.number<long>("backoff_ms")) cfg.fetch.backoff_base = std::chrono::milliseconds(*v);
  if (auto v = fetch.number<int>("concurrency")) cfg.fetch.concurrency = *v;
  if (auto v = fetch.number<long>("request_delay_ms")) {
    cfg.fetch.request_delay = std::chrono::milliseconds(*v);
  }
  if (auto v = fetch.number<long>("timeout_s")) cfg.fetch.timeout = std::chrono::seconds(*v);
  if (cfg.fetch.attempts < 1 || cfg.fetch.concurrency < 1) {
    throw Error(ErrorKind::kConfig, "[fetch] attempts and concurrency must be >= 1");
  }

  Section weights = section("weights");
  if (auto v = weights.number<double>("family")) cfg.proximity_weights.family_w = *v;
  if (auto v = weights.number<double>("genus")) cfg.proximity_weights.genus_w = *v;
  if (auto v = weights.number<double>("macroarea")) cfg.proximity_weights.macroarea_w = *v;
  if (auto v = weights.number<double>("features")) cfg.proximity_weights.feature_w = *v;
  try {
    cfg.proximity_weights.normalized();
  } catch (const Error &e) {
    throw Error(ErrorKind::kConfig, std::string("[weights] ") + e.what());
  }

  Section transfer = section("transfer");
  if (auto v = transfer.get("coverage_field")) cfg.coverage_field = parse_count_field(*v);
  cfg.coverage_sources = transfer.list("coverage_sources");
  if (auto v = transfer.get("alignments")) cfg.alignments_path = resolve(base_dir, *v);
  if (auto v = transfer.number<double>("curation_threshold")) cfg.curation_threshold = v;

  for (const auto &[name, child] : tree) {
    Section s(name, child);
    if (name.rfind("source.", 0) == 0) {
      SourceDescriptor d;
      d.source_id = name.substr(7);
      d.kind = parse_source_kind(s.require("kind"));
      d.locator = s.require("locator");
      if (d.kind == SourceKind::kStatsFile) d.locator = resolve(base_dir, d.locator);
      d.query_template = s.get("query");
      d.relation_query_template = s.get("relation_query");
      cfg.sources.push_back(std::move(d));
    } else if (name.rfind("variable.", 0) == 0) {
      VariableSpec v;
      v.name = name.substr(9);
      v.source_id = s.require("source");
      v.field = parse_count_field(s.get("field").value_or("entity_count"));
      v.transform = parse_transform(s.get("transform").value_or("log1p"));
      v.missing_policy = parse_missing_policy(s.get("missing_policy").value_or("as_zero"));
      cfg.variables.push_back(std::move(v));
    }
  }
  validate_sources(cfg.sources);
  return cfg;
}

RunConfig load_config(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kConfig, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string dir = fs::path(path).parent_path().string();
  RunConfig cfg = parse_config(ss.str(), dir);
  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  if (k < 1) throw Error(ErrorKind::kConfig, "k must be >= 1");
  if (restarts < 1) throw Error(ErrorKind::kConfig, "restarts must be >= 1");
  if (quantile_categories < 1) {
    throw Error(ErrorKind::kConfig, "quantile_categories must be >= 1");
  }
  auto must_exist = [](const std::string &what, const std::string &p) {
    if (!p.empty() && !fs::exists(p)) {
      throw Error(ErrorKind::kConfig, what + " '" + p + "' does not exist");
    }
  };
  must_exist("catalog", catalog_path);
  must_exist("mappings", mapping_path);
  if (taxonomy_path) must_exist("taxonomy", *taxonomy_path);
  if (heuristic_names_path) must_exist("heuristic_names", *heuristic_names_path);
  if (alignments_path) must_exist("alignments", *alignments_path);
  for (const auto &s : sources) {
    if (s.kind == SourceKind::kStatsFile) must_exist("stats file", s.locator);
  }
  validate_sources(sources);
}

}  // namespace lodcov
