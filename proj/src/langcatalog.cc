#include "lodcov/langcatalog.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "lodcov/csv.h"
#include "lodcov/error.h"

namespace lodcov {

Catalog::Catalog(std::vector<Languoid> languoids)
    : languoids_(std::move(languoids)) {
  std::sort(languoids_.begin(), languoids_.end(),
            [](const Languoid &a, const Languoid &b) {
              return a.wals_code < b.wals_code;
            });
  for (std::size_t i = 0; i < languoids_.size(); ++i) {
    if (languoids_[i].wals_code.empty()) {
      throw Error(ErrorKind::kValidation, "languoid with empty wals_code");
    }
    if (i > 0 && languoids_[i].wals_code == languoids_[i - 1].wals_code) {
      throw Error(ErrorKind::kDuplicateKey,
                  "duplicate wals_code '" + languoids_[i].wals_code + "'");
    }
  }
}

const Languoid *Catalog::find(std::string_view wals_code) const {
  auto it = std::lower_bound(
      languoids_.begin(), languoids_.end(), wals_code,
      [](const Languoid &l, std::string_view code) { return l.wals_code < code; });
  if (it == languoids_.end() || it->wals_code != wals_code) return nullptr;
  return &*it;
}

namespace {

const std::set<std::string> kIgnoredColumns = {
    "glottocode", "latitude", "longitude", "countrycodes", "id",
};

Catalog catalog_from_table(const Table &table) {
  std::size_t code_col = table.require_column("wals_code");
  std::size_t name_col = table.require_column("name");
  std::size_t genus_col = table.require_column("genus");
  std::size_t family_col = table.require_column("family");
  std::size_t area_col = table.require_column("macroarea");
  std::optional<std::size_t> iso_col = table.column("iso639_3");
  if (!iso_col) iso_col = table.column("iso_code");

  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < table.header().size(); ++c) {
    if (c == code_col || c == name_col || c == genus_col || c == family_col ||
        c == area_col || (iso_col && c == *iso_col)) {
      continue;
    }
    if (kIgnoredColumns.count(to_lower(table.header()[c]))) continue;
    feature_cols.push_back(c);
  }

  std::vector<Languoid> languoids;
  std::set<std::string> seen;
  for (const auto &row : table.rows()) {
    Languoid l;
    l.wals_code = trim(row[code_col]);
    if (l.wals_code.empty()) {
      throw Error(ErrorKind::kValidation, "row with empty wals_code");
    }
    if (!seen.insert(l.wals_code).second) {
      throw Error(ErrorKind::kDuplicateKey,
                  "duplicate wals_code '" + l.wals_code + "'");
    }
    l.name = trim(row[name_col]);
    l.genus = trim(row[genus_col]);
    l.family = trim(row[family_col]);
    l.macroarea = trim(row[area_col]);
    if (iso_col) {
      std::string iso = trim(row[*iso_col]);
      if (!iso.empty()) l.iso639_3 = iso;
    }
    for (std::size_t c : feature_cols) {
      std::string value = trim(row[c]);
      if (!value.empty()) l.features.emplace(table.header()[c], value);
    }
    languoids.push_back(std::move(l));
  }
  return Catalog(std::move(languoids));
}

MappingConfidence parse_confidence(const std::string &text) {
  std::string t = to_lower(trim(text));
  if (t.empty() || t == "exact") return MappingConfidence::kExact;
  if (t == "manual") return MappingConfidence::kManual;
  if (t == "heuristic") return MappingConfidence::kHeuristic;
  throw Error(ErrorKind::kValidation, "unknown mapping confidence '" + text + "'");
}

}  // namespace

Catalog parse_wals_catalog(std::string_view text) {
  return catalog_from_table(Table::parse(text));
}

Catalog load_wals_catalog(const std::string &path) {
  Table table = Table::read_file(path);
  try {
    return catalog_from_table(table);
  } catch (const Error &e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

const char *confidence_name(MappingConfidence c) {
  switch (c) {
    case MappingConfidence::kExact: return "exact";
    case MappingConfidence::kManual: return "manual";
    case MappingConfidence::kHeuristic: return "heuristic";
  }
  return "exact";
}

MappingTable::MappingTable(const Catalog &catalog,
                           std::vector<CodeMapping> mappings)
    : mappings_(std::move(mappings)) {
  std::sort(mappings_.begin(), mappings_.end(),
            [](const CodeMapping &a, const CodeMapping &b) {
              return a.external_code < b.external_code;
            });
  for (std::size_t i = 0; i < mappings_.size(); ++i) {
    const auto &m = mappings_[i];
    if (m.external_code.empty()) {
      throw Error(ErrorKind::kValidation, "mapping with empty external_code");
    }
    if (!catalog.contains(m.wals_code)) {
      throw Error(ErrorKind::kValidation,
                  "mapping '" + m.external_code + "' references unknown wals_code '" +
                      m.wals_code + "'");
    }
    if (i > 0 && mappings_[i - 1].external_code == m.external_code) {
      throw Error(ErrorKind::kDuplicateKey,
                  "external code '" + m.external_code + "' mapped more than once");
    }
  }
}

const CodeMapping *MappingTable::find(std::string_view external_code) const {
  auto it = std::lower_bound(mappings_.begin(), mappings_.end(), external_code,
                             [](const CodeMapping &m, std::string_view code) {
                               return m.external_code < code;
                             });
  if (it == mappings_.end() || it->external_code != external_code) return nullptr;
  return &*it;
}

std::vector<std::string> MappingTable::mapped_wals_codes() const {
  std::set<std::string> codes;
  for (const auto &m : mappings_) codes.insert(m.wals_code);
  return {codes.begin(), codes.end()};
}

MappingTable load_mappings(const std::string &path, const Catalog &catalog) {
  Table table = Table::read_file(path);
  std::size_t ext_col = table.require_column("external_code");
  std::size_t wals_col = table.require_column("wals_code");
  std::optional<std::size_t> conf_col = table.column("confidence");
  std::vector<CodeMapping> mappings;
  for (const auto &row : table.rows()) {
    CodeMapping m;
    m.external_code = trim(row[ext_col]);
    m.wals_code = trim(row[wals_col]);
    if (conf_col) m.confidence = parse_confidence(row[*conf_col]);
    mappings.push_back(std::move(m));
  }
  try {
    return MappingTable(catalog, std::move(mappings));
  } catch (const Error &e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

std::vector<CodeMapping> iso_mappings(const Catalog &catalog) {
  std::map<std::string, std::vector<std::string>> by_iso;
  for (const auto &l : catalog.languoids()) {
    if (l.iso639_3) by_iso[*l.iso639_3].push_back(l.wals_code);
  }
  std::vector<CodeMapping> out;
  for (const auto &[iso, codes] : by_iso) {
    if (codes.size() == 1) {
      out.push_back({iso, codes.front(), MappingConfidence::kExact});
    }
  }
  return out;
}

std::vector<CodeMapping> heuristic_mappings(
    const Catalog &catalog,
    const std::vector<std::pair<std::string, std::string>> &code_names) {
  std::map<std::string, std::vector<std::string>> by_name;
  for (const auto &l : catalog.languoids()) {
    by_name[to_lower(l.name)].push_back(l.wals_code);
  }
  std::vector<CodeMapping> out;
  std::set<std::string> used;
  for (const auto &[code, name] : code_names) {
    auto it = by_name.find(to_lower(trim(name)));
    if (it == by_name.end() || it->second.size() != 1) continue;
    if (!used.insert(code).second) continue;
    out.push_back({code, it->second.front(), MappingConfidence::kHeuristic});
  }
  return out;
}

std::vector<CodeMapping> merge_mappings(std::vector<CodeMapping> base,
                                        const std::vector<CodeMapping> &extra) {
  std::set<std::string> known;
  for (const auto &m : base) known.insert(m.external_code);
  for (const auto &m : extra) {
    if (known.insert(m.external_code).second) base.push_back(m);
  }
  return base;
}

const Languoid *resolve_code(const Catalog &catalog,
                             const MappingTable &mappings,
                             std::string_view external_code) {
  const CodeMapping *m = mappings.find(external_code);
  if (!m) return nullptr;
  return catalog.find(m->wals_code);
}

const Languoid *resolve_language(const Catalog &catalog,
                                 const MappingTable &mappings,
                                 std::string_view code) {
  if (const Languoid *l = resolve_code(catalog, mappings, code)) return l;
  return catalog.find(code);
}

ProximityWeights ProximityWeights::normalized() const {
  if (family_w < 0 || genus_w < 0 || macroarea_w < 0 || feature_w < 0) {
    throw Error(ErrorKind::kArgument, "proximity weights must be non-negative");
  }
  double total = family_w + genus_w + macroarea_w + feature_w;
  if (!(total > 0)) {
    throw Error(ErrorKind::kArgument, "proximity weights sum to zero");
  }
  return {family_w / total, genus_w / total, macroarea_w / total,
          feature_w / total};
}

double feature_overlap(const Languoid &a, const Languoid &b) {
  std::size_t shared = 0;
  std::size_t agree = 0;
  auto ia = a.features.begin();
  auto ib = b.features.begin();
  while (ia != a.features.end() && ib != b.features.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      ++shared;
      if (ia->second == ib->second) ++agree;
      ++ia;
      ++ib;
    }
  }
  if (shared == 0) return 0.0;
  return static_cast<double>(agree) / static_cast<double>(shared);
}

double proximity(const Languoid &a, const Languoid &b,
                 const ProximityWeights &weights) {
  ProximityWeights w = weights.normalized();
  double score = 0.0;
  if (a.family == b.family) score += w.family_w;
  if (a.genus == b.genus) score += w.genus_w;
  if (a.macroarea == b.macroarea) score += w.macroarea_w;
  score += w.feature_w * feature_overlap(a, b);
  return std::clamp(score, 0.0, 1.0);
}

}  // namespace lodcov
