#ifndef LODCOV_LANGCATALOG_H_
#define LODCOV_LANGCATALOG_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lodcov {

// A WALS languoid. Features map a WALS feature column to its value; cells
// left empty in the export are simply absent.
struct Languoid {
  std::string wals_code;
  std::string name;
  std::optional<std::string> iso639_3;
  std::string family;
  std::string genus;
  std::string macroarea;
  std::map<std::string, std::string> features;

  bool operator==(const Languoid &) const = default;
};

// Immutable set of languoids keyed by wals_code.
class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<Languoid> languoids);

  const Languoid *find(std::string_view wals_code) const;
  bool contains(std::string_view wals_code) const {
    return find(wals_code) != nullptr;
  }
  std::size_t size() const { return languoids_.size(); }
  bool empty() const { return languoids_.empty(); }

  // Sorted by wals_code.
  const std::vector<Languoid> &languoids() const { return languoids_; }

 private:
  std::vector<Languoid> languoids_;
};

// Reads a comma- or tab-separated WALS languoid export. Required columns:
// wals_code, name, genus, family, macroarea. An iso_code/iso639_3 column is
// picked up when present; glottocode, latitude, longitude and countrycodes
// are ignored; all other columns are features.
Catalog load_wals_catalog(const std::string &path);
Catalog parse_wals_catalog(std::string_view text);

enum class MappingConfidence { kExact, kManual, kHeuristic };

const char *confidence_name(MappingConfidence c);

struct CodeMapping {
  std::string external_code;
  std::string wals_code;
  MappingConfidence confidence = MappingConfidence::kExact;

  bool operator==(const CodeMapping &) const = default;
};

// External language codes (ISO 639, Wikipedia edition, KG language tag)
// resolved to catalog entries. Validated against a catalog on construction:
// every target must exist and each external code maps to one languoid.
class MappingTable {
 public:
  MappingTable() = default;
  MappingTable(const Catalog &catalog, std::vector<CodeMapping> mappings);

  const CodeMapping *find(std::string_view external_code) const;
  const std::vector<CodeMapping> &mappings() const { return mappings_; }

  // wals_codes targeted by at least one mapping, sorted.
  std::vector<std::string> mapped_wals_codes() const;

 private:
  std::vector<CodeMapping> mappings_;  // sorted by external_code
};

// File columns: external_code, wals_code, confidence.
MappingTable load_mappings(const std::string &path, const Catalog &catalog);

// Mappings derived from the catalog's own ISO 639-3 column (confidence
// exact). ISO codes shared by several languoids are left out.
std::vector<CodeMapping> iso_mappings(const Catalog &catalog);

// Name-matching auto-mapping: each (external code, display name) pair whose
// name equals a languoid name case-insensitively, and matches exactly one
// languoid, is mapped with confidence heuristic.
std::vector<CodeMapping> heuristic_mappings(
    const Catalog &catalog,
    const std::vector<std::pair<std::string, std::string>> &code_names);

// Appends mappings from `extra` whose external code is not already in
// `base`; curated entries win.
std::vector<CodeMapping> merge_mappings(std::vector<CodeMapping> base,
                                        const std::vector<CodeMapping> &extra);

const Languoid *resolve_code(const Catalog &catalog,
                             const MappingTable &mappings,
                             std::string_view external_code);

// resolve_code, falling back to treating the code as a wals_code.
const Languoid *resolve_language(const Catalog &catalog,
                                 const MappingTable &mappings,
                                 std::string_view code);

struct ProximityWeights {
  double family_w = 0.25;
  double genus_w = 0.35;
  double macroarea_w = 0.10;
  double feature_w = 0.30;

  // Rescaled to sum to 1. Negative or all-zero weights are an argument error.
  ProximityWeights normalized() const;
};

double feature_overlap(const Languoid &a, const Languoid &b);

// Weighted agreement on family, genus, macro-area and WALS features.
// Weights are normalized before use.
double proximity(const Languoid &a, const Languoid &b,
                 const ProximityWeights &w);

}  // namespace lodcov

#endif  // LODCOV_LANGCATALOG_H_
