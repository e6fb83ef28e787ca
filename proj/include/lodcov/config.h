#ifndef LODCOV_CONFIG_H_
#define LODCOV_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lodcov/cluster.h"
#include "lodcov/features.h"
#include "lodcov/ingest.h"
#include "lodcov/langcatalog.h"
#include "lodcov/metrics.h"

namespace lodcov {

// Settings shared by all CLI verbs, read from an INI-style file:
//
//   [run]        catalog, mappings, taxonomy, snapshot, output_dir, k, seed,
//                restarts, quantile_categories, divergence_threshold,
//                nmi_normalization, wikipedia_source, languages,
//                iso_mappings, heuristic_mapping, heuristic_names
//   [fetch]      attempts, backoff_ms, concurrency, request_delay_ms,
//                timeout_s
//   [weights]    family, genus, macroarea, features
//   [transfer]   coverage_field, coverage_sources, alignments,
//                curation_threshold
//   [source.ID]  kind, locator, query, relation_query
//   [variable.NAME]  source, field, transform, missing_policy
//
// Relative paths are resolved against the directory holding the file.
struct RunConfig {
  std::string config_dir;
  std::vector<SourceDescriptor> sources;
  std::string catalog_path;
  std::string mapping_path;
  std::optional<std::string> taxonomy_path;
  std::string snapshot_path = "snapshot.json";
  std::string output_dir = "out";
  std::vector<VariableSpec> variables;
  std::string wikipedia_source = "wikipedia";
  std::vector<std::string> languages;
  int k = kDefaultCategories;
  std::uint64_t seed = kDefaultSeed;
  int restarts = kDefaultRestarts;
  int quantile_categories = kDefaultCategories;
  ProximityWeights proximity_weights;
  // Empty: one sample standard deviation of the residuals.
  std::optional<double> divergence_threshold;
  NmiNormalization nmi_normalization = NmiNormalization::kArithmetic;
  bool iso_mappings = true;
  bool heuristic_mapping = false;
  std::optional<std::string> heuristic_names_path;
  FetchPolicy fetch;
  CountField coverage_field = CountField::kEntities;
  std::vector<std::string> coverage_sources;
  std::optional<std::string> alignments_path;
  std::optional<double> curation_threshold;

  // k >= 1, referenced files exist, sources well-formed.
  void validate() const;
};

RunConfig load_config(const std::string &path);
RunConfig parse_config(const std::string &text, const std::string &base_dir);

}  // namespace lodcov

#endif  // LODCOV_CONFIG_H_
