#ifndef LODCOV_REPORT_H_
#define LODCOV_REPORT_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lodcov/cluster.h"
#include "lodcov/features.h"
#include "lodcov/langcatalog.h"
#include "lodcov/metrics.h"

namespace lodcov {

// External classification keyed by wals_code, with optional display names
// for its classes (e.g. "0 Left-Behinds").
struct ReferenceTaxonomy {
  Partition partition;
  std::map<int, std::string> class_names;
  std::size_t unresolved = 0;  // rows whose code did not resolve
};

// Reads a labelled language list. Key column: wals_code or language (taken
// as a wals code when the catalog knows it, otherwise resolved through the
// mappings), or code (always resolved through the mappings). Label column:
// `label_column` if given, else the first of category, class, label. An
// optional class_name column names the classes. When several codes land on
// one languoid the highest label wins.
ReferenceTaxonomy load_labelled_languages(const std::string &path,
                                          const Catalog *catalog,
                                          const MappingTable *mappings,
                                          const std::string &label_column = "");

struct PartitionComparison {
  double ari = 0.0;
  double nmi = 0.0;
  std::size_t intersection = 0;
  std::size_t first_size = 0;
  std::size_t second_size = 0;
  double coverage_ratio = 0.0;  // intersection / first_size
};

// ARI and NMI on the common languages; empty intersection is an error.
PartitionComparison compare_partitions(const Partition &categorization,
                                       const Partition &reference,
                                       NmiNormalization norm);

struct DivergenceRow {
  std::string language;
  std::optional<double> residual;
  std::string divergence;  // right_divergent/left_divergent/aligned/zero_coverage
};

// Everything one profile run (one variable set) produces.
struct ProfileRun {
  std::string name;
  FeatureMatrix matrix;
  KMeansCategorization kmeans;
  Categorization quantile;
  std::vector<double> scores;  // aggregate score per matrix row
  std::optional<double> silhouette;
  std::optional<double> variance_ratio;
  std::optional<PartitionComparison> reference;
  std::optional<PartitionComparison> kmeans_vs_quantile;
  std::optional<TrendModel> trend;
  std::vector<DivergenceRow> divergence;
  std::vector<std::string> notes;
};

struct ReportBundle {
  std::vector<ProfileRun> runs;
  int k = kDefaultCategories;
  std::map<int, std::string> class_names;
  std::map<std::string, std::string> language_names;  // wals_code -> name
};

std::string categorization_csv(const ProfileRun &run, const ReportBundle &bundle);
std::string scatter_csv(const ProfileRun &run, const ReportBundle &bundle);
std::string divergence_csv(const ProfileRun &run);
std::string metrics_json(const ReportBundle &bundle);
std::string report_html(const ReportBundle &bundle);

// Writes categorization_<run>.csv, scatter_<run>.csv, divergence_<run>.csv
// (two-variable runs), metrics.json and report.html into `dir`.
std::vector<std::string> write_report_bundle(const ReportBundle &bundle,
                                             const std::string &dir);

void write_text_file(const std::string &path, const std::string &content);

}  // namespace lodcov

#endif  // LODCOV_REPORT_H_
