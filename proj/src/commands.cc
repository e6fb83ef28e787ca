#include "lodcov/commands.h"

#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <set>

#include "lodcov/csv.h"

namespace lodcov {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kTransport:
    case ErrorKind::kShape:
      return kExitTransport;
    case ErrorKind::kEmptyMatrix:
    case ErrorKind::kInsufficientData:
    case ErrorKind::kUndefinedMetric:
    case ErrorKind::kDegenerateFit:
    case ErrorKind::kEmptyIntersection:
      return kExitDegenerate;
    default:
      return kExitConfig;
  }
}

namespace {

template <typename Fn>
int guarded(std::ostream &err, Fn &&fn) {
  try {
    return fn();
  } catch (const Error &e) {
    err << "error (" << error_kind_name(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

void emit(const std::string &path, const std::string &content, std::ostream &out) {
  if (path.empty()) {
    out << content;
  } else {
    write_text_file(path, content);
  }
}

void require_path(const std::string &path, const char *what) {
  if (path.empty()) throw Error(ErrorKind::kConfig, std::string("no ") + what + " configured");
}

}  // namespace

Workspace load_workspace(const RunConfig &config) {
  require_path(config.catalog_path, "catalog");
  Workspace ws;
  ws.catalog = load_wals_catalog(config.catalog_path);
  std::vector<CodeMapping> mappings;
  if (!config.mapping_path.empty()) {
    mappings = load_mappings(config.mapping_path, ws.catalog).mappings();
  }
  if (config.iso_mappings) mappings = merge_mappings(std::move(mappings), iso_mappings(ws.catalog));
  if (config.heuristic_mapping) {
    require_path(config.heuristic_names_path.value_or(""), "heuristic_names file");
    Table names = Table::read_file(*config.heuristic_names_path);
    std::size_t code_col = names.require_column("code");
    std::size_t name_col = names.require_column("name");
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto &row : names.rows()) pairs.emplace_back(trim(row[code_col]), row[name_col]);
    mappings = merge_mappings(std::move(mappings), heuristic_mappings(ws.catalog, pairs));
  }
  ws.mappings = MappingTable(ws.catalog, std::move(mappings));
  return ws;
}

int cmd_ingest(const RunConfig &config, const std::string &out_path, std::ostream &out,
               std::ostream &err) {
  return guarded(err, [&]() {
    if (config.sources.empty()) throw Error(ErrorKind::kConfig, "no sources configured");
    validate_sources(config.sources);

    std::vector<std::string> languages = config.languages;
    if (languages.empty() && !config.catalog_path.empty()) {
      Workspace ws = load_workspace(config);
      for (const auto &m : ws.mappings.mappings()) {
        if (is_valid_language_code(m.external_code)) languages.push_back(m.external_code);
      }
    }
    bool needs_languages = false;
    for (const auto &s : config.sources) {
      if (s.kind != SourceKind::kStatsFile) needs_languages = true;
    }
    if (needs_languages && languages.empty()) {
      throw Error(ErrorKind::kConfig, "no languages to query: set [run] languages or a catalog");
    }

    CoverageSnapshot snapshot;
    snapshot.retrieved_at = utc_timestamp_now();
    for (const auto &source : config.sources) {
      std::string note = std::string(source_kind_name(source.kind)) + " " + source.locator;
      FetchOutcome outcome;
      switch (source.kind) {
        case SourceKind::kMediaWikiApi:
          outcome = fetch_wikipedia_outcome(source, languages, config.fetch);
          break;
        case SourceKind::kSparqlEndpoint:
          outcome = fetch_sparql_outcome(source, languages, config.fetch);
          break;
        case SourceKind::kStatsFile:
          outcome.records = load_stats_file(source);
          break;
      }
      for (auto &r : outcome.records) snapshot.records.push_back(std::move(r));
      for (const auto &f : outcome.failures) {
        snapshot.warnings.push_back(source.source_id + ": " + f.message);
        err << "warning: " << source.source_id << ": " << f.message << "\n";
      }
      snapshot.source_versions[source.source_id] = note;
      out << source.source_id << ": " << outcome.records.size() << " records, "
          << outcome.failures.size() << " failures\n";
    }
    std::string path = out_path.empty() ? config.snapshot_path : out_path;
    save_snapshot(snapshot, path);
    out << "wrote " << path << " (" << snapshot.records.size() << " records)\n";
    if (!snapshot.warnings.empty()) {
      err << "partial snapshot: " << snapshot.warnings.size() << " failed requests\n";
      return kExitTransport;
    }
    return kExitOk;
  });
}

namespace {

Partition to_partition(const Categorization &c) { return Partition{c.labels}; }

ProfileRun profile_one(const std::string &name, const std::vector<VariableSpec> &specs,
                       const RunConfig &config, const CoverageSnapshot &snapshot,
                       const Workspace &ws, const ReferenceTaxonomy *reference) {
  ProfileRun run;
  run.name = name;
  run.matrix = build_matrix(snapshot, ws.catalog, ws.mappings, specs);
  run.kmeans = categorize_kmeans(run.matrix, config.k, config.seed, config.restarts);

  run.scores = aggregate_scores(run.matrix);
  std::map<std::string, double> score_map;
  for (std::size_t i = 0; i < run.matrix.rows(); ++i) {
    score_map[run.matrix.languages[i]] = run.scores[i];
  }
  run.quantile = quantile_categorize(score_map, config.quantile_categories);

  Partition found = to_partition(run.kmeans.categorization);
  int categories = run.kmeans.categorization.num_categories();
  if (categories >= 2) {
    run.silhouette = silhouette(run.matrix, found);
    if (run.matrix.rows() > static_cast<std::size_t>(categories)) {
      run.variance_ratio = variance_ratio(run.matrix, found);
    }
  } else {
    run.notes.push_back("single category: silhouette and variance ratio undefined");
  }
  if (reference) {
    try {
      run.reference = compare_partitions(found, reference->partition, config.nmi_normalization);
    } catch (const Error &e) {
      if (e.kind() != ErrorKind::kEmptyIntersection) throw;
      run.notes.push_back("no language shared with the reference taxonomy");
    }
  }
  run.kmeans_vs_quantile =
      compare_partitions(found, to_partition(run.quantile), config.nmi_normalization);

  if (run.matrix.values.cols() == 2) {
    FeatureMatrix active = partition_zero_coverage(run.matrix).active;
    try {
      run.trend = fit_trend(active, config.divergence_threshold.value_or(0.0));
    } catch (const Error &e) {
      if (e.kind() != ErrorKind::kDegenerateFit) throw;
      run.notes.push_back(std::string("no trend: ") + e.what());
    }
    for (std::size_t i = 0; i < run.matrix.rows(); ++i) {
      const std::string &code = run.matrix.languages[i];
      DivergenceRow row{code, std::nullopt, "zero_coverage"};
      if (!run.matrix.zero_coverage_mask[i]) {
        if (run.trend) {
          row.residual = run.trend->residuals.at(code);
          row.divergence = divergence_name(classify_divergence(*run.trend, code));
        } else {
          row.divergence = "unfitted";
        }
      }
      run.divergence.push_back(std::move(row));
    }
  }
  return run;
}

}  // namespace

ReportBundle run_profile(const RunConfig &config, const CoverageSnapshot &snapshot,
                         const Workspace &ws) {
  ReportBundle bundle;
  bundle.k = config.k;
  for (const auto &l : ws.catalog.languoids()) bundle.language_names[l.wals_code] = l.name;

  std::optional<ReferenceTaxonomy> reference;
  if (config.taxonomy_path) {
    reference = load_labelled_languages(*config.taxonomy_path, &ws.catalog, &ws.mappings);
    bundle.class_names = reference->class_names;
  }
  const ReferenceTaxonomy *ref = reference ? &*reference : nullptr;

  if (!config.variables.empty()) {
    bundle.runs.push_back(profile_one("custom", config.variables, config, snapshot, ws, ref));
    return bundle;
  }

  // One run per knowledge graph: Wikipedia articles against its entities.
  std::set<std::string> kg_sources;
  for (const auto &r : snapshot.records) {
    if (r.source_id != config.wikipedia_source && r.entity_count) kg_sources.insert(r.source_id);
  }
  if (kg_sources.empty()) {
    throw Error(ErrorKind::kEmptyMatrix, "snapshot has no knowledge-graph entity counts");
  }
  VariableSpec x{"wikipedia_articles", config.wikipedia_source, CountField::kArticles,
                 Transform::kLog1p, MissingPolicy::kAsZero};
  bool has_wikipedia = false;
  for (const auto &r : snapshot.records) {
    if (r.source_id == config.wikipedia_source) has_wikipedia = true;
  }
  for (const auto &kg : kg_sources) {
    VariableSpec y{kg + "_entities", kg, CountField::kEntities, Transform::kLog1p,
                   MissingPolicy::kAsZero};
    std::vector<VariableSpec> specs;
    if (has_wikipedia) specs.push_back(x);
    specs.push_back(y);
    bundle.runs.push_back(profile_one(kg, specs, config, snapshot, ws, ref));
  }
  return bundle;
}

int cmd_profile(const RunConfig &config, const std::string &snapshot_path,
                const std::string &out_dir, std::ostream &out, std::ostream &err) {
  return guarded(err, [&]() {
    std::string snap = snapshot_path.empty() ? config.snapshot_path : snapshot_path;
    CoverageSnapshot snapshot = load_snapshot(snap);
    Workspace ws = load_workspace(config);
    ReportBundle bundle = run_profile(config, snapshot, ws);
    std::string dir = out_dir.empty() ? config.output_dir : out_dir;
    for (const auto &path : write_report_bundle(bundle, dir)) out << "wrote " << path << "\n";

    // Timestamps stay out of the primary outputs.
    json meta;
    meta["generated_at"] = utc_timestamp_now();
    meta["snapshot"] = snap;
    meta["snapshot_retrieved_at"] = snapshot.retrieved_at;
    meta["k"] = config.k;
    meta["seed"] = config.seed;
    meta["restarts"] = config.restarts;
    write_text_file((fs::path(dir) / "run_metadata.json").string(), meta.dump(2) + "\n");
    for (const auto &run : bundle.runs) {
      for (const auto &note : run.notes) err << "note: " << run.name << ": " << note << "\n";
    }
    return kExitOk;
  });
}

int cmd_compare(const RunConfig *config, const CompareOptions &options, std::ostream &out,
                std::ostream &err) {
  return guarded(err, [&]() {
    std::optional<Workspace> ws;
    if (config && !config->catalog_path.empty()) ws = load_workspace(*config);
    const Catalog *catalog = ws ? &ws->catalog : nullptr;
    const MappingTable *mappings = ws ? &ws->mappings : nullptr;
    ReferenceTaxonomy found = load_labelled_languages(options.categorization_path, catalog,
                                                      mappings, options.label_column);
    ReferenceTaxonomy reference =
        load_labelled_languages(options.reference_path, catalog, mappings);
    NmiNormalization norm = config ? config->nmi_normalization : NmiNormalization::kArithmetic;
    PartitionComparison c = compare_partitions(found.partition, reference.partition, norm);
    json doc;
    doc["ari"] = c.ari;
    doc["nmi"] = c.nmi;
    doc["intersection"] = c.intersection;
    doc["categorization_size"] = c.first_size;
    doc["reference_size"] = c.second_size;
    doc["coverage_ratio"] = c.coverage_ratio;
    doc["reference_unresolved"] = reference.unresolved;
    emit(options.out_path, doc.dump(2) + "\n", out);
    return kExitOk;
  });
}

int cmd_transfer(const RunConfig &config, const TransferOptions &options, std::ostream &out,
                 std::ostream &err) {
  return guarded(err, [&]() {
    Workspace ws = load_workspace(config);
    const Languoid *target = resolve_language(ws.catalog, ws.mappings, options.target);
    if (!target) {
      throw Error(ErrorKind::kArgument, "unresolved target '" + options.target + "'");
    }
    std::size_t n = options.n;
    if (n < 1) throw Error(ErrorKind::kArgument, "n must be >= 1");
    std::size_t everyone = std::max<std::size_t>(1, ws.catalog.size());

    auto coverage = [&](std::size_t count) {
      std::string snap = options.snapshot_path.empty() ? config.snapshot_path : options.snapshot_path;
      CoverageSnapshot snapshot = load_snapshot(snap);
      CoverageScoreOptions opts{config.coverage_field, config.coverage_sources};
      return select_by_coverage(target->wals_code, snapshot, ws.catalog, ws.mappings, count, opts);
    };
    auto proximity_plan = [&](std::size_t count) {
      return select_by_proximity(target->wals_code, ws.catalog, config.proximity_weights, count);
    };
    std::string align_path = options.alignments_path.empty()
                                 ? config.alignments_path.value_or("")
                                 : options.alignments_path;
    auto alignment = [&](std::size_t count) {
      require_path(align_path, "alignments file");
      std::vector<AlignmentRecord> records = load_alignment_records(align_path);
      for (auto &r : records) {
        if (const Languoid *l = resolve_language(ws.catalog, ws.mappings, r.lang_a)) r.lang_a = l->wals_code;
        if (const Languoid *l = resolve_language(ws.catalog, ws.mappings, r.lang_b)) r.lang_b = l->wals_code;
      }
      std::size_t excluded = 0;
      if (config.curation_threshold) {
        CurationResult curated = curate_alignments(records, *config.curation_threshold);
        excluded = curated.excluded.size();
        records = std::move(curated.kept);
      }
      TransferPlan plan = select_by_alignment_volume(
          target->wals_code, AlignmentStats::from_records(records), count);
      if (config.curation_threshold) {
        plan.parameters["curation_threshold"] = format_real(*config.curation_threshold);
        plan.parameters["curation_excluded"] = std::to_string(excluded);
      }
      return plan;
    };

    TransferPlan plan;
    switch (options.strategy) {
      case TransferStrategy::kCoverage: plan = coverage(n); break;
      case TransferStrategy::kProximity: plan = proximity_plan(n); break;
      case TransferStrategy::kAlignmentVolume: plan = alignment(n); break;
      case TransferStrategy::kCombined: {
        std::vector<TransferPlan> parts;
        parts.push_back(proximity_plan(everyone));
        std::string snap = options.snapshot_path.empty() ? config.snapshot_path : options.snapshot_path;
        if (fs::exists(snap)) parts.push_back(coverage(everyone));
        if (!align_path.empty()) parts.push_back(alignment(everyone));
        plan = combine_plans(target->wals_code, parts, n);
        break;
      }
    }
    emit(options.out_path, plan_to_json(plan), out);
    return kExitOk;
  });
}

int cmd_eval_mkgc(const EvalOptions &options, std::ostream &out, std::ostream &err) {
  return guarded(err, [&]() {
    if (options.rankings_path.empty() && options.leaderboard_path.empty()) {
      throw Error(ErrorKind::kArgument, "nothing to evaluate: pass --rankings or --leaderboard");
    }
    json doc;
    if (!options.rankings_path.empty()) {
      if (!fs::exists(options.rankings_path)) {
        throw Error(ErrorKind::kIo, "rankings file '" + options.rankings_path + "' not found");
      }
      std::vector<RankingOutcome> outcomes = load_ranking_outcomes(options.rankings_path);
      doc["queries"] = outcomes.size();
      doc["mrr"] = mean_reciprocal_rank(outcomes);
      doc["hits"] = json::object();
      for (long k : options.k_list) doc["hits"][std::to_string(k)] = hits_at_k(outcomes, k);
    }
    if (!options.leaderboard_path.empty()) {
      Leaderboard board = leaderboard(load_model_results(options.leaderboard_path));
      doc["leaderboard"] = json::parse(board.to_json());
      if (!options.out_path.empty()) out << board.to_text();
    }
    emit(options.out_path, doc.dump(2) + "\n", out);
    return kExitOk;
  });
}

}  // namespace lodcov
