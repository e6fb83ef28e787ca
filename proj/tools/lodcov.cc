// lodcov: coverage profiling of languages across linked open data.

#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "lodcov/commands.h"
#include "lodcov/csv.h"

using namespace lodcov;

namespace {

int with_config(const std::string &path, const std::optional<int> &k,
                const std::optional<std::uint64_t> &seed,
                const std::function<int(const RunConfig &)> &fn) {
  RunConfig cfg;
  try {
    cfg = load_config(path);
    if (k) cfg.k = *k;
    if (seed) cfg.seed = *seed;
    cfg.validate();
  } catch (const Error &e) {
    std::cerr << "error (" << error_kind_name(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
  return fn(cfg);
}

std::vector<long> parse_k_list(const std::string &text) {
  std::vector<long> ks;
  for (const auto &item : split(text, ',')) {
    std::string t = trim(item);
    if (t.empty()) continue;
    auto v = parse_count(t);
    if (!v || *v < 1) throw Error(ErrorKind::kArgument, "--k-list entries must be >= 1");
    ks.push_back(static_cast<long>(*v));
  }
  if (ks.empty()) throw Error(ErrorKind::kArgument, "--k-list is empty");
  return ks;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Language coverage profiling across linked open data"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  std::optional<int> k;
  std::optional<std::uint64_t> seed;

  auto *ingest = app.add_subcommand("ingest", "Query configured sources into a snapshot");
  ingest->add_option("--config", config_path, "INI run configuration")->required();
  ingest->add_option("--out", out, "Snapshot path (default: config snapshot)");

  std::string snapshot;
  auto *profile = app.add_subcommand("profile", "Categorize languages and write reports");
  profile->add_option("--config", config_path, "INI run configuration")->required();
  profile->add_option("--snapshot", snapshot, "Snapshot path (default: config snapshot)");
  profile->add_option("--out", out, "Output directory (default: config output_dir)");
  profile->add_option("--k", k, "Number of categories");
  profile->add_option("--seed", seed, "Clustering seed");

  CompareOptions cmp;
  auto *compare = app.add_subcommand("compare", "ARI and NMI against a reference taxonomy");
  compare->add_option("--config", config_path, "INI run configuration (for code resolution)");
  compare->add_option("--categorization", cmp.categorization_path, "Categorization CSV")->required();
  compare->add_option("--reference", cmp.reference_path, "Reference taxonomy CSV")->required();
  compare->add_option("--column", cmp.label_column, "Label column in the categorization");
  compare->add_option("--out", cmp.out_path, "JSON output path (default: stdout)");

  TransferOptions tr;
  std::string strategy = "proximity";
  auto *transfer = app.add_subcommand("transfer", "Rank source languages for a target");
  transfer->add_option("--config", config_path, "INI run configuration")->required();
  transfer->add_option("--target", tr.target, "Target language code")->required();
  transfer->add_option("--strategy", strategy, "coverage, proximity, alignment or combined");
  transfer->add_option("--n", tr.n, "Number of sources");
  transfer->add_option("--snapshot", tr.snapshot_path, "Snapshot path");
  transfer->add_option("--alignments", tr.alignments_path, "Alignment records CSV");
  transfer->add_option("--out", tr.out_path, "JSON output path (default: stdout)");

  EvalOptions ev;
  std::string k_list = "1,3,10";
  auto *eval = app.add_subcommand("eval-mkgc", "MRR, Hits@k and model leaderboards");
  eval->add_option("--rankings", ev.rankings_path, "CSV of query_id,gold_rank");
  eval->add_option("--k-list", k_list, "Comma-separated cutoffs");
  eval->add_option("--leaderboard", ev.leaderboard_path, "Per-language model results CSV");
  eval->add_option("--out", ev.out_path, "JSON output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (ingest->parsed()) {
    return with_config(config_path, std::nullopt, std::nullopt, [&](const RunConfig &cfg) {
      return cmd_ingest(cfg, out, std::cout, std::cerr);
    });
  }
  if (profile->parsed()) {
    return with_config(config_path, k, seed, [&](const RunConfig &cfg) {
      return cmd_profile(cfg, snapshot, out, std::cout, std::cerr);
    });
  }
  if (compare->parsed()) {
    if (config_path.empty()) return cmd_compare(nullptr, cmp, std::cout, std::cerr);
    return with_config(config_path, std::nullopt, std::nullopt, [&](const RunConfig &cfg) {
      return cmd_compare(&cfg, cmp, std::cout, std::cerr);
    });
  }
  if (transfer->parsed()) {
    try {
      tr.strategy = parse_strategy(strategy);
    } catch (const Error &e) {
      std::cerr << "error: " << e.what() << "\n";
      return exit_code_for(e.kind());
    }
    return with_config(config_path, std::nullopt, std::nullopt, [&](const RunConfig &cfg) {
      return cmd_transfer(cfg, tr, std::cout, std::cerr);
    });
  }
  if (eval->parsed()) {
    try {
      ev.k_list = parse_k_list(k_list);
    } catch (const Error &e) {
      std::cerr << "error: " << e.what() << "\n";
      return exit_code_for(e.kind());
    }
    return cmd_eval_mkgc(ev, std::cout, std::cerr);
  }
  return kExitFailure;
}
