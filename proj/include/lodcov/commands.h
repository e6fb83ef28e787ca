#ifndef LODCOV_COMMANDS_H_
#define LODCOV_COMMANDS_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lodcov/config.h"
#include "lodcov/error.h"
#include "lodcov/report.h"
#include "lodcov/transfer.h"

namespace lodcov {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitTransport = 3;
inline constexpr int kExitDegenerate = 4;

int exit_code_for(ErrorKind kind);

// Catalog plus the effective mapping table: the curated file, then ISO 639-3
// codes from the catalog, then (if enabled) name-matched heuristics.
struct Workspace {
  Catalog catalog;
  MappingTable mappings;
};

Workspace load_workspace(const RunConfig &config);

ReportBundle run_profile(const RunConfig &config, const CoverageSnapshot &snapshot,
                         const Workspace &workspace);

// Each command reports problems on `err` and returns an exit code.
int cmd_ingest(const RunConfig &config, const std::string &out_path, std::ostream &out,
               std::ostream &err);

int cmd_profile(const RunConfig &config, const std::string &snapshot_path,
                const std::string &out_dir, std::ostream &out, std::ostream &err);

struct CompareOptions {
  std::string categorization_path;
  std::string reference_path;
  std::string label_column;  // empty: category/class/label
  std::string out_path;      // empty: stdout
};

int cmd_compare(const RunConfig *config, const CompareOptions &options,
                std::ostream &out, std::ostream &err);

struct TransferOptions {
  std::string target;
  TransferStrategy strategy = TransferStrategy::kProximity;
  std::size_t n = 10;
  std::string snapshot_path;    // empty: config snapshot
  std::string alignments_path;  // empty: config alignments
  std::string out_path;
};

int cmd_transfer(const RunConfig &config, const TransferOptions &options,
                 std::ostream &out, std::ostream &err);

struct EvalOptions {
  std::string rankings_path;
  std::vector<long> k_list{1, 3, 10};
  std::string leaderboard_path;
  std::string out_path;
};

int cmd_eval_mkgc(const EvalOptions &options, std::ostream &out, std::ostream &err);

}  // namespace lodcov

#endif  // LODCOV_COMMANDS_H_
