#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sroc/contingency.hpp"
#include "sroc/roc.hpp"
#include "sroc/simulate.hpp"

namespace sroc::cli {

enum class Subcommand { Analyze, Simulate, Coverage };

enum ExitCode : int { kOk = 0, kInputError = 2, kFitFailure = 3, kInternalError = 4 };

struct CliConfig {
  Subcommand subcommand = Subcommand::Analyze;
  std::string input_path;
  /// phm, bivariate or both (coverage accepts phm or bivariate).
  std::string model = "both";
  EffectsMode effects = EffectsMode::Random;
  CorrectionMode correction = CorrectionMode::Affected;
  std::optional<std::string> group_column;
  bool weight_by_cases = false;
  std::optional<double> ai_auc;
  std::optional<Interval> ai_auc_ci;
  int bootstrap_b = 2000;
  double level = kDefaultLevel;
  std::uint64_t seed = 0;
  std::optional<std::string> json_out;
  std::optional<std::string> svg_out;
  /// Simulated dataset destination for `simulate` (stdout when absent).
  std::optional<std::string> out_path;
  SimConfig sim;
  int n_sims = 500;
  /// 0 = hardware concurrency.
  unsigned threads = 0;
};

/// Reads the reader CSV. Header is `reader_id,tp,fp,fn,tn` or
/// `reader_id,<group>,tp,fp,fn,tn`. When `group_column` is given the file
/// must carry a group column of that name.
StudyDataset parse_dataset(const std::string& path, const std::optional<std::string>& group_column = {});
StudyDataset parse_dataset_text(std::string_view text, std::string label,
                                const std::optional<std::string>& group_column = {});

/// Inverse of parse_dataset_text for integer-valued tables.
std::string serialize_dataset(const StudyDataset& dataset, const std::string& group_column = "group");

/// Applies `key=value` lines (SimConfig field names, `#` comments) to a
/// config. Keys listed in `locked` are left untouched.
SimConfig apply_sim_config(std::string_view text, SimConfig base, const std::vector<std::string>& locked = {});

int run(const CliConfig& config, std::ostream& out, std::ostream& err);

/// Parse argv and run. Returns the process exit code.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sroc::cli
