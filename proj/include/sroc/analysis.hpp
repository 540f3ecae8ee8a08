#pragma once

#include <cstdint>
#include <optional>

#include "sroc/contingency.hpp"
#include "sroc/naive_pool.hpp"
#include "sroc/report.hpp"

namespace sroc {

struct AnalysisOptions {
  bool run_phm = true;
  bool run_bivariate = true;
  EffectsMode effects = EffectsMode::Random;
  CorrectionMode correction = CorrectionMode::Affected;
  /// Fit each reader group separately as well.
  bool by_group = false;
  Weighting weighting = Weighting::Unweighted;
  std::optional<AucEstimate> ai;
  int bootstrap_b = 2000;
  double level = kDefaultLevel;
  std::uint64_t seed = 0;
  /// 0 = hardware concurrency. Never changes the output.
  unsigned threads = 1;
  int curve_points = 101;
  int region_points = 64;
};

/// Full pipeline: correct, fit the requested engines, pool the naive
/// comparator, fit subgroups, compare against an AI model.
AnalysisReport analyze(const StudyDataset& dataset, const AnalysisOptions& options);

}  // namespace sroc
