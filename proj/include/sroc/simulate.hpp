#pragma once

#include <cstdint>
#include <string>

#include "sroc/contingency.hpp"
#include "sroc/roc.hpp"

namespace sroc {

/// Synthetic multi-reader study drawn from the Lehmann model with lognormal
/// reader heterogeneity in theta and logit-normal spread in FPR.
struct SimConfig {
  int n_readers = 10;
  int n_diseased = 100;
  int n_healthy = 100;
  double theta_true = 0.25;
  double tau = 0.0;
  double fpr_logit_mean = -1.3862943611198906;  // logit(0.2)
  double fpr_logit_sd = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

StudyDataset generate(const SimConfig& config);

enum class Engine { Phm, Bivariate };

const char* to_string(Engine e);
Engine engine_from_string(const std::string& s);

/// Area under the population curve E[u^theta_i], i.e. E[1 / (1 + theta_i)]
/// with ln theta_i ~ N(ln theta, tau^2).
double population_auc(double theta, double tau);

struct CoverageOptions {
  Engine engine = Engine::Phm;
  EffectsMode effects = EffectsMode::Random;
  double level = kDefaultLevel;
  CorrectionMode correction = CorrectionMode::Affected;
  /// Bootstrap replicates per study (bivariate engine only).
  int bootstrap_b = 200;
  /// 0 = hardware concurrency.
  unsigned threads = 1;
};

struct CoverageReport {
  Engine engine = Engine::Phm;
  EffectsMode effects = EffectsMode::Random;
  double level = kDefaultLevel;
  /// theta_true for phm, the population AUC for bivariate.
  double target = 0.0;
  int n_sims = 0;
  int failures = 0;
  int covered = 0;
  /// covered / (n_sims - failures).
  double coverage = 0.0;
  /// Mean width of the interval used for coverage (theta for phm, AUC for bivariate).
  double mean_width = 0.0;
  double mean_auc_width = 0.0;
};

CoverageReport coverage_experiment(const SimConfig& config, int n_sims, const CoverageOptions& options = {});

}  // namespace sroc
