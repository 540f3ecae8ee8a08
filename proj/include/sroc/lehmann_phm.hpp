#pragma once

#include <span>
#include <string>
#include <vector>

#include "sroc/contingency.hpp"
#include "sroc/roc.hpp"

namespace sroc {

/// Per-reader estimate of the Lehmann accuracy parameter, Se = FPR^theta.
struct ReaderTheta {
  std::string reader_id;
  double theta = 1.0;
  double var_ln_theta = 0.0;

  double ln_theta() const;
  /// theta > 1: the reader sits below the chance diagonal.
  bool below_diagonal() const { return theta > 1.0; }
};

/// Pooled proportional-hazards SROC fit.
struct PhmFit {
  EffectsMode effects_mode = EffectsMode::Random;
  double ln_theta = 0.0;
  double theta_pooled = 1.0;
  double se_ln_theta = 0.0;
  double tau2 = 0.0;
  /// Cochran's Q about the fixed-effect mean.
  double q = 0.0;
  double auc = 0.5;
  Interval auc_ci;
  Interval theta_ci;
  double level = kDefaultLevel;
  std::vector<ReaderTheta> per_reader;
};

/// Point estimate ln(Se)/ln(FPR) with delta-method variance of ln theta.
/// The table must already be continuity corrected; Se and FPR must lie
/// strictly inside (0,1).
ReaderTheta reader_theta(const ContingencyTable& corrected, std::string reader_id = {});

std::vector<ReaderTheta> reader_thetas(const StudyDataset& corrected);

PhmFit fit_fixed(std::span<const ReaderTheta> readers, double level = kDefaultLevel);

/// DerSimonian-Laird random-effects pooling on the ln theta scale.
PhmFit fit_random(std::span<const ReaderTheta> readers, double level = kDefaultLevel);

PhmFit fit_phm(std::span<const ReaderTheta> readers, EffectsMode mode, double level = kDefaultLevel);

/// Points (u, u^theta) from (0,0) to (1,1), with nodes u = s^2 for s evenly
/// spaced on [0,1].
RocCurve sroc_curve(double theta, int grid_size);

inline double auc_from_theta(double theta) { return 1.0 / (1.0 + theta); }

/// Wald interval on ln theta, mapped monotonically into AUC.
Interval auc_ci(const PhmFit& fit);
Interval theta_ci(const PhmFit& fit);

}  // namespace sroc
