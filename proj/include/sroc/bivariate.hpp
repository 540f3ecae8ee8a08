#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sroc/contingency.hpp"
#include "sroc/nelder_mead.hpp"
#include "sroc/roc.hpp"

namespace sroc {

/// Bivariate normal model for per-reader (logit Se, logit FPR):
/// y_i ~ N(mu, sigma + C_i).
struct BivariateFit {
  EffectsMode effects_mode = EffectsMode::Random;
  Vec2 mu{};
  Sym2 sigma{};
  Sym2 cov_mu{};
  double loglik = 0.0;
  bool converged = false;
  int n_readers = 0;

  /// (expit mu_B, expit mu_A) as (fpr, se).
  RocPoint summary_point() const;
  double correlation() const;
};

struct BivariateOptions {
  int restarts = 5;
  SimplexOptions simplex{};
  /// Maximize the ordinary likelihood instead of the restricted one.
  bool use_ml = false;
};

/// Log-likelihood of sigma with mu profiled out by generalized least
/// squares. Writes the GLS mean and its covariance when requested.
double profile_loglik(std::span<const LogitPair> obs, const Sym2& sigma, bool restricted,
                      Vec2* mu_out = nullptr, Sym2* cov_mu_out = nullptr);

inline double restricted_loglik(std::span<const LogitPair> obs, const Sym2& sigma) {
  return profile_loglik(obs, sigma, true);
}

Sym2 sigma_from_sd(double sd_a, double sd_b, double rho);

BivariateFit fit_reml(std::span<const LogitPair> obs, EffectsMode mode, const BivariateOptions& options = {});

BivariateFit fit_reml(const StudyDataset& dataset, EffectsMode mode, CorrectionMode correction,
                      const BivariateOptions& options = {});

std::vector<LogitPair> logit_pairs(const StudyDataset& corrected);

/// Regression of logit Se on logit FPR through the summary point, sampled
/// on a grid uniform in logit FPR over [0.001, 0.999].
RocCurve sroc_from_bivariate(const BivariateFit& fit, int grid_size);

/// The curve used for AUC and plotting: the regression line when
/// sigma_BB > 0, otherwise the Lehmann curve through the summary point
/// (fixed-effects fits and degenerate random-effects fits).
RocCurve summary_curve(const BivariateFit& fit, int grid_size);

/// Confidence ellipse for the summary point, mapped into ROC space. The
/// polygon is closed (first vertex repeated at the end).
RocCurve confidence_region(const BivariateFit& fit, double level, int n_points);

/// Trapezoid area under a curve with strictly increasing fpr, extended
/// linearly to (0,0) and (1,1).
double auc_numeric(std::span<const RocPoint> curve);

inline constexpr int kAucGridSize = 2001;

struct BootstrapOptions {
  CorrectionMode correction = CorrectionMode::Affected;
  BivariateOptions fit{};
  /// 0 = hardware concurrency.
  unsigned threads = 1;
  int grid_size = kAucGridSize;
};

struct BootstrapResult {
  Interval ci;
  int replicates = 0;
  int dropped = 0;
  std::vector<std::string> warnings;
};

/// Percentile interval for the bivariate SROC AUC from a cluster bootstrap
/// over readers.
BootstrapResult auc_ci_bootstrap(const StudyDataset& dataset, EffectsMode mode, int replicates, double level,
                                 std::uint64_t seed, const BootstrapOptions& options = {});

}  // namespace sroc
