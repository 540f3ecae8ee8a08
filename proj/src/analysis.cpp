#include "sroc/analysis.hpp"

#include <cmath>
#include <cstdio>

#include "sroc/bivariate.hpp"
#include "sroc/error.hpp"
#include "sroc/lehmann_phm.hpp"
#include "sroc/random.hpp"

namespace sroc {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

FitSummary phm_summary(const StudyDataset& ds, const StudyDataset& corrected, const AnalysisOptions& o,
                       std::vector<std::string>& warnings, const std::string& scope) {
  const auto readers = reader_thetas(corrected);
  const PhmFit fit = fit_phm(readers, o.effects, o.level);
  for (const auto& r : readers) {
    if (r.below_diagonal()) {
      warnings.push_back(scope + "reader '" + r.reader_id + "' lies below the chance diagonal (theta = " +
                         fmt(r.theta) + "); kept in pooling");
    }
  }
  FitSummary s;
  s.engine = Engine::Phm;
  s.effects_mode = fit.effects_mode;
  s.level = fit.level;
  s.n_readers = static_cast<int>(readers.size());
  s.auc = fit.auc;
  s.auc_ci = fit.auc_ci;
  s.curve = sroc_curve(fit.theta_pooled, o.curve_points);
  s.readers_below_curve = beat_count(std::span<const ReaderRecord>(ds.records), s.curve);
  s.phm = PhmSummary{fit.theta_pooled, fit.ln_theta, fit.se_ln_theta, fit.theta_ci, fit.tau2, fit.q, fit.per_reader};
  return s;
}

FitSummary bivariate_summary(const StudyDataset& ds, const AnalysisOptions& o, std::uint64_t seed,
                             std::vector<std::string>& warnings, const std::string& scope) {
  const BivariateFit fit = fit_reml(ds, o.effects, o.correction);
  FitSummary s;
  s.engine = Engine::Bivariate;
  s.effects_mode = fit.effects_mode;
  s.level = o.level;
  s.n_readers = fit.n_readers;
  s.auc = auc_numeric(summary_curve(fit, kAucGridSize));
  s.curve = summary_curve(fit, o.curve_points);
  s.readers_below_curve = beat_count(std::span<const ReaderRecord>(ds.records), s.curve);
  if (o.effects == EffectsMode::Fixed || !(fit.sigma.c > 1e-12)) {
    warnings.push_back(scope + "bivariate fit has no between-reader FPR variance; SROC drawn as the Lehmann curve "
                               "through the summary point");
  }
  try {
    s.region = confidence_region(fit, o.level, o.region_points);
  } catch (const Error& e) {
    warnings.push_back(scope + "confidence region unavailable: " + e.what());
  }

  BootstrapOptions bo;
  bo.correction = o.correction;
  bo.threads = o.threads;
  const BootstrapResult boot = auc_ci_bootstrap(ds, o.effects, o.bootstrap_b, o.level, seed, bo);
  for (const auto& w : boot.warnings) warnings.push_back(scope + w);
  s.auc_ci = boot.ci;
  if (!s.auc_ci.contains(s.auc)) {
    warnings.push_back(scope + "bootstrap percentile interval excluded the point AUC " + fmt(s.auc) +
                       "; interval extended to include it");
    s.auc_ci.lower = std::min(s.auc_ci.lower, s.auc);
    s.auc_ci.upper = std::max(s.auc_ci.upper, s.auc);
  }
  s.bivariate = BivariateSummary{fit.mu, fit.sigma, fit.cov_mu, fit.loglik, fit.converged, fit.summary_point(),
                                 boot.replicates, boot.dropped};
  return s;
}

PooledSummary pooled_summary(const StudyDataset& ds, const AnalysisOptions& o, std::vector<std::string>& warnings,
                             const std::string& scope) {
  PooledSummary p;
  p.point = pooled_point(ds.records, o.weighting);
  for (auto m : kAllScalarMetrics) {
    try {
      p.scalars.emplace_back(m, pooled_scalar(ds.records, m));
    } catch (const Error&) {
      const auto corrected = apply_continuity_correction(ds, CorrectionMode::Affected);
      try {
        p.scalars.emplace_back(m, pooled_scalar(corrected.records, m));
        warnings.push_back(scope + "pooled " + to_string(m) + " computed on continuity-corrected tables");
      } catch (const Error& e) {
        warnings.push_back(scope + "pooled " + to_string(m) + " omitted: " + e.what());
      }
    }
  }
  const RocPoint pt = p.point.roc_point();
  if (pt.fpr > 0.0 && pt.fpr < 1.0 && pt.se > 0.0 && pt.se < 1.0) {
    const auto curve = sroc_curve(std::log(pt.se) / std::log(pt.fpr), kAucGridSize);
    p.readers_below_pooled_curve = beat_count(std::span<const ReaderRecord>(ds.records), curve);
  }
  return p;
}

std::size_t min_readers(Engine e, EffectsMode m) {
  if (e == Engine::Phm) return m == EffectsMode::Fixed ? 1 : 2;
  return m == EffectsMode::Fixed ? 2 : 3;
}

std::vector<FitSummary> fit_all(const StudyDataset& ds, const AnalysisOptions& o, std::uint64_t seed,
                                std::vector<std::string>& warnings, const std::string& scope, bool skip_small) {
  std::vector<FitSummary> fits;
  const StudyDataset corrected = apply_continuity_correction(ds, o.correction);
  auto allowed = [&](Engine e) {
    if (ds.n_readers() >= min_readers(e, o.effects)) return true;
    if (!skip_small) {
      throw Error(ErrorKind::InsufficientData, std::string(to_string(e)) + " " + to_string(o.effects) +
                                                   "-effects fit needs at least " +
                                                   std::to_string(min_readers(e, o.effects)) + " readers");
    }
    warnings.push_back(scope + to_string(e) + " fit skipped: " + std::to_string(ds.n_readers()) +
                       " readers, need at least " + std::to_string(min_readers(e, o.effects)));
    return false;
  };
  if (o.run_phm && allowed(Engine::Phm)) fits.push_back(phm_summary(ds, corrected, o, warnings, scope));
  if (o.run_bivariate && allowed(Engine::Bivariate)) fits.push_back(bivariate_summary(ds, o, seed, warnings, scope));
  return fits;
}

}  // namespace

AnalysisReport analyze(const StudyDataset& dataset, const AnalysisOptions& o) {
  dataset.validate();
  if (!o.run_phm && !o.run_bivariate) throw Error(ErrorKind::InvalidArgument, "no engine requested");

  AnalysisReport report;
  report.dataset_label = dataset.label;
  for (const auto& r : dataset.records) {
    report.readers.push_back({r.reader_id, r.group, sensitivity(r.table), specificity(r.table),
                              false_positive_rate(r.table), r.table.case_count()});
  }
  std::size_t corrected_count = 0;
  for (const auto& r : dataset.records) {
    if (apply_continuity_correction(r.table, o.correction) != r.table) ++corrected_count;
  }
  if (corrected_count > 0) {
    report.warnings.push_back("continuity correction (" + std::string(to_string(o.correction)) + ") changed " +
                              std::to_string(corrected_count) + " reader table(s)");
  }

  report.fits = fit_all(dataset, o, derive_seed(o.seed, 0), report.warnings, "", false);
  report.pooled.push_back(pooled_summary(dataset, o, report.warnings, ""));

  if (o.by_group) {
    const auto groups = dataset.groups();
    if (groups.empty()) report.warnings.push_back("subgroup analysis requested but no reader has a group label");
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const StudyDataset sub = dataset.subset_for_group(groups[g]);
      const std::string scope = "group '" + groups[g] + "': ";
      SubgroupResult sr;
      sr.group = groups[g];
      sr.n_readers = static_cast<int>(sub.n_readers());
      sr.fits = fit_all(sub, o, derive_seed(o.seed, g + 1), report.warnings, scope, true);
      sr.pooled = pooled_summary(sub, o, report.warnings, scope);
      report.subgroups.push_back(std::move(sr));
    }
  }

  if (o.ai) {
    // The proportional-hazards fit is the reference when both engines ran.
    const FitSummary& human = report.fits.front();
    AiComparison cmp = compare_auc({human.auc, human.auc_ci}, *o.ai);
    cmp.human_engine = to_string(human.engine);
    report.ai_comparison = cmp;
  }
  return report;
}

}  // namespace sroc
