#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sroc/contingency.hpp"
#include "sroc/lehmann_phm.hpp"
#include "sroc/naive_pool.hpp"
#include "sroc/roc.hpp"
#include "sroc/simulate.hpp"

namespace sroc {

struct ReaderSummary {
  std::string reader_id;
  std::optional<std::string> group;
  double se = 0.0;
  double sp = 0.0;
  /// Computed from the table rather than as 1 - sp, so it survives rounding.
  double fpr = 0.0;
  double case_count = 0.0;

  RocPoint roc_point() const { return {fpr, se}; }
};

struct PhmSummary {
  double theta = 1.0;
  double ln_theta = 0.0;
  double se_ln_theta = 0.0;
  Interval theta_ci;
  double tau2 = 0.0;
  double q = 0.0;
  std::vector<ReaderTheta> per_reader;
};

struct BivariateSummary {
  Vec2 mu{};
  Sym2 sigma{};
  Sym2 cov_mu{};
  double loglik = 0.0;
  bool converged = false;
  RocPoint summary_point;
  int bootstrap_replicates = 0;
  int bootstrap_dropped = 0;
};

/// Engine-independent projection of a fit, as reported and plotted.
struct FitSummary {
  Engine engine = Engine::Phm;
  EffectsMode effects_mode = EffectsMode::Random;
  double level = kDefaultLevel;
  int n_readers = 0;
  double auc = 0.5;
  Interval auc_ci;
  int readers_below_curve = 0;
  RocCurve curve;
  std::optional<RocCurve> region;
  std::optional<PhmSummary> phm;
  std::optional<BivariateSummary> bivariate;
};

struct PooledSummary {
  PooledPoint point;
  /// Unweighted means in kAllScalarMetrics order; a metric undefined for
  /// some reader even after correction is omitted.
  std::vector<std::pair<ScalarMetric, double>> scalars;
  /// Readers below the Lehmann curve passing through the pooled point.
  int readers_below_pooled_curve = 0;
};

struct SubgroupResult {
  std::string group;
  int n_readers = 0;
  std::vector<FitSummary> fits;
  std::optional<PooledSummary> pooled;
};

struct AucEstimate {
  double auc = 0.5;
  std::optional<Interval> ci;
};

enum class AucRelation { HumanCiExcludesAiPoint, IntervalsOverlap, IntervalsDisjoint, NoCiAvailable };

struct ZTest {
  double z = 0.0;
  double p = 1.0;
};

struct AiComparison {
  double ai_auc = 0.5;
  std::optional<Interval> ai_auc_ci;
  std::string human_engine;
  double human_auc = 0.5;
  std::optional<Interval> human_auc_ci;
  double difference = 0.0;
  AucRelation relation = AucRelation::NoCiAvailable;
  /// Set when exactly one side has an interval: whether the other point
  /// falls inside it.
  std::optional<bool> point_inside_interval;
  std::optional<ZTest> z_test;
};

/// Descriptive comparison of two AUC estimates. When only one side has an
/// interval the relation is a point-versus-interval check; when both do,
/// the intervals are compared and an (independence-assuming) z-test is
/// attached.
AiComparison compare_auc(const AucEstimate& human, const AucEstimate& ai);

struct AnalysisReport {
  std::string dataset_label;
  std::vector<ReaderSummary> readers;
  std::vector<FitSummary> fits;
  std::vector<PooledSummary> pooled;
  std::vector<SubgroupResult> subgroups;
  std::optional<AiComparison> ai_comparison;
  std::vector<std::string> warnings;
};

/// Canonical JSON: fixed key order, reals printed with 6 significant
/// digits, integers verbatim, absent optionals omitted.
std::string to_json(const AnalysisReport& report);
AnalysisReport report_from_json(const std::string& text);

/// Round to the precision emitted by to_json.
double canonical_real(double v);

struct SvgOptions {
  int width_px = 640;
  int height_px = 640;
  bool show_pooled_cross = true;
  bool show_region = true;
  double marker_radius_px = 4.0;
  std::vector<std::string> subgroup_palette = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                               "#66a61e", "#e6ab02", "#a6761d", "#666666"};
};

struct SvgDocument {
  std::string text;
  std::vector<std::string> warnings;
};

SvgDocument to_svg(const AnalysisReport& report, const SvgOptions& options = {});

/// Plot-area transform used by to_svg, exposed for tests.
struct PlotFrame {
  double left = 0.0;
  double top = 0.0;
  double side = 0.0;

  double x(double fpr) const { return left + fpr * side; }
  double y(double se) const { return top + (1.0 - se) * side; }
};
PlotFrame plot_frame(const SvgOptions& options);

/// Marker radius for a reader: r0 * sqrt(case_count / median case_count).
double marker_radius(double case_count, double median_case_count, double r0);

const char* to_string(AucRelation r);

}  // namespace sroc

namespace sroc {

/// Coverage experiment result with the generating configuration, in the
/// same canonical JSON style as analysis reports.
std::string to_json(const CoverageReport& report, const SimConfig& config);

}  // namespace sroc
