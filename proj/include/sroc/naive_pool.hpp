#pragma once

#include <span>
#include <string>

#include "sroc/contingency.hpp"
#include "sroc/roc.hpp"

namespace sroc {

enum class Weighting { Unweighted, CaseWeighted };

/// Independently averaged sensitivity and specificity across readers.
struct PooledPoint {
  double mean_se = 0.0;
  double mean_sp = 0.0;
  Weighting weighting = Weighting::Unweighted;
  int n_readers = 0;

  double mean_fpr() const { return 1.0 - mean_sp; }
  RocPoint roc_point() const { return {mean_fpr(), mean_se}; }
};

PooledPoint pooled_point(std::span<const ReaderRecord> records, Weighting weighting);

enum class ScalarMetric { Accuracy, F1, Youden, Ppv, Npv };

inline constexpr ScalarMetric kAllScalarMetrics[] = {ScalarMetric::Accuracy, ScalarMetric::F1, ScalarMetric::Youden,
                                                      ScalarMetric::Ppv, ScalarMetric::Npv};

double scalar_metric(const ContingencyTable& t, ScalarMetric metric);

/// Unweighted mean of a per-reader metric.
double pooled_scalar(std::span<const ReaderRecord> records, ScalarMetric metric);

/// Linear interpolation of a curve at fpr, continued to (0,0) and (1,1).
double interpolate_curve(std::span<const RocPoint> curve, double fpr);

/// Number of readers whose operating point lies strictly below the curve.
int beat_count(std::span<const ReaderRecord> records, std::span<const RocPoint> curve);
int beat_count(std::span<const RocPoint> points, std::span<const RocPoint> curve);

const char* to_string(Weighting w);
const char* to_string(ScalarMetric m);
ScalarMetric scalar_metric_from_string(const std::string& s);

}  // namespace sroc
