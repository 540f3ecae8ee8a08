#include "sroc/naive_pool.hpp"

#include <algorithm>
#include <vector>

#include "sroc/error.hpp"

namespace sroc {

PooledPoint pooled_point(std::span<const ReaderRecord> records, Weighting weighting) {
  if (records.empty()) throw Error(ErrorKind::InsufficientData, "pooled point needs at least 1 reader");
  double sum_se = 0.0, sum_sp = 0.0, sum_w = 0.0;
  for (const auto& r : records) {
    const double w = weighting == Weighting::CaseWeighted ? r.table.case_count() : 1.0;
    sum_se += w * sensitivity(r.table);
    sum_sp += w * specificity(r.table);
    sum_w += w;
  }
  return {sum_se / sum_w, sum_sp / sum_w, weighting, static_cast<int>(records.size())};
}

double scalar_metric(const ContingencyTable& t, ScalarMetric metric) {
  auto ratio = [](double num, double den, const char* name) {
    if (!(den > 0.0)) throw Error(ErrorKind::UndefinedMetric, std::string(name) + " undefined: zero denominator");
    return num / den;
  };
  switch (metric) {
    case ScalarMetric::Accuracy: return ratio(t.tp + t.tn, t.case_count(), "accuracy");
    case ScalarMetric::F1: return ratio(2.0 * t.tp, 2.0 * t.tp + t.fp + t.fn, "f1");
    case ScalarMetric::Youden: return youden_j(t);
    case ScalarMetric::Ppv: return ratio(t.tp, t.tp + t.fp, "ppv");
    case ScalarMetric::Npv: return ratio(t.tn, t.tn + t.fn, "npv");
  }
  return 0.0;
}

double pooled_scalar(std::span<const ReaderRecord> records, ScalarMetric metric) {
  if (records.empty()) throw Error(ErrorKind::InsufficientData, "pooled scalar needs at least 1 reader");
  double sum = 0.0;
  for (const auto& r : records) {
    try {
      sum += scalar_metric(r.table, metric);
    } catch (const Error& e) {
      throw Error(e.kind(), "reader '" + r.reader_id + "': " + e.what());
    }
  }
  return sum / static_cast<double>(records.size());
}

double interpolate_curve(std::span<const RocPoint> curve, double fpr) {
  RocPoint prev{0.0, 0.0};
  for (const auto& p : curve) {
    if (fpr <= p.fpr) {
      if (p.fpr == prev.fpr) return std::max(p.se, prev.se);
      return prev.se + (p.se - prev.se) * (fpr - prev.fpr) / (p.fpr - prev.fpr);
    }
    prev = p;
  }
  if (prev.fpr >= 1.0) return prev.se;
  return prev.se + (1.0 - prev.se) * (fpr - prev.fpr) / (1.0 - prev.fpr);
}

int beat_count(std::span<const RocPoint> points, std::span<const RocPoint> curve) {
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (!(curve[i].fpr > curve[i - 1].fpr)) {
      throw Error(ErrorKind::UnorderedInput, "beat_count: curve fpr must be strictly increasing");
    }
  }
  return static_cast<int>(std::count_if(points.begin(), points.end(), [&](const RocPoint& p) {
    return p.se < interpolate_curve(curve, p.fpr);
  }));
}

int beat_count(std::span<const ReaderRecord> records, std::span<const RocPoint> curve) {
  std::vector<RocPoint> pts;
  pts.reserve(records.size());
  for (const auto& r : records) pts.push_back({false_positive_rate(r.table), sensitivity(r.table)});
  return beat_count(pts, curve);
}

const char* to_string(Weighting w) { return w == Weighting::CaseWeighted ? "case_weighted" : "unweighted"; }

const char* to_string(ScalarMetric m) {
  switch (m) {
    case ScalarMetric::Accuracy: return "accuracy";
    case ScalarMetric::F1: return "f1";
    case ScalarMetric::Youden: return "youden";
    case ScalarMetric::Ppv: return "ppv";
    case ScalarMetric::Npv: return "npv";
  }
  return "accuracy";
}

ScalarMetric scalar_metric_from_string(const std::string& s) {
  for (auto m : kAllScalarMetrics) {
    if (s == to_string(m)) return m;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown metric '" + s + "'");
}

}  // namespace sroc
