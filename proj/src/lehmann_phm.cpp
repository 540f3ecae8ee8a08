#include "sroc/lehmann_phm.hpp"

#include <cmath>

#include "sroc/error.hpp"
#include "sroc/numeric.hpp"

namespace sroc {

const char* to_string(EffectsMode mode) { return mode == EffectsMode::Fixed ? "fixed" : "random"; }

EffectsMode effects_mode_from_string(const std::string& s) {
  if (s == "fixed") return EffectsMode::Fixed;
  if (s == "random") return EffectsMode::Random;
  throw Error(ErrorKind::InvalidArgument, "unknown effects mode '" + s + "'");
}

double ReaderTheta::ln_theta() const { return std::log(theta); }

ReaderTheta reader_theta(const ContingencyTable& corrected, std::string reader_id) {
  const double se = sensitivity(corrected);
  const double fpr = false_positive_rate(corrected);
  if (!(se > 0.0 && se < 1.0 && fpr > 0.0 && fpr < 1.0)) {
    throw Error(ErrorKind::Boundary, "reader '" + reader_id +
                                         "': sensitivity and false positive rate must lie strictly "
                                         "inside (0,1); apply a continuity correction");
  }
  const double ln_se = std::log(se);
  const double ln_fpr = std::log(fpr);
  const double var_ln_se = (1.0 - se) / (corrected.n_diseased() * se);
  const double var_ln_fpr = (1.0 - fpr) / (corrected.n_healthy() * fpr);

  ReaderTheta out;
  out.reader_id = std::move(reader_id);
  out.theta = ln_se / ln_fpr;
  out.var_ln_theta = var_ln_se / (ln_se * ln_se) + var_ln_fpr / (ln_fpr * ln_fpr);
  return out;
}

std::vector<ReaderTheta> reader_thetas(const StudyDataset& corrected) {
  std::vector<ReaderTheta> out;
  out.reserve(corrected.records.size());
  for (const auto& r : corrected.records) out.push_back(reader_theta(r.table, r.reader_id));
  return out;
}

namespace {

struct Pooled {
  double mean = 0.0;
  double sum_w = 0.0;
};

Pooled pool(std::span<const ReaderTheta> readers, double tau2) {
  Pooled p;
  double num = 0.0;
  for (const auto& r : readers) {
    const double w = 1.0 / (r.var_ln_theta + tau2);
    num += w * r.ln_theta();
    p.sum_w += w;
  }
  p.mean = num / p.sum_w;
  return p;
}

void finish(PhmFit& fit, std::span<const ReaderTheta> readers, double level) {
  fit.level = level;
  fit.theta_pooled = std::exp(fit.ln_theta);
  fit.auc = auc_from_theta(fit.theta_pooled);
  fit.theta_ci = theta_ci(fit);
  fit.auc_ci = auc_ci(fit);
  fit.per_reader.assign(readers.begin(), readers.end());
}

void check_readers(std::span<const ReaderTheta> readers) {
  for (const auto& r : readers) {
    if (!(r.theta > 0.0) || !(r.var_ln_theta > 0.0) || !std::isfinite(r.theta)) {
      throw Error(ErrorKind::InvalidArgument,
                  "reader '" + r.reader_id + "' needs a positive theta and variance");
    }
  }
}

}  // namespace

PhmFit fit_fixed(std::span<const ReaderTheta> readers, double level) {
  if (readers.empty()) throw Error(ErrorKind::InsufficientData, "fixed-effects pooling needs at least 1 reader");
  check_readers(readers);
  const Pooled p = pool(readers, 0.0);
  PhmFit fit;
  fit.effects_mode = EffectsMode::Fixed;
  fit.ln_theta = p.mean;
  fit.se_ln_theta = 1.0 / std::sqrt(p.sum_w);
  for (const auto& r : readers) {
    const double d = r.ln_theta() - p.mean;
    fit.q += d * d / r.var_ln_theta;
  }
  finish(fit, readers, level);
  return fit;
}

PhmFit fit_random(std::span<const ReaderTheta> readers, double level) {
  if (readers.size() < 2) {
    throw Error(ErrorKind::InsufficientData, "random-effects pooling needs at least 2 readers");
  }
  check_readers(readers);
  const Pooled fixed = pool(readers, 0.0);
  double q = 0.0;
  double sum_w2 = 0.0;
  for (const auto& r : readers) {
    const double w = 1.0 / r.var_ln_theta;
    const double d = r.ln_theta() - fixed.mean;
    q += w * d * d;
    sum_w2 += w * w;
  }
  const double k = static_cast<double>(readers.size());
  const double denom = fixed.sum_w - sum_w2 / fixed.sum_w;
  const double tau2 = denom > 0.0 ? std::max(0.0, (q - (k - 1.0)) / denom) : 0.0;

  const Pooled random = pool(readers, tau2);
  PhmFit fit;
  fit.effects_mode = EffectsMode::Random;
  fit.ln_theta = random.mean;
  fit.se_ln_theta = 1.0 / std::sqrt(random.sum_w);
  fit.tau2 = tau2;
  fit.q = q;
  finish(fit, readers, level);
  return fit;
}

PhmFit fit_phm(std::span<const ReaderTheta> readers, EffectsMode mode, double level) {
  return mode == EffectsMode::Fixed ? fit_fixed(readers, level) : fit_random(readers, level);
}

RocCurve sroc_curve(double theta, int grid_size) {
  if (!(theta > 0.0)) throw Error(ErrorKind::InvalidArgument, "theta must be positive");
  if (grid_size < 2) throw Error(ErrorKind::InvalidArgument, "grid_size must be at least 2");
  RocCurve curve(static_cast<std::size_t>(grid_size));
  // Nodes are graded as s^2 over a uniform s so the steep start of u^theta
  // (unbounded slope at 0 for theta < 1) is resolved.
  for (int j = 0; j < grid_size; ++j) {
    const double s = static_cast<double>(j) / (grid_size - 1);
    const double u = j == grid_size - 1 ? 1.0 : s * s;
    curve[static_cast<std::size_t>(j)] = {u, std::pow(u, theta)};
  }
  return curve;
}

Interval theta_ci(const PhmFit& fit) {
  const double half = z_for_level(fit.level) * fit.se_ln_theta;
  return {std::exp(fit.ln_theta - half), std::exp(fit.ln_theta + half)};
}

Interval auc_ci(const PhmFit& fit) {
  const Interval t = theta_ci(fit);
  return {auc_from_theta(t.upper), auc_from_theta(t.lower)};
}

}  // namespace sroc
