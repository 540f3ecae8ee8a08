#include "sroc/contingency.hpp"

#include <cmath>
#include <unordered_set>

#include "sroc/error.hpp"

namespace sroc {

namespace {

bool integral(double v) { return std::isfinite(v) && v == std::floor(v); }

}  // namespace

bool ContingencyTable::is_integral() const {
  return integral(tp) && integral(fp) && integral(fn) && integral(tn);
}

double sensitivity(const ContingencyTable& t) {
  if (!(t.n_diseased() > 0.0)) {
    throw Error(ErrorKind::UndefinedMetric, "sensitivity undefined: no diseased cases (tp + fn = 0)");
  }
  return t.tp / t.n_diseased();
}

double specificity(const ContingencyTable& t) {
  if (!(t.n_healthy() > 0.0)) {
    throw Error(ErrorKind::UndefinedMetric, "specificity undefined: no healthy cases (fp + tn = 0)");
  }
  return t.tn / t.n_healthy();
}

double false_positive_rate(const ContingencyTable& t) {
  if (!(t.n_healthy() > 0.0)) {
    throw Error(ErrorKind::UndefinedMetric, "false positive rate undefined: no healthy cases (fp + tn = 0)");
  }
  return t.fp / t.n_healthy();
}

double youden_j(const ContingencyTable& t) { return sensitivity(t) + specificity(t) - 1.0; }

double diagnostic_odds_ratio(const ContingencyTable& t) {
  if (t.fp == 0.0 || t.fn == 0.0) {
    throw Error(ErrorKind::InfiniteOdds, "diagnostic odds ratio is infinite: fp or fn is zero");
  }
  return (t.tp * t.tn) / (t.fp * t.fn);
}

ContingencyTable apply_continuity_correction(const ContingencyTable& t, CorrectionMode mode,
                                             double increment) {
  switch (mode) {
    case CorrectionMode::None:
      return t;
    case CorrectionMode::Affected:
      if (!t.has_zero_cell()) return t;
      [[fallthrough]];
    case CorrectionMode::All:
      return {t.tp + increment, t.fp + increment, t.fn + increment, t.tn + increment};
  }
  return t;
}

LogitPair logit_pair(const ContingencyTable& t) {
  if (!(t.tp > 0.0 && t.fp > 0.0 && t.fn > 0.0 && t.tn > 0.0)) {
    throw Error(ErrorKind::InfiniteLogit, "logit undefined: table has a zero cell (apply a continuity correction)");
  }
  LogitPair out;
  out.y = {std::log(t.tp / t.fn), std::log(t.fp / t.tn)};
  out.var = {1.0 / t.tp + 1.0 / t.fn, 1.0 / t.fp + 1.0 / t.tn};
  return out;
}

void StudyDataset::validate() const {
  if (records.empty()) throw Error(ErrorKind::InsufficientData, "dataset has no readers");
  std::unordered_set<std::string> seen;
  for (const auto& r : records) {
    if (!seen.insert(r.reader_id).second) {
      throw Error(ErrorKind::DuplicateReader, "duplicate reader_id '" + r.reader_id + "'");
    }
    const auto& t = r.table;
    if (t.tp < 0 || t.fp < 0 || t.fn < 0 || t.tn < 0) {
      throw Error(ErrorKind::Validation, "reader '" + r.reader_id + "' has a negative cell");
    }
    if (t.n_diseased() < 1.0 || t.n_healthy() < 1.0) {
      throw Error(ErrorKind::Validation,
                  "reader '" + r.reader_id + "' must have at least one diseased and one healthy case");
    }
  }
}

std::vector<std::string> StudyDataset::groups() const {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& r : records) {
    if (r.group && seen.insert(*r.group).second) out.push_back(*r.group);
  }
  return out;
}

StudyDataset StudyDataset::subset_for_group(const std::string& group) const {
  StudyDataset out{label + "/" + group, {}};
  for (const auto& r : records) {
    if (r.group && *r.group == group) out.records.push_back(r);
  }
  return out;
}

StudyDataset apply_continuity_correction(const StudyDataset& ds, CorrectionMode mode) {
  StudyDataset out = ds;
  for (auto& r : out.records) r.table = apply_continuity_correction(r.table, mode);
  return out;
}

const char* to_string(CorrectionMode mode) {
  switch (mode) {
    case CorrectionMode::None: return "none";
    case CorrectionMode::Affected: return "affected";
    case CorrectionMode::All: return "all";
  }
  return "affected";
}

CorrectionMode correction_mode_from_string(const std::string& s) {
  if (s == "none") return CorrectionMode::None;
  if (s == "affected") return CorrectionMode::Affected;
  if (s == "all") return CorrectionMode::All;
  throw Error(ErrorKind::InvalidArgument, "unknown correction mode '" + s + "'");
}

}  // namespace sroc
