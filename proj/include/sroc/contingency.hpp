#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sroc/numeric.hpp"

namespace sroc {

/// One reader's 2x2 table. Cells are real so that continuity-corrected tables
/// share the type; raw input tables are integer-valued.
struct ContingencyTable {
  double tp = 0.0;
  double fp = 0.0;
  double fn = 0.0;
  double tn = 0.0;

  double n_diseased() const { return tp + fn; }
  double n_healthy() const { return fp + tn; }
  double case_count() const { return n_diseased() + n_healthy(); }

  bool is_integral() const;
  bool has_zero_cell() const { return tp == 0.0 || fp == 0.0 || fn == 0.0 || tn == 0.0; }

  friend bool operator==(const ContingencyTable&, const ContingencyTable&) = default;
};

enum class CorrectionMode { None, Affected, All };

inline constexpr double kContinuityIncrement = 0.5;

double sensitivity(const ContingencyTable& t);
double specificity(const ContingencyTable& t);
/// 1 - specificity.
double false_positive_rate(const ContingencyTable& t);
double youden_j(const ContingencyTable& t);
double diagnostic_odds_ratio(const ContingencyTable& t);

ContingencyTable apply_continuity_correction(const ContingencyTable& t, CorrectionMode mode,
                                             double increment = kContinuityIncrement);

/// (logit Se, logit FPR) with the binomial delta-method variances of each
/// logit. The within-reader covariance is diagonal.
struct LogitPair {
  Vec2 y{};
  Vec2 var{};

  Sym2 covariance() const { return {var[0], 0.0, var[1]}; }
};

LogitPair logit_pair(const ContingencyTable& t);

struct ReaderRecord {
  std::string reader_id;
  std::optional<std::string> group;
  ContingencyTable table;
};

struct StudyDataset {
  std::string label;
  std::vector<ReaderRecord> records;

  std::size_t n_readers() const { return records.size(); }

  /// Throws Validation / DuplicateReader / InsufficientData if the dataset
  /// breaks its invariants.
  void validate() const;

  /// Distinct group labels in first-appearance order.
  std::vector<std::string> groups() const;

  StudyDataset subset_for_group(const std::string& group) const;
};

StudyDataset apply_continuity_correction(const StudyDataset& ds, CorrectionMode mode);

const char* to_string(CorrectionMode mode);
CorrectionMode correction_mode_from_string(const std::string& s);

}  // namespace sroc
