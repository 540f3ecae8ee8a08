#pragma once

#include <string>
#include <vector>

namespace sroc {

enum class EffectsMode { Fixed, Random };

const char* to_string(EffectsMode mode);
EffectsMode effects_mode_from_string(const std::string& s);

/// A point in ROC space: x is the false positive rate, y the sensitivity.
struct RocPoint {
  double fpr = 0.0;
  double se = 0.0;

  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

using RocCurve = std::vector<RocPoint>;

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  double width() const { return upper - lower; }
  bool contains(double v) const { return lower <= v && v <= upper; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

inline constexpr double kDefaultLevel = 0.95;

}  // namespace sroc
