#include "sroc/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sroc/error.hpp"

namespace sroc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UndefinedMetric: return "undefined-metric";
    case ErrorKind::InfiniteOdds: return "infinite-odds";
    case ErrorKind::InfiniteLogit: return "infinite-logit";
    case ErrorKind::Boundary: return "boundary";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::DegenerateVariance: return "degenerate-variance";
    case ErrorKind::SingularCovariance: return "singular-covariance";
    case ErrorKind::UnorderedInput: return "unordered-input";
    case ErrorKind::InvalidInterval: return "invalid-interval";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::EmptyReport: return "empty-report";
    case ErrorKind::AllReplicatesFailed: return "all-replicates-failed";
    case ErrorKind::Io: return "io";
    case ErrorKind::MalformedHeader: return "malformed-header";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::DuplicateReader: return "duplicate-reader";
  }
  return "unknown";
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Acklam's rational approximation followed by one Halley refinement step.
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "normal_quantile: probability must lie in (0,1)");
  }
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x = 0.0;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double z_for_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "confidence level must lie in (0,1)");
  }
  if (level == 0.95) return 1.959964;
  return normal_quantile(0.5 + 0.5 * level);
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::InsufficientData, "median of an empty set");
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double quantile_sorted(std::span<const double> sorted, double prob) {
  if (sorted.empty()) throw Error(ErrorKind::InsufficientData, "quantile of an empty set");
  const double h = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Sym2 Sym2::inverse() const {
  const double d = det();
  if (!(d > 0.0) && !(d < 0.0)) {
    throw Error(ErrorKind::SingularCovariance, "singular 2x2 matrix");
  }
  return {c / d, -b / d, a / d};
}

Chol2 cholesky(const Sym2& m) {
  if (!(m.a > 0.0)) throw Error(ErrorKind::SingularCovariance, "covariance is not positive definite");
  const double l11 = std::sqrt(m.a);
  const double l21 = m.b / l11;
  const double rem = m.c - l21 * l21;
  if (!(rem > 0.0)) throw Error(ErrorKind::SingularCovariance, "covariance is not positive definite");
  return {l11, l21, std::sqrt(rem)};
}

}  // namespace sroc
