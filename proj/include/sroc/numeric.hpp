#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace sroc {

/// Two-sided normal critical value for a confidence level. Level 0.95 maps
/// to the conventional 1.959964 exactly.
double z_for_level(double level);

/// Inverse of the standard normal CDF, accurate to well below 1e-8.
double normal_quantile(double p);

double normal_cdf(double x);

/// Quantile of the chi-square distribution with 2 degrees of freedom.
inline double chi2_2df_quantile(double level) { return -2.0 * std::log1p(-level); }

inline double logit(double p) { return std::log(p / (1.0 - p)); }

inline double expit(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double median(std::vector<double> values);

/// Linear-interpolated empirical quantile (type 7).
double quantile_sorted(std::span<const double> sorted, double prob);

using Vec2 = std::array<double, 2>;

/// Symmetric 2x2 matrix stored as (a, b; b, c).
struct Sym2 {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double det() const { return a * c - b * b; }
  Sym2 inverse() const;
  Sym2 operator+(const Sym2& o) const { return {a + o.a, b + o.b, c + o.c}; }
  Sym2& operator+=(const Sym2& o) {
    a += o.a;
    b += o.b;
    c += o.c;
    return *this;
  }
  Vec2 operator*(const Vec2& v) const { return {a * v[0] + b * v[1], b * v[0] + c * v[1]}; }
  double quad(const Vec2& v) const { return v[0] * (a * v[0] + b * v[1]) + v[1] * (b * v[0] + c * v[1]); }
};

/// Lower Cholesky factor (l11, 0; l21, l22). Throws SingularCovariance when
/// the matrix is not positive definite.
struct Chol2 {
  double l11 = 0.0;
  double l21 = 0.0;
  double l22 = 0.0;
};
Chol2 cholesky(const Sym2& m);

}  // namespace sroc
