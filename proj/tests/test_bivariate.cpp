#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fixtures.hpp"
#include "sroc/bivariate.hpp"
#include "sroc/error.hpp"
#include "sroc/lehmann_phm.hpp"
#include "sroc/naive_pool.hpp"
#include "sroc/simulate.hpp"

using namespace sroc;
using namespace sroc::testing;

namespace {

// log of the integral over mu of the full likelihood with a flat prior; equal
// to the restricted log-likelihood. Evaluated by a 2-D trapezoid rule.
double restricted_by_quadrature(std::span<const LogitPair> obs, const Sym2& sigma) {
  auto full = [&](double ma, double mb) {
    double ll = 0.0;
    for (const auto& o : obs) {
      const Sym2 v = sigma + o.covariance();
      const double ra = o.y[0] - ma, rb = o.y[1] - mb;
      const double det = v.a * v.c - v.b * v.b;
      const double q = (v.c * ra * ra - 2 * v.b * ra * rb + v.a * rb * rb) / det;
      ll += -std::log(2 * std::numbers::pi) - 0.5 * std::log(det) - 0.5 * q;
    }
    return ll;
  };
  double peak = -HUGE_VAL;
  const int n = 801;
  const double lo = -8.0, hi = 8.0, h = (hi - lo) / (n - 1);
  std::vector<double> vals(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) peak = std::max(peak, vals[static_cast<std::size_t>(i) * n + j] = full(lo + i * h, lo + j * h));
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double w = ((i == 0 || i == n - 1) ? 0.5 : 1.0) * ((j == 0 || j == n - 1) ? 0.5 : 1.0);
      sum += w * std::exp(vals[static_cast<std::size_t>(i) * n + j] - peak);
    }
  return peak + std::log(sum * h * h);
}

double polygon_area(const std::vector<Vec2>& pts) {
  double a = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) a += pts[i][0] * pts[i + 1][1] - pts[i + 1][0] * pts[i][1];
  return 0.5 * std::fabs(a);
}

bool inside(const RocCurve& poly, RocPoint p) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 2; i + 1 < poly.size(); j = i++) {
    if ((poly[i].se > p.se) != (poly[j].se > p.se) &&
        p.fpr < (poly[j].fpr - poly[i].fpr) * (p.se - poly[i].se) / (poly[j].se - poly[i].se) + poly[i].fpr)
      in = !in;
  }
  return in;
}

}  // namespace

TEST_CASE("restricted likelihood matches flat-prior integration over the mean") {
  const auto obs = to_logits(kInteriorFixtures[0]);
  for (const Sym2& s : {Sym2{}, sigma_from_sd(0.5, 0.7, 0.3), sigma_from_sd(1.2, 0.4, -0.6)}) {
    CHECK(restricted_loglik(obs, s) == doctest::Approx(restricted_by_quadrature(obs, s)).epsilon(1e-6));
  }
}

TEST_CASE("degenerate readers give zero between-reader covariance") {
  std::vector<LogitPair> same(5, LogitPair{{1.5, -1.0}, {0.1, 0.2}});
  const auto fit = fit_reml(same, EffectsMode::Random);
  CHECK(fit.mu[0] == doctest::Approx(1.5));
  CHECK(fit.mu[1] == doctest::Approx(-1.0));
  CHECK(std::fabs(fit.sigma.a) < 1e-6);
  CHECK(std::fabs(fit.sigma.b) < 1e-6);
  CHECK(std::fabs(fit.sigma.c) < 1e-6);
  CHECK(fit.converged);
}

TEST_CASE("optimizer reaches the brute-force maximum") {
  const auto obs = to_logits(kInteriorFixtures[1]);
  const auto fit = fit_reml(obs, EffectsMode::Random);
  const auto grid = brute_force_reml(obs);
  CHECK(std::fabs(fit.loglik - grid.loglik) < 1e-3);
  CHECK(std::sqrt(fit.sigma.a) == doctest::Approx(grid.sd_a).epsilon(0.02));
  CHECK(std::sqrt(fit.sigma.c) == doctest::Approx(grid.sd_b).epsilon(0.02));
}

TEST_CASE("optimum never worse than the zero-covariance boundary") {
  for (const auto& set : {kInteriorFixtures, kBoundaryFixtures}) {
    for (const auto& tables : set) {
      const auto obs = to_logits(tables);
      const auto fit = fit_reml(obs, EffectsMode::Random);
      CHECK(fit.loglik >= restricted_loglik(obs, Sym2{}) - 1e-9);
      CHECK(fit.sigma.a >= 0.0);
      CHECK(fit.sigma.c >= 0.0);
      CHECK(std::fabs(fit.correlation()) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("reader order does not change the fit") {
  auto obs = to_logits(kBoundaryFixtures[0]);
  const auto a = fit_reml(obs, EffectsMode::Random);
  std::reverse(obs.begin(), obs.end());
  std::swap(obs[0], obs[2]);
  const auto b = fit_reml(obs, EffectsMode::Random);
  CHECK(a.mu == b.mu);
  CHECK(a.sigma.a == b.sigma.a);
  CHECK(a.sigma.b == b.sigma.b);
  CHECK(a.sigma.c == b.sigma.c);
  CHECK(a.loglik == b.loglik);
}

TEST_CASE("fixed effects with equal within-reader covariance is the arithmetic mean") {
  std::vector<LogitPair> obs{{{1.0, -2.0}, {0.1, 0.3}}, {{2.0, -1.0}, {0.1, 0.3}}, {{0.6, -1.5}, {0.1, 0.3}}};
  const auto fit = fit_reml(obs, EffectsMode::Fixed);
  CHECK(fit.mu[0] == doctest::Approx(3.6 / 3));
  CHECK(fit.mu[1] == doctest::Approx(-1.5));
  CHECK(fit.sigma.a == 0.0);
  CHECK(fit.cov_mu.a == doctest::Approx(0.1 / 3));
  CHECK(fit.cov_mu.c == doctest::Approx(0.3 / 3));
}

TEST_CASE("minimum reader counts") {
  std::vector<LogitPair> two{{{1.0, -2.0}, {0.1, 0.3}}, {{2.0, -1.0}, {0.1, 0.3}}};
  CHECK_THROWS_AS(fit_reml(two, EffectsMode::Random), Error);
  CHECK_NOTHROW(fit_reml(two, EffectsMode::Fixed));
  CHECK_THROWS_AS(fit_reml(std::span(two).first(1), EffectsMode::Fixed), Error);
}

TEST_CASE("large simulated study recovers the mean") {
  const auto ds = simulate_bivariate(200, 400, 400, {1.0, -1.5}, {0.3, 0.0, 0.3}, 2024);
  const auto fit = fit_reml(ds, EffectsMode::Random, CorrectionMode::Affected);
  CHECK(std::fabs(fit.mu[0] - 1.0) < 0.1);
  CHECK(std::fabs(fit.mu[1] + 1.5) < 0.1);
  CHECK(fit.sigma.a == doctest::Approx(0.3).epsilon(0.35));
  CHECK(fit.sigma.c == doctest::Approx(0.3).epsilon(0.35));
}

TEST_CASE("regression SROC line") {
  BivariateFit fit;
  fit.mu = {1.2, 0.0};
  fit.sigma = {0.5, 0.0, 0.4};
  const auto flat = sroc_from_bivariate(fit, 51);
  for (const auto& p : flat) CHECK(p.se == doctest::Approx(expit(1.2)));

  fit.sigma = {0.5, 0.3, 0.4};
  const auto line = sroc_from_bivariate(fit, 101);
  CHECK(line[50].fpr == doctest::Approx(0.5));
  CHECK(line[50].se == doctest::Approx(expit(1.2)));
  CHECK(line.front().fpr == doctest::Approx(0.001));
  CHECK(line.back().fpr == doctest::Approx(0.999));
  for (std::size_t i = 1; i < line.size(); ++i) CHECK(line[i].fpr > line[i - 1].fpr);

  fit.sigma = {0.5, 0.0, 0.0};
  CHECK_THROWS_AS(sroc_from_bivariate(fit, 11), Error);
  fit.effects_mode = EffectsMode::Fixed;
  fit.sigma = {};
  CHECK_THROWS_AS(sroc_from_bivariate(fit, 11), Error);
  // Fallback curve passes through the summary point.
  const auto lehmann = summary_curve(fit, 2001);
  const RocPoint sp = fit.summary_point();
  CHECK(interpolate_curve(lehmann, sp.fpr) == doctest::Approx(sp.se).epsilon(1e-4));
}

TEST_CASE("bivariate SROC tracks a Lehmann population") {
  SimConfig c;
  c.n_readers = 60;
  c.n_diseased = 400;
  c.n_healthy = 400;
  c.theta_true = 0.25;
  c.tau = 0.1;
  c.fpr_logit_mean = std::log(0.2 / 0.8);
  c.fpr_logit_sd = 0.8;
  c.seed = 77;
  const auto fit = fit_reml(generate(c), EffectsMode::Random, CorrectionMode::Affected);
  const auto curve = sroc_from_bivariate(fit, 2001);
  for (double u = 0.05; u <= 0.6; u += 0.05) {
    CHECK(std::fabs(interpolate_curve(curve, u) - std::pow(u, 0.25)) < 0.05);
  }
}

TEST_CASE("confidence region") {
  BivariateFit fit;
  fit.mu = {1.0, -1.0};
  fit.cov_mu = {1.0 / 5.991465, 0.0, 1.0 / 5.991465};
  const auto poly = confidence_region(fit, 0.95, 64);
  REQUIRE(poly.size() == 65);
  CHECK(poly.front() == poly.back());
  for (const auto& p : poly) {
    const double da = logit(p.se) - 1.0, db = logit(p.fpr) + 1.0;
    CHECK(std::sqrt(da * da + db * db) == doctest::Approx(1.0).epsilon(1e-6));
  }

  fit.cov_mu = {0.09, 0.03, 0.05};
  for (const auto& p : confidence_region(fit, 1e-12, 32)) {
    CHECK(p.se == doctest::Approx(fit.summary_point().se).epsilon(1e-5));
    CHECK(p.fpr == doctest::Approx(fit.summary_point().fpr).epsilon(1e-5));
  }
  CHECK(inside(confidence_region(fit, 0.95, 64), fit.summary_point()));

  auto logit_area = [&](double level) {
    std::vector<Vec2> pts;
    for (const auto& p : confidence_region(fit, level, 256)) pts.push_back({logit(p.fpr), logit(p.se)});
    return polygon_area(pts);
  };
  const double ratio = logit_area(0.95) / logit_area(0.50);
  CHECK(ratio == doctest::Approx(chi2_2df_quantile(0.95) / chi2_2df_quantile(0.50)).epsilon(0.01));

  fit.cov_mu = {1.0, 1.0, 1.0};
  CHECK_THROWS_AS(confidence_region(fit, 0.95, 32), Error);
  CHECK_THROWS_AS(confidence_region(fit, 0.95, 8), Error);
}

TEST_CASE("numeric AUC") {
  const RocCurve diag{{0.0, 0.0}, {1.0, 1.0}};
  CHECK(auc_numeric(diag) == 0.5);
  CHECK(std::fabs(auc_numeric(sroc_curve(0.25, 10001)) - 0.8) < 1e-4);
  RocCurve top;
  for (int j = 1; j <= 10001; ++j) top.push_back({j / 10001.0, 1.0});
  CHECK(std::fabs(auc_numeric(top) - 1.0) < 1e-4);
  const RocCurve bad{{0.2, 0.3}, {0.2, 0.5}};
  CHECK_THROWS_AS(auc_numeric(bad), Error);

  const auto low = sroc_curve(0.6, 501);
  auto high = low;
  for (auto& p : high) p.se = std::min(1.0, p.se + 0.05);
  CHECK(auc_numeric(high) >= auc_numeric(low));
}

TEST_CASE("bootstrap interval") {
  const auto ds = simulate_bivariate(12, 80, 120, {1.2, -1.4}, {0.25, 0.05, 0.3}, 5);
  BootstrapOptions one;
  BootstrapOptions many;
  many.threads = 4;
  const auto a = auc_ci_bootstrap(ds, EffectsMode::Random, 100, 0.95, 99, one);
  const auto b = auc_ci_bootstrap(ds, EffectsMode::Random, 100, 0.95, 99, one);
  const auto c = auc_ci_bootstrap(ds, EffectsMode::Random, 100, 0.95, 99, many);
  CHECK(a.ci == b.ci);
  CHECK(a.ci == c.ci);
  CHECK(a.dropped == c.dropped);
  CHECK(a.ci.lower < a.ci.upper);
  CHECK_THROWS_AS(auc_ci_bootstrap(ds, EffectsMode::Random, 50, 0.95, 99), Error);

  StudyDataset same{"same", {}};
  for (int i = 0; i < 6; ++i) same.records.push_back({"r" + std::to_string(i), std::nullopt, {40, 8, 10, 42}});
  const auto fit = fit_reml(same, EffectsMode::Fixed, CorrectionMode::Affected);
  const double point = auc_numeric(summary_curve(fit, kAucGridSize));
  const auto d = auc_ci_bootstrap(same, EffectsMode::Fixed, 100, 0.95, 1);
  CHECK(d.ci.width() < 0.01);
  CHECK(d.ci.contains(point));
}

TEST_CASE("bootstrap interval brackets the point estimate across simulated studies") {
  int bracketed = 0;
  const int studies = 100;
  for (int s = 0; s < studies; ++s) {
    SimConfig c;
    c.n_readers = 8;
    c.n_diseased = 100;
    c.n_healthy = 100;
    c.tau = 0.2;
    c.fpr_logit_sd = 0.6;
    c.seed = 1000 + static_cast<std::uint64_t>(s);
    const auto ds = generate(c);
    try {
      const auto fit = fit_reml(ds, EffectsMode::Random, CorrectionMode::Affected);
      const double point = auc_numeric(summary_curve(fit, kAucGridSize));
      const auto boot = auc_ci_bootstrap(ds, EffectsMode::Random, 100, 0.95, c.seed);
      bracketed += boot.ci.contains(point) ? 1 : 0;
    } catch (const Error&) {
    }
  }
  CHECK(bracketed >= 95);
}
