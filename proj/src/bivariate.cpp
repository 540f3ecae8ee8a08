#include "sroc/bivariate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <tuple>

#include "sroc/error.hpp"
#include "sroc/lehmann_phm.hpp"
#include "sroc/numeric.hpp"
#include "sroc/parallel.hpp"
#include "sroc/random.hpp"

namespace sroc {

namespace {

constexpr double kLogSdMin = -12.0;
constexpr double kLogSdMax = 3.5;
constexpr double kAtanhRhoMax = 8.0;
constexpr double kCurveFprLow = 0.001;
constexpr double kCurveFprHigh = 0.999;

Sym2 sigma_from_params(std::span<const double> p) {
  const double log_sd_a = std::clamp(p[0], kLogSdMin, kLogSdMax);
  const double log_sd_b = std::clamp(p[1], kLogSdMin, kLogSdMax);
  const double z = std::clamp(p[2], -kAtanhRhoMax, kAtanhRhoMax);
  return sigma_from_sd(std::exp(log_sd_a), std::exp(log_sd_b), std::tanh(z));
}

std::size_t min_readers(EffectsMode mode) { return mode == EffectsMode::Fixed ? 2 : 3; }

void require_readers(std::size_t k, EffectsMode mode) {
  if (k < min_readers(mode)) {
    throw Error(ErrorKind::InsufficientData, std::string("bivariate ") + to_string(mode) + "-effects fit needs at least " +
                                                 std::to_string(min_readers(mode)) + " readers, got " +
                                                 std::to_string(k));
  }
}

}  // namespace

RocPoint BivariateFit::summary_point() const { return {expit(mu[1]), expit(mu[0])}; }

double BivariateFit::correlation() const {
  const double d = std::sqrt(sigma.a * sigma.c);
  return d > 0.0 ? sigma.b / d : 0.0;
}

Sym2 sigma_from_sd(double sd_a, double sd_b, double rho) { return {sd_a * sd_a, rho * sd_a * sd_b, sd_b * sd_b}; }

double profile_loglik(std::span<const LogitPair> obs, const Sym2& sigma, bool restricted, Vec2* mu_out,
                      Sym2* cov_mu_out) {
  Sym2 sum_w;
  Vec2 sum_wy{};
  double log_det_v = 0.0;
  for (const auto& o : obs) {
    const Sym2 v = sigma + o.covariance();
    const Sym2 w = v.inverse();
    log_det_v += std::log(v.det());
    sum_w += w;
    const Vec2 wy = w * o.y;
    sum_wy[0] += wy[0];
    sum_wy[1] += wy[1];
  }
  const Sym2 cov_mu = sum_w.inverse();
  const Vec2 mu = cov_mu * sum_wy;

  double quad = 0.0;
  for (const auto& o : obs) {
    const Sym2 w = (sigma + o.covariance()).inverse();
    quad += w.quad({o.y[0] - mu[0], o.y[1] - mu[1]});
  }
  const double n = 2.0 * static_cast<double>(obs.size());
  const double log2pi = std::log(2.0 * std::numbers::pi);
  if (mu_out) *mu_out = mu;
  if (cov_mu_out) *cov_mu_out = cov_mu;
  if (restricted) return -0.5 * ((n - 2.0) * log2pi + log_det_v + std::log(sum_w.det()) + quad);
  return -0.5 * (n * log2pi + log_det_v + quad);
}

std::vector<LogitPair> logit_pairs(const StudyDataset& corrected) {
  std::vector<LogitPair> out;
  out.reserve(corrected.records.size());
  for (const auto& r : corrected.records) {
    try {
      out.push_back(logit_pair(r.table));
    } catch (const Error& e) {
      throw Error(e.kind(), "reader '" + r.reader_id + "': " + e.what());
    }
  }
  return out;
}

BivariateFit fit_reml(std::span<const LogitPair> input, EffectsMode mode, const BivariateOptions& options) {
  require_readers(input.size(), mode);
  const bool restricted = !options.use_ml;

  // Canonical order makes the fit bitwise invariant to reader order.
  std::vector<LogitPair> obs(input.begin(), input.end());
  std::sort(obs.begin(), obs.end(), [](const LogitPair& l, const LogitPair& r) {
    return std::tie(l.y[0], l.y[1], l.var[0], l.var[1]) < std::tie(r.y[0], r.y[1], r.var[0], r.var[1]);
  });

  BivariateFit fit;
  fit.effects_mode = mode;
  fit.n_readers = static_cast<int>(obs.size());

  const bool all_identical = std::all_of(obs.begin(), obs.end(), [&](const LogitPair& o) { return o.y == obs.front().y; });
  if (mode == EffectsMode::Fixed || all_identical) {
    fit.sigma = {};
    fit.loglik = profile_loglik(obs, fit.sigma, restricted, &fit.mu, &fit.cov_mu);
    fit.converged = true;
    return fit;
  }

  auto objective = [&](std::span<const double> p) { return -profile_loglik(obs, sigma_from_params(p), restricted); };

  // Moment-based start, then fixed dispersed starts.
  const double k = static_cast<double>(obs.size());
  Vec2 mean{}, mean_c{};
  for (const auto& o : obs) {
    mean[0] += o.y[0] / k;
    mean[1] += o.y[1] / k;
    mean_c[0] += o.var[0] / k;
    mean_c[1] += o.var[1] / k;
  }
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (const auto& o : obs) {
    const double da = o.y[0] - mean[0];
    const double db = o.y[1] - mean[1];
    saa += da * da / (k - 1.0);
    sbb += db * db / (k - 1.0);
    sab += da * db / (k - 1.0);
  }
  const double rho0 = (saa > 0.0 && sbb > 0.0) ? std::clamp(sab / std::sqrt(saa * sbb), -0.9, 0.9) : 0.0;
  const std::vector<std::array<double, 3>> starts = {
      {0.5 * std::log(std::max(saa - mean_c[0], 0.01)), 0.5 * std::log(std::max(sbb - mean_c[1], 0.01)),
       std::atanh(rho0)},
      {std::log(0.1), std::log(0.1), 0.0},
      {0.0, 0.0, std::atanh(0.5)},
      {std::log(0.5), std::log(2.0), std::atanh(-0.5)},
      {std::log(2.0), std::log(0.5), std::atanh(0.8)},
  };
  const std::array<double, 3> step = {0.5, 0.5, 0.5};

  const int restarts = std::max(1, options.restarts);
  std::optional<SimplexResult> best;
  bool any_converged = false;
  for (int r = 0; r < restarts; ++r) {
    auto start = starts[static_cast<std::size_t>(r) % starts.size()];
    if (r >= static_cast<int>(starts.size())) {
      // Extra restarts jitter the base starts deterministically.
      start[0] += 0.3 * (r / static_cast<int>(starts.size()));
      start[1] -= 0.3 * (r / static_cast<int>(starts.size()));
    }
    SimplexResult res = nelder_mead(objective, start, step, options.simplex);
    any_converged = any_converged || res.converged;
    if (!best || res.f < best->f) best = std::move(res);
  }
  if (!any_converged) {
    throw Error(ErrorKind::NonConvergence, "bivariate fit: every optimizer restart hit the iteration cap");
  }

  const Sym2 zero{};
  const double ll_boundary = profile_loglik(obs, zero, restricted);
  fit.sigma = ll_boundary >= -best->f ? zero : sigma_from_params(best->x);
  fit.loglik = profile_loglik(obs, fit.sigma, restricted, &fit.mu, &fit.cov_mu);
  fit.converged = true;
  return fit;
}

BivariateFit fit_reml(const StudyDataset& dataset, EffectsMode mode, CorrectionMode correction,
                      const BivariateOptions& options) {
  return fit_reml(logit_pairs(apply_continuity_correction(dataset, correction)), mode, options);
}

RocCurve sroc_from_bivariate(const BivariateFit& fit, int grid_size) {
  if (grid_size < 2) throw Error(ErrorKind::InvalidArgument, "grid_size must be at least 2");
  if (fit.effects_mode != EffectsMode::Random || !(fit.sigma.c > 0.0)) {
    throw Error(ErrorKind::DegenerateVariance, "SROC regression line needs a random-effects fit with var(logit FPR) > 0");
  }
  const double slope = fit.sigma.b / fit.sigma.c;
  const double lo = logit(kCurveFprLow);
  const double hi = logit(kCurveFprHigh);
  RocCurve curve(static_cast<std::size_t>(grid_size));
  for (int j = 0; j < grid_size; ++j) {
    const double x = lo + (hi - lo) * j / (grid_size - 1);
    curve[static_cast<std::size_t>(j)] = {expit(x), expit(fit.mu[0] + slope * (x - fit.mu[1]))};
  }
  return curve;
}

RocCurve summary_curve(const BivariateFit& fit, int grid_size) {
  if (fit.effects_mode == EffectsMode::Random && fit.sigma.c > 1e-12) return sroc_from_bivariate(fit, grid_size);
  const RocPoint p = fit.summary_point();
  return sroc_curve(std::log(p.se) / std::log(p.fpr), grid_size);
}

RocCurve confidence_region(const BivariateFit& fit, double level, int n_points) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::InvalidArgument, "level must lie in (0,1)");
  if (n_points < 16) throw Error(ErrorKind::InvalidArgument, "confidence region needs at least 16 points");
  const Chol2 l = cholesky(fit.cov_mu);
  const double r = std::sqrt(chi2_2df_quantile(level));
  RocCurve poly;
  poly.reserve(static_cast<std::size_t>(n_points) + 1);
  for (int j = 0; j < n_points; ++j) {
    const double t = 2.0 * std::numbers::pi * j / n_points;
    const double z0 = std::cos(t);
    const double z1 = std::sin(t);
    const double ya = fit.mu[0] + r * l.l11 * z0;
    const double yb = fit.mu[1] + r * (l.l21 * z0 + l.l22 * z1);
    poly.push_back({expit(yb), expit(ya)});
  }
  poly.push_back(poly.front());
  return poly;
}

double auc_numeric(std::span<const RocPoint> curve) {
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (!(curve[i].fpr > curve[i - 1].fpr)) {
      throw Error(ErrorKind::UnorderedInput, "auc_numeric: fpr must be strictly increasing");
    }
  }
  double area = 0.0;
  RocPoint prev{0.0, 0.0};
  for (const auto& p : curve) {
    area += 0.5 * (p.fpr - prev.fpr) * (p.se + prev.se);
    prev = p;
  }
  if (prev.fpr < 1.0) area += 0.5 * (1.0 - prev.fpr) * (1.0 + prev.se);
  return area;
}

BootstrapResult auc_ci_bootstrap(const StudyDataset& dataset, EffectsMode mode, int replicates, double level,
                                 std::uint64_t seed, const BootstrapOptions& options) {
  if (replicates < 100) throw Error(ErrorKind::InvalidArgument, "bootstrap needs at least 100 replicates");
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::InvalidArgument, "level must lie in (0,1)");
  const auto obs = logit_pairs(apply_continuity_correction(dataset, options.correction));
  require_readers(obs.size(), mode);

  const auto b_count = static_cast<std::size_t>(replicates);
  std::vector<std::optional<double>> aucs(b_count);
  parallel_for(b_count, options.threads, [&](std::size_t b) {
    CounterRng rng(seed, b);
    std::vector<LogitPair> sample(obs.size());
    for (auto& s : sample) s = obs[rng.below(obs.size())];
    try {
      const BivariateFit fit = fit_reml(sample, mode, options.fit);
      aucs[b] = auc_numeric(summary_curve(fit, options.grid_size));
    } catch (const Error&) {
      aucs[b] = std::nullopt;
    }
  });

  std::vector<double> ok;
  ok.reserve(b_count);
  for (const auto& a : aucs) {
    if (a) ok.push_back(*a);
  }
  BootstrapResult out;
  out.replicates = replicates;
  out.dropped = replicates - static_cast<int>(ok.size());
  if (ok.empty()) throw Error(ErrorKind::AllReplicatesFailed, "bootstrap: every replicate refit failed");
  if (out.dropped * 10 > replicates) {
    out.warnings.push_back("bootstrap: " + std::to_string(out.dropped) + " of " + std::to_string(replicates) +
                           " replicates failed to refit and were dropped");
  }
  std::sort(ok.begin(), ok.end());
  const double alpha = 1.0 - level;
  out.ci = {quantile_sorted(ok, 0.5 * alpha), quantile_sorted(ok, 1.0 - 0.5 * alpha)};
  return out;
}

}  // namespace sroc
