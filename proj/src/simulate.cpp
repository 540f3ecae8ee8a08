#include "sroc/simulate.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "sroc/bivariate.hpp"
#include "sroc/error.hpp"
#include "sroc/lehmann_phm.hpp"
#include "sroc/numeric.hpp"
#include "sroc/parallel.hpp"
#include "sroc/random.hpp"

namespace sroc {

void SimConfig::validate() const {
  if (n_readers < 1) throw Error(ErrorKind::InvalidArgument, "n_readers must be at least 1");
  if (n_diseased < 1 || n_healthy < 1) throw Error(ErrorKind::InvalidArgument, "case counts must be at least 1");
  if (!(theta_true > 0.0) || !std::isfinite(theta_true)) throw Error(ErrorKind::InvalidArgument, "theta_true must be positive");
  if (!(tau >= 0.0)) throw Error(ErrorKind::InvalidArgument, "tau must be non-negative");
  if (!(fpr_logit_sd >= 0.0)) throw Error(ErrorKind::InvalidArgument, "fpr_logit_sd must be non-negative");
  if (!std::isfinite(fpr_logit_mean)) throw Error(ErrorKind::InvalidArgument, "fpr_logit_mean must be finite");
}

StudyDataset generate(const SimConfig& config) {
  config.validate();
  StudyDataset ds;
  ds.label = "simulated";
  ds.records.reserve(static_cast<std::size_t>(config.n_readers));
  const double ln_theta = std::log(config.theta_true);
  for (int i = 0; i < config.n_readers; ++i) {
    CounterRng rng(config.seed, static_cast<std::uint64_t>(i));
    const double theta_i = std::exp(rng.normal(ln_theta, config.tau));
    const double fpr = expit(rng.normal(config.fpr_logit_mean, config.fpr_logit_sd));
    const double se = std::pow(fpr, theta_i);
    const auto n1 = static_cast<std::uint64_t>(config.n_diseased);
    const auto n0 = static_cast<std::uint64_t>(config.n_healthy);
    const auto tp = rng.binomial(n1, se);
    const auto fp = rng.binomial(n0, fpr);
    ReaderRecord r;
    r.reader_id = "r" + std::to_string(i + 1);
    r.table = {static_cast<double>(tp), static_cast<double>(fp), static_cast<double>(n1 - tp),
               static_cast<double>(n0 - fp)};
    ds.records.push_back(std::move(r));
  }
  return ds;
}

const char* to_string(Engine e) { return e == Engine::Phm ? "phm" : "bivariate"; }

Engine engine_from_string(const std::string& s) {
  if (s == "phm") return Engine::Phm;
  if (s == "bivariate") return Engine::Bivariate;
  throw Error(ErrorKind::InvalidArgument, "unknown engine '" + s + "'");
}

double population_auc(double theta, double tau) {
  if (tau == 0.0) return auc_from_theta(theta);
  // Trapezoid over the standard normal density; the tails beyond |z| = 10
  // carry negligible mass.
  constexpr int kPoints = 4001;
  constexpr double kSpan = 10.0;
  const double h = 2.0 * kSpan / (kPoints - 1);
  double sum = 0.0;
  for (int j = 0; j < kPoints; ++j) {
    const double z = -kSpan + j * h;
    const double w = (j == 0 || j == kPoints - 1) ? 0.5 : 1.0;
    sum += w * std::exp(-0.5 * z * z) / (1.0 + theta * std::exp(tau * z));
  }
  return sum * h / std::sqrt(2.0 * std::numbers::pi);
}

namespace {

struct Replicate {
  bool covered = false;
  double width = 0.0;
  double auc_width = 0.0;
};

}  // namespace

CoverageReport coverage_experiment(const SimConfig& config, int n_sims, const CoverageOptions& options) {
  config.validate();
  if (n_sims < 1) throw Error(ErrorKind::InvalidArgument, "n_sims must be at least 1");

  CoverageReport report;
  report.engine = options.engine;
  report.effects = options.effects;
  report.level = options.level;
  report.n_sims = n_sims;
  report.target = options.engine == Engine::Phm ? config.theta_true : population_auc(config.theta_true, config.tau);

  std::vector<std::optional<Replicate>> results(static_cast<std::size_t>(n_sims));
  parallel_for(results.size(), options.threads, [&](std::size_t r) {
    SimConfig c = config;
    c.seed = derive_seed(config.seed, r);
    try {
      const StudyDataset ds = generate(c);
      Replicate rep;
      if (options.engine == Engine::Phm) {
        const auto readers = reader_thetas(apply_continuity_correction(ds, options.correction));
        const PhmFit fit = fit_phm(readers, options.effects, options.level);
        rep.covered = fit.theta_ci.contains(report.target);
        rep.width = fit.theta_ci.width();
        rep.auc_width = fit.auc_ci.width();
      } else {
        BootstrapOptions bo;
        bo.correction = options.correction;
        bo.threads = 1;
        const auto boot = auc_ci_bootstrap(ds, options.effects, options.bootstrap_b, options.level,
                                           derive_seed(c.seed, 0xB0075747u), bo);
        rep.covered = boot.ci.contains(report.target);
        rep.width = boot.ci.width();
        rep.auc_width = rep.width;
      }
      results[r] = rep;
    } catch (const Error&) {
      results[r] = std::nullopt;
    }
  });

  double width_sum = 0.0, auc_width_sum = 0.0;
  for (const auto& rep : results) {
    if (!rep) {
      ++report.failures;
      continue;
    }
    report.covered += rep->covered ? 1 : 0;
    width_sum += rep->width;
    auc_width_sum += rep->auc_width;
  }
  const int ok = n_sims - report.failures;
  if (ok > 0) {
    report.coverage = static_cast<double>(report.covered) / ok;
    report.mean_width = width_sum / ok;
    report.mean_auc_width = auc_width_sum / ok;
  }
  return report;
}

}  // namespace sroc
