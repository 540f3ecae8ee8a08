#include "sroc/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string_view>

#include "json.hpp"
#include "sroc/error.hpp"
#include "sroc/numeric.hpp"

namespace sroc {

using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// AUC comparison

namespace {

constexpr double kZ95 = 1.959964;

void check_estimate(const AucEstimate& e, const char* who) {
  if (!(e.auc > 0.0 && e.auc < 1.0)) {
    throw Error(ErrorKind::InvalidInterval, std::string(who) + " AUC must lie in (0,1)");
  }
  if (e.ci) {
    if (!(e.ci->lower <= e.ci->upper) || e.ci->lower < 0.0 || e.ci->upper > 1.0) {
      throw Error(ErrorKind::InvalidInterval, std::string(who) + " AUC interval is not an ordered sub-interval of [0,1]");
    }
    if (!e.ci->contains(e.auc)) {
      throw Error(ErrorKind::InvalidInterval, std::string(who) + " AUC interval does not contain its point estimate");
    }
  }
}

}  // namespace

AiComparison compare_auc(const AucEstimate& human, const AucEstimate& ai) {
  check_estimate(human, "human");
  check_estimate(ai, "AI");
  AiComparison out;
  out.ai_auc = ai.auc;
  out.ai_auc_ci = ai.ci;
  out.human_auc = human.auc;
  out.human_auc_ci = human.ci;
  out.difference = human.auc - ai.auc;

  if (human.ci && ai.ci) {
    const bool disjoint = human.ci->upper < ai.ci->lower || ai.ci->upper < human.ci->lower;
    out.relation = disjoint ? AucRelation::IntervalsDisjoint : AucRelation::IntervalsOverlap;
    const double se_h = human.ci->width() / (2.0 * kZ95);
    const double se_a = ai.ci->width() / (2.0 * kZ95);
    const double denom = std::sqrt(se_h * se_h + se_a * se_a);
    if (denom > 0.0) {
      const double z = out.difference / denom;
      out.z_test = ZTest{z, std::erfc(std::fabs(z) / std::sqrt(2.0))};
    }
  } else if (human.ci || ai.ci) {
    const Interval& ci = human.ci ? *human.ci : *ai.ci;
    const double point = human.ci ? ai.auc : human.auc;
    const bool inside = ci.contains(point);
    out.point_inside_interval = inside;
    out.relation = inside ? AucRelation::IntervalsOverlap : AucRelation::HumanCiExcludesAiPoint;
  } else {
    out.relation = AucRelation::NoCiAvailable;
  }
  return out;
}

const char* to_string(AucRelation r) {
  switch (r) {
    case AucRelation::HumanCiExcludesAiPoint: return "human_ci_excludes_ai_point";
    case AucRelation::IntervalsOverlap: return "intervals_overlap";
    case AucRelation::IntervalsDisjoint: return "intervals_disjoint";
    case AucRelation::NoCiAvailable: return "no_ci_available";
  }
  return "no_ci_available";
}

namespace {

AucRelation relation_from_string(const std::string& s) {
  for (auto r : {AucRelation::HumanCiExcludesAiPoint, AucRelation::IntervalsOverlap, AucRelation::IntervalsDisjoint,
                 AucRelation::NoCiAvailable}) {
    if (s == to_string(r)) return r;
  }
  throw Error(ErrorKind::Validation, "unknown AUC relation '" + s + "'");
}

// ---------------------------------------------------------------------------
// Canonical JSON writer

std::string format_real(double v) {
  if (!std::isfinite(v)) return "null";
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void write_json(const ojson& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case ojson::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in + ojson(key).dump() + ": ";
        write_json(value, out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case ojson::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars (points, intervals, matrix rows) stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const ojson& e) { return e.is_primitive(); });
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write_json(j[i], out, indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad_in;
        write_json(j[i], out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case ojson::value_t::number_float:
      out += format_real(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

ojson interval_json(const Interval& i) { return ojson::array({i.lower, i.upper}); }

ojson curve_json(const RocCurve& c) {
  ojson arr = ojson::array();
  for (const auto& p : c) arr.push_back(ojson::array({p.fpr, p.se}));
  return arr;
}

ojson sym_json(const Sym2& m) { return ojson::array({ojson::array({m.a, m.b}), ojson::array({m.b, m.c})}); }

ojson fit_json(const FitSummary& f) {
  ojson j;
  j["engine"] = to_string(f.engine);
  j["effects_mode"] = to_string(f.effects_mode);
  j["level"] = f.level;
  j["n_readers"] = f.n_readers;
  j["auc"] = f.auc;
  j["auc_ci"] = interval_json(f.auc_ci);
  j["readers_below_curve"] = f.readers_below_curve;
  if (f.phm) {
    const auto& p = *f.phm;
    ojson pj;
    pj["theta"] = p.theta;
    pj["ln_theta"] = p.ln_theta;
    pj["se_ln_theta"] = p.se_ln_theta;
    pj["theta_ci"] = interval_json(p.theta_ci);
    pj["tau2"] = p.tau2;
    pj["q"] = p.q;
    ojson readers = ojson::array();
    for (const auto& r : p.per_reader) {
      ojson rj;
      rj["reader_id"] = r.reader_id;
      rj["theta"] = r.theta;
      rj["var_ln_theta"] = r.var_ln_theta;
      readers.push_back(std::move(rj));
    }
    pj["per_reader"] = std::move(readers);
    j["phm"] = std::move(pj);
  }
  if (f.bivariate) {
    const auto& b = *f.bivariate;
    ojson bj;
    bj["mu"] = ojson::array({b.mu[0], b.mu[1]});
    bj["sigma"] = sym_json(b.sigma);
    bj["cov_mu"] = sym_json(b.cov_mu);
    bj["loglik"] = b.loglik;
    bj["converged"] = b.converged;
    bj["summary_point"] = ojson::array({b.summary_point.fpr, b.summary_point.se});
    bj["bootstrap_replicates"] = b.bootstrap_replicates;
    bj["bootstrap_dropped"] = b.bootstrap_dropped;
    j["bivariate"] = std::move(bj);
  }
  j["curve"] = curve_json(f.curve);
  if (f.region) j["region"] = curve_json(*f.region);
  return j;
}

ojson pooled_json(const PooledSummary& p) {
  ojson j;
  j["weighting"] = to_string(p.point.weighting);
  j["n_readers"] = p.point.n_readers;
  j["mean_se"] = p.point.mean_se;
  j["mean_sp"] = p.point.mean_sp;
  j["readers_below_pooled_curve"] = p.readers_below_pooled_curve;
  ojson scalars = ojson::object();
  for (const auto& [m, v] : p.scalars) scalars[to_string(m)] = v;
  j["scalars"] = std::move(scalars);
  return j;
}

ojson ai_json(const AiComparison& a) {
  ojson j;
  j["ai_auc"] = a.ai_auc;
  if (a.ai_auc_ci) j["ai_auc_ci"] = interval_json(*a.ai_auc_ci);
  j["human_engine"] = a.human_engine;
  j["human_auc"] = a.human_auc;
  if (a.human_auc_ci) j["human_auc_ci"] = interval_json(*a.human_auc_ci);
  j["difference"] = a.difference;
  j["relation"] = to_string(a.relation);
  if (a.point_inside_interval) j["point_inside_interval"] = *a.point_inside_interval;
  if (a.z_test) j["z_test"] = ojson{{"z", a.z_test->z}, {"p", a.z_test->p}};
  return j;
}

// ---------------------------------------------------------------------------
// JSON reader

double num(const nlohmann::json& j) {
  if (j.is_null()) return std::nan("");
  return j.get<double>();
}

Interval interval_from(const nlohmann::json& j) { return {num(j.at(0)), num(j.at(1))}; }

RocCurve curve_from(const nlohmann::json& j) {
  RocCurve c;
  for (const auto& p : j) c.push_back({num(p.at(0)), num(p.at(1))});
  return c;
}

Sym2 sym_from(const nlohmann::json& j) { return {num(j.at(0).at(0)), num(j.at(0).at(1)), num(j.at(1).at(1))}; }

FitSummary fit_from(const nlohmann::json& j) {
  FitSummary f;
  f.engine = engine_from_string(j.at("engine").get<std::string>());
  f.effects_mode = effects_mode_from_string(j.at("effects_mode").get<std::string>());
  f.level = num(j.at("level"));
  f.n_readers = j.at("n_readers").get<int>();
  f.auc = num(j.at("auc"));
  f.auc_ci = interval_from(j.at("auc_ci"));
  f.readers_below_curve = j.at("readers_below_curve").get<int>();
  if (j.contains("phm")) {
    const auto& pj = j["phm"];
    PhmSummary p;
    p.theta = num(pj.at("theta"));
    p.ln_theta = num(pj.at("ln_theta"));
    p.se_ln_theta = num(pj.at("se_ln_theta"));
    p.theta_ci = interval_from(pj.at("theta_ci"));
    p.tau2 = num(pj.at("tau2"));
    p.q = num(pj.at("q"));
    for (const auto& rj : pj.at("per_reader")) {
      p.per_reader.push_back({rj.at("reader_id").get<std::string>(), num(rj.at("theta")), num(rj.at("var_ln_theta"))});
    }
    f.phm = std::move(p);
  }
  if (j.contains("bivariate")) {
    const auto& bj = j["bivariate"];
    BivariateSummary b;
    b.mu = {num(bj.at("mu").at(0)), num(bj.at("mu").at(1))};
    b.sigma = sym_from(bj.at("sigma"));
    b.cov_mu = sym_from(bj.at("cov_mu"));
    b.loglik = num(bj.at("loglik"));
    b.converged = bj.at("converged").get<bool>();
    b.summary_point = {num(bj.at("summary_point").at(0)), num(bj.at("summary_point").at(1))};
    b.bootstrap_replicates = bj.at("bootstrap_replicates").get<int>();
    b.bootstrap_dropped = bj.at("bootstrap_dropped").get<int>();
    f.bivariate = b;
  }
  f.curve = curve_from(j.at("curve"));
  if (j.contains("region")) f.region = curve_from(j["region"]);
  return f;
}

PooledSummary pooled_from(const nlohmann::json& j) {
  PooledSummary p;
  p.point.weighting = j.at("weighting").get<std::string>() == "case_weighted" ? Weighting::CaseWeighted
                                                                              : Weighting::Unweighted;
  p.point.n_readers = j.at("n_readers").get<int>();
  p.point.mean_se = num(j.at("mean_se"));
  p.point.mean_sp = num(j.at("mean_sp"));
  p.readers_below_pooled_curve = j.at("readers_below_pooled_curve").get<int>();
  for (auto m : kAllScalarMetrics) {
    const auto& s = j.at("scalars");
    if (s.contains(to_string(m))) p.scalars.emplace_back(m, num(s[to_string(m)]));
  }
  return p;
}

}  // namespace

double canonical_real(double v) {
  const std::string s = format_real(v);
  return s == "null" ? v : std::strtod(s.c_str(), nullptr);
}

std::string to_json(const AnalysisReport& report) {
  ojson root;
  root["dataset_label"] = report.dataset_label;
  ojson readers = ojson::array();
  for (const auto& r : report.readers) {
    ojson rj;
    rj["reader_id"] = r.reader_id;
    if (r.group) rj["group"] = *r.group;
    rj["se"] = r.se;
    rj["sp"] = r.sp;
    rj["fpr"] = r.fpr;
    if (r.case_count == std::floor(r.case_count) && r.case_count < 9.0e15) {
      rj["case_count"] = static_cast<std::int64_t>(r.case_count);
    } else {
      rj["case_count"] = r.case_count;
    }
    readers.push_back(std::move(rj));
  }
  root["readers"] = std::move(readers);

  ojson fits = ojson::array();
  for (const auto& f : report.fits) fits.push_back(fit_json(f));
  root["fits"] = std::move(fits);

  ojson pooled = ojson::array();
  for (const auto& p : report.pooled) pooled.push_back(pooled_json(p));
  root["pooled"] = std::move(pooled);

  ojson subgroups = ojson::array();
  for (const auto& s : report.subgroups) {
    ojson sj;
    sj["group"] = s.group;
    sj["n_readers"] = s.n_readers;
    ojson sf = ojson::array();
    for (const auto& f : s.fits) sf.push_back(fit_json(f));
    sj["fits"] = std::move(sf);
    if (s.pooled) sj["pooled"] = pooled_json(*s.pooled);
    subgroups.push_back(std::move(sj));
  }
  root["subgroups"] = std::move(subgroups);

  if (report.ai_comparison) root["ai_comparison"] = ai_json(*report.ai_comparison);
  root["warnings"] = report.warnings;

  std::string out;
  write_json(root, out, 0);
  out += "\n";
  return out;
}

AnalysisReport report_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("report JSON does not parse: ") + e.what());
  }
  AnalysisReport r;
  try {
    r.dataset_label = j.at("dataset_label").get<std::string>();
    for (const auto& rj : j.at("readers")) {
      ReaderSummary s;
      s.reader_id = rj.at("reader_id").get<std::string>();
      if (rj.contains("group")) s.group = rj["group"].get<std::string>();
      s.se = num(rj.at("se"));
      s.sp = num(rj.at("sp"));
      s.fpr = num(rj.at("fpr"));
      s.case_count = num(rj.at("case_count"));
      r.readers.push_back(std::move(s));
    }
    for (const auto& fj : j.at("fits")) r.fits.push_back(fit_from(fj));
    for (const auto& pj : j.at("pooled")) r.pooled.push_back(pooled_from(pj));
    for (const auto& sj : j.at("subgroups")) {
      SubgroupResult s;
      s.group = sj.at("group").get<std::string>();
      s.n_readers = sj.at("n_readers").get<int>();
      for (const auto& fj : sj.at("fits")) s.fits.push_back(fit_from(fj));
      if (sj.contains("pooled")) s.pooled = pooled_from(sj["pooled"]);
      r.subgroups.push_back(std::move(s));
    }
    if (j.contains("ai_comparison")) {
      const auto& aj = j["ai_comparison"];
      AiComparison a;
      a.ai_auc = num(aj.at("ai_auc"));
      if (aj.contains("ai_auc_ci")) a.ai_auc_ci = interval_from(aj["ai_auc_ci"]);
      a.human_engine = aj.at("human_engine").get<std::string>();
      a.human_auc = num(aj.at("human_auc"));
      if (aj.contains("human_auc_ci")) a.human_auc_ci = interval_from(aj["human_auc_ci"]);
      a.difference = num(aj.at("difference"));
      a.relation = relation_from_string(aj.at("relation").get<std::string>());
      if (aj.contains("point_inside_interval")) a.point_inside_interval = aj["point_inside_interval"].get<bool>();
      if (aj.contains("z_test")) a.z_test = ZTest{num(aj["z_test"].at("z")), num(aj["z_test"].at("p"))};
      r.ai_comparison = a;
    }
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("report JSON does not match the schema: ") + e.what());
  }
  return r;
}

std::string to_json(const CoverageReport& report, const SimConfig& config) {
  ojson root;
  ojson cj;
  cj["n_readers"] = config.n_readers;
  cj["n_diseased"] = config.n_diseased;
  cj["n_healthy"] = config.n_healthy;
  cj["theta_true"] = config.theta_true;
  cj["tau"] = config.tau;
  cj["fpr_logit_mean"] = config.fpr_logit_mean;
  cj["fpr_logit_sd"] = config.fpr_logit_sd;
  cj["seed"] = config.seed;
  root["config"] = std::move(cj);
  root["engine"] = to_string(report.engine);
  root["effects_mode"] = to_string(report.effects);
  root["level"] = report.level;
  root["target"] = report.target;
  root["n_sims"] = report.n_sims;
  root["failures"] = report.failures;
  root["covered"] = report.covered;
  root["coverage"] = report.coverage;
  root["mean_width"] = report.mean_width;
  root["mean_auc_width"] = report.mean_auc_width;
  std::string out;
  write_json(root, out, 0);
  out += "\n";
  return out;
}

}  // namespace sroc
