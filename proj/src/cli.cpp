#include "sroc/cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sroc/analysis.hpp"
#include "sroc/error.hpp"
#include "sroc/report.hpp"

namespace sroc::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.emplace_back(trim(cur));
  return fields;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

constexpr const char* kCountNames[] = {"tp", "fp", "fn", "tn"};

std::int64_t parse_count(const std::string& field, std::size_t line_no, const char* name) {
  std::int64_t v = -1;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc() || ptr != last || v < 0) {
    throw Error(ErrorKind::Validation, "line " + std::to_string(line_no) + ", field " + name +
                                           ": expected a non-negative integer, got '" + field + "'");
  }
  return v;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonConvergence:
    case ErrorKind::AllReplicatesFailed:
      return kFitFailure;
    case ErrorKind::DegenerateVariance:
    case ErrorKind::SingularCovariance:
    case ErrorKind::UnorderedInput:
    case ErrorKind::EmptyReport:
      return kInternalError;
    default:
      return kInputError;
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  f << text;
  f.close();
  if (!f) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/// Runs one pipeline stage, tagging any library error with the stage name.
template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(name) + ": " + e.what());
  }
}

}  // namespace

StudyDataset parse_dataset_text(std::string_view text, std::string label,
                                const std::optional<std::string>& group_column) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  StudyDataset ds;
  ds.label = std::move(label);

  std::size_t line_no = 0;
  bool header_seen = false;
  bool has_group = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);

    if (!header_seen) {
      header_seen = true;
      const bool plain = fields == std::vector<std::string>{"reader_id", "tp", "fp", "fn", "tn"};
      const bool grouped = fields.size() == 6 && fields[0] == "reader_id" && fields[2] == "tp" && fields[3] == "fp" &&
                           fields[4] == "fn" && fields[5] == "tn" && !fields[1].empty();
      if (!plain && !grouped) {
        throw Error(ErrorKind::MalformedHeader,
                    "line " + std::to_string(line_no) + ": header must be reader_id[,<group>],tp,fp,fn,tn");
      }
      has_group = grouped;
      if (group_column && (!grouped || fields[1] != *group_column)) {
        throw Error(ErrorKind::MalformedHeader, "line " + std::to_string(line_no) + ": group column '" +
                                                    *group_column + "' not found in header");
      }
      continue;
    }

    const std::size_t expected = has_group ? 6 : 5;
    if (fields.size() != expected) {
      throw Error(ErrorKind::Validation, "line " + std::to_string(line_no) + ": expected " + std::to_string(expected) +
                                             " fields, got " + std::to_string(fields.size()));
    }
    ReaderRecord r;
    r.reader_id = fields[0];
    if (r.reader_id.empty()) {
      throw Error(ErrorKind::Validation, "line " + std::to_string(line_no) + ", field reader_id: empty");
    }
    if (has_group && !fields[1].empty()) r.group = fields[1];
    const std::size_t off = has_group ? 2 : 1;
    double cells[4];
    for (std::size_t c = 0; c < 4; ++c) {
      cells[c] = static_cast<double>(parse_count(fields[off + c], line_no, kCountNames[c]));
    }
    r.table = {cells[0], cells[1], cells[2], cells[3]};
    if (r.table.n_diseased() < 1.0) {
      throw Error(ErrorKind::Validation,
                  "line " + std::to_string(line_no) + ", field tp: reader has no diseased cases (tp + fn = 0)");
    }
    if (r.table.n_healthy() < 1.0) {
      throw Error(ErrorKind::Validation,
                  "line " + std::to_string(line_no) + ", field fp: reader has no healthy cases (fp + tn = 0)");
    }
    for (const auto& existing : ds.records) {
      if (existing.reader_id == r.reader_id) {
        throw Error(ErrorKind::DuplicateReader,
                    "line " + std::to_string(line_no) + ": duplicate reader_id '" + r.reader_id + "'");
      }
    }
    ds.records.push_back(std::move(r));
  }
  if (!header_seen) throw Error(ErrorKind::MalformedHeader, "empty file: missing header");
  if (ds.records.empty()) throw Error(ErrorKind::InsufficientData, "no reader rows after the header");
  return ds;
}

StudyDataset parse_dataset(const std::string& path, const std::optional<std::string>& group_column) {
  return parse_dataset_text(read_file(path), std::filesystem::path(path).stem().string(), group_column);
}

std::string serialize_dataset(const StudyDataset& dataset, const std::string& group_column) {
  const bool grouped =
      std::any_of(dataset.records.begin(), dataset.records.end(), [](const ReaderRecord& r) { return r.group.has_value(); });
  std::string out = grouped ? "reader_id," + csv_field(group_column) + ",tp,fp,fn,tn\n" : "reader_id,tp,fp,fn,tn\n";
  auto cell = [](double v) { return std::to_string(static_cast<std::int64_t>(v)); };
  for (const auto& r : dataset.records) {
    if (!r.table.is_integral()) {
      throw Error(ErrorKind::Validation, "reader '" + r.reader_id + "' has non-integer cells; CSV holds raw counts");
    }
    out += csv_field(r.reader_id);
    if (grouped) out += "," + csv_field(r.group.value_or(""));
    out += "," + cell(r.table.tp) + "," + cell(r.table.fp) + "," + cell(r.table.fn) + "," + cell(r.table.tn) + "\n";
  }
  return out;
}

SimConfig apply_sim_config(std::string_view text, SimConfig c, const std::vector<std::string>& locked) {
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::Validation, "config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (std::find(locked.begin(), locked.end(), key) != locked.end()) continue;
    auto bad = [&] {
      return Error(ErrorKind::Validation,
                   "config line " + std::to_string(line_no) + ": invalid value '" + value + "' for " + key);
    };
    auto as_int = [&] {
      int v = 0;
      const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || p != value.data() + value.size()) throw bad();
      return v;
    };
    auto as_real = [&] {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(value, &used);
      } catch (const std::exception&) {
        throw bad();
      }
      if (used != value.size()) throw bad();
      return v;
    };
    if (key == "n_readers") c.n_readers = as_int();
    else if (key == "n_diseased") c.n_diseased = as_int();
    else if (key == "n_healthy") c.n_healthy = as_int();
    else if (key == "theta_true") c.theta_true = as_real();
    else if (key == "tau") c.tau = as_real();
    else if (key == "fpr_logit_mean") c.fpr_logit_mean = as_real();
    else if (key == "fpr_logit_sd") c.fpr_logit_sd = as_real();
    else if (key == "seed") {
      std::uint64_t v = 0;
      const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || p != value.data() + value.size()) throw bad();
      c.seed = v;
    } else {
      throw Error(ErrorKind::Validation, "config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  return c;
}

int run(const CliConfig& config, std::ostream& out, std::ostream& err) {
  try {
    switch (config.subcommand) {
      case Subcommand::Analyze: {
        const StudyDataset ds = stage("parse", [&] { return parse_dataset(config.input_path, config.group_column); });
        AnalysisOptions o;
        o.run_phm = config.model == "phm" || config.model == "both";
        o.run_bivariate = config.model == "bivariate" || config.model == "both";
        o.effects = config.effects;
        o.correction = config.correction;
        o.by_group = config.group_column.has_value();
        o.weighting = config.weight_by_cases ? Weighting::CaseWeighted : Weighting::Unweighted;
        if (config.ai_auc) o.ai = AucEstimate{*config.ai_auc, config.ai_auc_ci};
        o.bootstrap_b = config.bootstrap_b;
        o.level = config.level;
        o.seed = config.seed;
        o.threads = config.threads;
        AnalysisReport report = stage("analyze", [&] { return analyze(ds, o); });

        std::optional<std::string> svg;
        if (config.svg_out) {
          SvgDocument doc = stage("plot", [&] { return to_svg(report); });
          report.warnings.insert(report.warnings.end(), doc.warnings.begin(), doc.warnings.end());
          svg = std::move(doc.text);
        }
        const std::string json = to_json(report);
        for (const auto& w : report.warnings) err << "sroc: warning: " << w << "\n";
        stage("write", [&] {
          if (config.json_out) write_file(*config.json_out, json);
          if (svg) write_file(*config.svg_out, *svg);
          if (!config.json_out && !config.svg_out) out << json;
          return 0;
        });
        return kOk;
      }
      case Subcommand::Simulate: {
        const StudyDataset ds = stage("simulate", [&] { return generate(config.sim); });
        const std::string csv = serialize_dataset(ds);
        stage("write", [&] {
          if (config.out_path) write_file(*config.out_path, csv);
          else out << csv;
          return 0;
        });
        return kOk;
      }
      case Subcommand::Coverage: {
        CoverageOptions o;
        o.engine = stage("coverage", [&] { return engine_from_string(config.model); });
        o.effects = config.effects;
        o.level = config.level;
        o.correction = config.correction;
        o.bootstrap_b = config.bootstrap_b;
        o.threads = config.threads;
        const CoverageReport rep = stage("coverage", [&] { return coverage_experiment(config.sim, config.n_sims, o); });
        const std::string json = to_json(rep, config.sim);
        stage("write", [&] {
          if (config.json_out) write_file(*config.json_out, json);
          else out << json;
          return 0;
        });
        return kOk;
      }
    }
  } catch (const Error& e) {
    err << "sroc: error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "sroc: internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInternalError;
}

namespace {

void add_sim_options(CLI::App& app, CliConfig& c) {
  app.add_option("--n-readers", c.sim.n_readers, "Readers per simulated study")->check(CLI::PositiveNumber);
  app.add_option("--n-diseased", c.sim.n_diseased, "Diseased cases per reader")->check(CLI::PositiveNumber);
  app.add_option("--n-healthy", c.sim.n_healthy, "Healthy cases per reader")->check(CLI::PositiveNumber);
  app.add_option("--theta-true", c.sim.theta_true, "Median Lehmann theta")->check(CLI::PositiveNumber);
  app.add_option("--tau", c.sim.tau, "SD of ln theta across readers")->check(CLI::NonNegativeNumber);
  app.add_option("--fpr-logit-mean", c.sim.fpr_logit_mean, "Mean of logit FPR across readers");
  app.add_option("--fpr-logit-sd", c.sim.fpr_logit_sd, "SD of logit FPR across readers")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", c.seed, "Random seed");
  app.add_option("--config", "key=value file with SimConfig fields; flags override it");
}

const std::vector<std::pair<const char*, const char*>> kSimFlagKeys = {
    {"--n-readers", "n_readers"},   {"--n-diseased", "n_diseased"},         {"--n-healthy", "n_healthy"},
    {"--theta-true", "theta_true"}, {"--tau", "tau"},                       {"--fpr-logit-mean", "fpr_logit_mean"},
    {"--fpr-logit-sd", "fpr_logit_sd"}, {"--seed", "seed"}};

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CliConfig c;
  CLI::App app{"Summary ROC analysis of multi-reader binary diagnostic studies", "sroc"};
  app.require_subcommand(1);

  const std::map<std::string, EffectsMode> effects_map{{"fixed", EffectsMode::Fixed}, {"random", EffectsMode::Random}};
  const std::map<std::string, CorrectionMode> correction_map{
      {"none", CorrectionMode::None}, {"affected", CorrectionMode::Affected}, {"all", CorrectionMode::All}};

  auto* analyze = app.add_subcommand("analyze", "Fit SROC models to a reader CSV");
  analyze->add_option("input", c.input_path, "Reader CSV: reader_id[,group],tp,fp,fn,tn")->required();
  analyze->add_option("--model", c.model, "Engine(s) to fit")->check(CLI::IsMember({"phm", "bivariate", "both"}));
  analyze->add_option("--effects", c.effects, "Effects mode")->transform(CLI::CheckedTransformer(effects_map));
  analyze->add_option("--correction", c.correction, "Continuity correction")
      ->transform(CLI::CheckedTransformer(correction_map));
  analyze->add_option("--group-column", c.group_column, "Name of the group column; enables subgroup fits");
  analyze->add_flag("--weight-by-cases", c.weight_by_cases, "Weight the pooled point by reader case counts");
  analyze->add_option("--ai-auc", c.ai_auc, "AUC of the comparison model")->check(CLI::Range(0.0, 1.0));
  std::pair<double, double> ai_ci{};
  auto* ai_ci_opt = analyze->add_option("--ai-auc-ci", ai_ci, "Interval for the comparison model AUC (LOW HIGH)");
  analyze->add_option("--bootstrap-b", c.bootstrap_b, "Bootstrap replicates")->check(CLI::Range(100, 100000000));
  analyze->add_option("--level", c.level, "Confidence level")->check(CLI::Range(0.5, 1.0));
  analyze->add_option("--seed", c.seed, "Bootstrap seed");
  analyze->add_option("--json-out", c.json_out, "Write the JSON report here");
  analyze->add_option("--svg-out", c.svg_out, "Write the SVG figure here");
  analyze->add_option("--threads", c.threads, "Worker threads (0 = all cores)");

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic reader study as CSV");
  add_sim_options(*simulate, c);
  simulate->add_option("--out", c.out_path, "CSV destination (stdout when omitted)");

  auto* coverage = app.add_subcommand("coverage", "Monte Carlo coverage of the SROC intervals");
  add_sim_options(*coverage, c);
  c.model = "both";
  coverage->add_option("--model", c.model, "Engine")->check(CLI::IsMember({"phm", "bivariate"}));
  coverage->add_option("--effects", c.effects, "Effects mode")->transform(CLI::CheckedTransformer(effects_map));
  coverage->add_option("--correction", c.correction, "Continuity correction")
      ->transform(CLI::CheckedTransformer(correction_map));
  coverage->add_option("--level", c.level, "Confidence level")->check(CLI::Range(0.5, 1.0));
  coverage->add_option("--n-sims", c.n_sims, "Simulated studies")->check(CLI::PositiveNumber);
  coverage->add_option("--bootstrap-b", c.bootstrap_b, "Bootstrap replicates (bivariate)")
      ->check(CLI::Range(100, 100000000));
  coverage->add_option("--json-out", c.json_out, "Write the coverage JSON here");
  coverage->add_option("--threads", c.threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  if (ai_ci_opt->count() > 0) c.ai_auc_ci = Interval{ai_ci.first, ai_ci.second};
  if (!(c.level > 0.5 && c.level < 1.0)) {
    err << "sroc: error: config: --level must lie strictly between 0.5 and 1\n";
    return kInputError;
  }
  if (c.ai_auc_ci && !c.ai_auc) {
    err << "sroc: error: config: --ai-auc-ci requires --ai-auc\n";
    return kInputError;
  }
  for (auto* opt : {c.json_out ? &*c.json_out : nullptr, c.svg_out ? &*c.svg_out : nullptr,
                    c.out_path ? &*c.out_path : nullptr}) {
    if (opt && opt->empty()) {
      err << "sroc: error: config: output paths must be non-empty\n";
      return kInputError;
    }
  }

  if (analyze->parsed()) {
    c.subcommand = Subcommand::Analyze;
  } else {
    CLI::App* sub = simulate->parsed() ? simulate : coverage;
    c.subcommand = simulate->parsed() ? Subcommand::Simulate : Subcommand::Coverage;
    if (c.subcommand == Subcommand::Coverage && c.model == "both") c.model = "phm";
    c.sim.seed = c.seed;
    if (auto* cfg = sub->get_option("--config"); cfg->count() > 0) {
      std::vector<std::string> locked;
      for (const auto& [flag, key] : kSimFlagKeys) {
        if (sub->get_option(flag)->count() > 0) locked.emplace_back(key);
      }
      try {
        c.sim = apply_sim_config(read_file(cfg->as<std::string>()), c.sim, locked);
      } catch (const Error& e) {
        err << "sroc: error: config: " << e.what() << "\n";
        return kInputError;
      }
    }
    try {
      c.sim.validate();
    } catch (const Error& e) {
      err << "sroc: error: config: " << e.what() << "\n";
      return kInputError;
    }
  }
  return run(c, out, err);
}

}  // namespace sroc::cli
