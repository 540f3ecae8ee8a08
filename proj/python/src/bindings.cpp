#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sroc/analysis.hpp"
#include "sroc/bivariate.hpp"
#include "sroc/cli.hpp"
#include "sroc/error.hpp"
#include "sroc/lehmann_phm.hpp"
#include "sroc/naive_pool.hpp"
#include "sroc/report.hpp"
#include "sroc/simulate.hpp"

namespace py = pybind11;
using namespace sroc;

namespace {

using Row = std::tuple<std::string, double, double, double, double, std::optional<std::string>>;

StudyDataset dataset_from_rows(const std::vector<Row>& rows, const std::string& label) {
  StudyDataset ds{label, {}};
  for (const auto& [id, tp, fp, fn, tn, group] : rows) ds.records.push_back({id, group, {tp, fp, fn, tn}});
  ds.validate();
  return ds;
}

std::vector<Row> rows_from_dataset(const StudyDataset& ds) {
  std::vector<Row> rows;
  for (const auto& r : ds.records) rows.emplace_back(r.reader_id, r.table.tp, r.table.fp, r.table.fn, r.table.tn, r.group);
  return rows;
}

std::vector<std::pair<double, double>> points(const RocCurve& c) {
  std::vector<std::pair<double, double>> out;
  out.reserve(c.size());
  for (const auto& p : c) out.emplace_back(p.fpr, p.se);
  return out;
}

std::optional<Interval> interval(const std::optional<std::pair<double, double>>& p) {
  if (!p) return std::nullopt;
  return Interval{p->first, p->second};
}

py::tuple interval_tuple(const Interval& i) { return py::make_tuple(i.lower, i.upper); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Summary ROC analysis of multi-reader binary diagnostic studies";

  static py::exception<Error> sroc_error(m, "SrocError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = sroc_error;
      py::object inst = err(e.what());
      inst.attr("kind") = to_string(e.kind());
      PyErr_SetObject(sroc_error.ptr(), inst.ptr());
    }
  });

  py::class_<ContingencyTable>(m, "ContingencyTable")
      .def(py::init([](double tp, double fp, double fn, double tn) { return ContingencyTable{tp, fp, fn, tn}; }),
           py::arg("tp"), py::arg("fp"), py::arg("fn"), py::arg("tn"))
      .def_readonly("tp", &ContingencyTable::tp)
      .def_readonly("fp", &ContingencyTable::fp)
      .def_readonly("fn", &ContingencyTable::fn)
      .def_readonly("tn", &ContingencyTable::tn)
      .def_property_readonly("sensitivity", [](const ContingencyTable& t) { return sensitivity(t); })
      .def_property_readonly("specificity", [](const ContingencyTable& t) { return specificity(t); })
      .def_property_readonly("false_positive_rate", [](const ContingencyTable& t) { return false_positive_rate(t); })
      .def_property_readonly("diagnostic_odds_ratio", [](const ContingencyTable& t) { return diagnostic_odds_ratio(t); })
      .def("__eq__", [](const ContingencyTable& a, const ContingencyTable& b) { return a == b; })
      .def("__repr__", [](const ContingencyTable& t) {
        return "ContingencyTable(tp=" + py::repr(py::float_(t.tp)).cast<std::string>() +
               ", fp=" + py::repr(py::float_(t.fp)).cast<std::string>() +
               ", fn=" + py::repr(py::float_(t.fn)).cast<std::string>() +
               ", tn=" + py::repr(py::float_(t.tn)).cast<std::string>() + ")";
      });

  py::class_<ReaderTheta>(m, "ReaderTheta")
      .def_readonly("reader_id", &ReaderTheta::reader_id)
      .def_readonly("theta", &ReaderTheta::theta)
      .def_readonly("var_ln_theta", &ReaderTheta::var_ln_theta);

  py::class_<PhmFit>(m, "PhmFit")
      .def_property_readonly("effects_mode", [](const PhmFit& f) { return to_string(f.effects_mode); })
      .def_readonly("theta", &PhmFit::theta_pooled)
      .def_readonly("ln_theta", &PhmFit::ln_theta)
      .def_readonly("se_ln_theta", &PhmFit::se_ln_theta)
      .def_readonly("tau2", &PhmFit::tau2)
      .def_readonly("q", &PhmFit::q)
      .def_readonly("auc", &PhmFit::auc)
      .def_property_readonly("auc_ci", [](const PhmFit& f) { return interval_tuple(f.auc_ci); })
      .def_property_readonly("theta_ci", [](const PhmFit& f) { return interval_tuple(f.theta_ci); })
      .def_readonly("per_reader", &PhmFit::per_reader);

  py::class_<BivariateFit>(m, "BivariateFit")
      .def_property_readonly("effects_mode", [](const BivariateFit& f) { return to_string(f.effects_mode); })
      .def_property_readonly("mu", [](const BivariateFit& f) { return py::make_tuple(f.mu[0], f.mu[1]); })
      .def_property_readonly("sigma",
                             [](const BivariateFit& f) { return py::make_tuple(f.sigma.a, f.sigma.b, f.sigma.c); })
      .def_property_readonly("cov_mu",
                             [](const BivariateFit& f) { return py::make_tuple(f.cov_mu.a, f.cov_mu.b, f.cov_mu.c); })
      .def_readonly("loglik", &BivariateFit::loglik)
      .def_readonly("converged", &BivariateFit::converged)
      .def_property_readonly("summary_point", [](const BivariateFit& f) {
        const RocPoint p = f.summary_point();
        return py::make_tuple(p.fpr, p.se);
      });

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("n_readers", &SimConfig::n_readers)
      .def_readwrite("n_diseased", &SimConfig::n_diseased)
      .def_readwrite("n_healthy", &SimConfig::n_healthy)
      .def_readwrite("theta_true", &SimConfig::theta_true)
      .def_readwrite("tau", &SimConfig::tau)
      .def_readwrite("fpr_logit_mean", &SimConfig::fpr_logit_mean)
      .def_readwrite("fpr_logit_sd", &SimConfig::fpr_logit_sd)
      .def_readwrite("seed", &SimConfig::seed);

  m.def(
      "reader_theta",
      [](const ContingencyTable& t, const std::string& id) { return reader_theta(t, id); }, py::arg("table"),
      py::arg("reader_id") = "");

  m.def(
      "fit_phm",
      [](const std::vector<Row>& rows, const std::string& effects, const std::string& correction, double level) {
        const auto ds = apply_continuity_correction(dataset_from_rows(rows, "data"), correction_mode_from_string(correction));
        return fit_phm(reader_thetas(ds), effects_mode_from_string(effects), level);
      },
      py::arg("rows"), py::arg("effects") = "random", py::arg("correction") = "affected", py::arg("level") = 0.95);

  m.def(
      "fit_bivariate",
      [](const std::vector<Row>& rows, const std::string& effects, const std::string& correction) {
        const auto ds = dataset_from_rows(rows, "data");
        py::gil_scoped_release release;
        return fit_reml(ds, effects_mode_from_string(effects), correction_mode_from_string(correction));
      },
      py::arg("rows"), py::arg("effects") = "random", py::arg("correction") = "affected");

  m.def("sroc_curve", [](double theta, int n) { return points(sroc_curve(theta, n)); }, py::arg("theta"),
        py::arg("grid_size") = 101);
  m.def("summary_curve", [](const BivariateFit& f, int n) { return points(summary_curve(f, n)); }, py::arg("fit"),
        py::arg("grid_size") = 101);
  m.def(
      "confidence_region",
      [](const BivariateFit& f, double level, int n) { return points(confidence_region(f, level, n)); },
      py::arg("fit"), py::arg("level") = 0.95, py::arg("n_points") = 64);
  m.def(
      "auc_numeric",
      [](const std::vector<std::pair<double, double>>& pts) {
        RocCurve c;
        for (const auto& [x, y] : pts) c.push_back({x, y});
        return auc_numeric(c);
      },
      py::arg("curve"));

  m.def(
      "pooled_point",
      [](const std::vector<Row>& rows, bool weight_by_cases) {
        const auto p = pooled_point(dataset_from_rows(rows, "data").records,
                                    weight_by_cases ? Weighting::CaseWeighted : Weighting::Unweighted);
        return py::make_tuple(p.mean_fpr(), p.mean_se);
      },
      py::arg("rows"), py::arg("weight_by_cases") = false);

  m.def(
      "compare_auc",
      [](double human_auc, std::optional<std::pair<double, double>> human_ci, double ai_auc,
         std::optional<std::pair<double, double>> ai_ci) {
        const auto c = compare_auc({human_auc, interval(human_ci)}, {ai_auc, interval(ai_ci)});
        py::dict d;
        d["difference"] = c.difference;
        d["relation"] = to_string(c.relation);
        d["point_inside_interval"] = c.point_inside_interval ? py::cast(*c.point_inside_interval) : py::none();
        d["z_test"] = c.z_test ? py::cast(std::make_pair(c.z_test->z, c.z_test->p)) : py::none();
        return d;
      },
      py::arg("human_auc"), py::arg("human_ci"), py::arg("ai_auc"), py::arg("ai_ci") = py::none());

  m.def("generate", [](const SimConfig& c) { return rows_from_dataset(generate(c)); }, py::arg("config"));

  m.def(
      "read_csv",
      [](const std::string& path, std::optional<std::string> group_column) {
        return rows_from_dataset(cli::parse_dataset(path, group_column));
      },
      py::arg("path"), py::arg("group_column") = py::none());

  m.def(
      "analyze",
      [](const std::vector<Row>& rows, const std::string& label, const std::string& model, const std::string& effects,
         const std::string& correction, bool by_group, bool weight_by_cases, std::optional<double> ai_auc,
         std::optional<std::pair<double, double>> ai_auc_ci, int bootstrap_b, double level, std::uint64_t seed,
         unsigned threads, bool svg) {
        if (model != "phm" && model != "bivariate" && model != "both")
          throw Error(ErrorKind::InvalidArgument, "model must be phm, bivariate or both");
        const auto ds = dataset_from_rows(rows, label);
        AnalysisOptions o;
        o.run_phm = model != "bivariate";
        o.run_bivariate = model != "phm";
        o.effects = effects_mode_from_string(effects);
        o.correction = correction_mode_from_string(correction);
        o.by_group = by_group;
        o.weighting = weight_by_cases ? Weighting::CaseWeighted : Weighting::Unweighted;
        if (ai_auc) o.ai = AucEstimate{*ai_auc, interval(ai_auc_ci)};
        o.bootstrap_b = bootstrap_b;
        o.level = level;
        o.seed = seed;
        o.threads = threads;
        std::string json, figure;
        {
          py::gil_scoped_release release;
          AnalysisReport report = analyze(ds, o);
          if (svg) {
            SvgDocument doc = to_svg(report);
            report.warnings.insert(report.warnings.end(), doc.warnings.begin(), doc.warnings.end());
            figure = std::move(doc.text);
          }
          json = to_json(report);
        }
        return py::make_tuple(json, svg ? py::object(py::str(figure)) : py::object(py::none()));
      },
      py::arg("rows"), py::arg("label") = "data", py::arg("model") = "both", py::arg("effects") = "random",
      py::arg("correction") = "affected", py::arg("by_group") = false, py::arg("weight_by_cases") = false,
      py::arg("ai_auc") = py::none(), py::arg("ai_auc_ci") = py::none(), py::arg("bootstrap_b") = 2000,
      py::arg("level") = 0.95, py::arg("seed") = 0, py::arg("threads") = 1, py::arg("svg") = false);

  m.def(
      "coverage",
      [](const SimConfig& c, int n_sims, const std::string& engine, const std::string& effects, double level,
         int bootstrap_b, unsigned threads) {
        CoverageOptions o;
        o.engine = engine_from_string(engine);
        o.effects = effects_mode_from_string(effects);
        o.level = level;
        o.bootstrap_b = bootstrap_b;
        o.threads = threads;
        py::gil_scoped_release release;
        return to_json(coverage_experiment(c, n_sims, o), c);
      },
      py::arg("config"), py::arg("n_sims"), py::arg("engine") = "phm", py::arg("effects") = "random",
      py::arg("level") = 0.95, py::arg("bootstrap_b") = 200, py::arg("threads") = 1);
}
