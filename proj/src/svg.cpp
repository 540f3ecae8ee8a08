#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "sroc/error.hpp"
#include "sroc/numeric.hpp"
#include "sroc/report.hpp"

namespace sroc {

namespace {

constexpr double kMarginLeft = 64.0;
constexpr double kMarginRight = 16.0;
constexpr double kMarginTop = 36.0;
constexpr double kMarginBottom = 56.0;

constexpr const char* kReaderColor = "#2ca02c";
constexpr const char* kPooledColor = "#ff7f0e";
constexpr const char* kPhmColor = "#000000";
constexpr const char* kBivariateColor = "#1f4e9c";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string points_attr(const PlotFrame& f, const RocCurve& c) {
  std::string s;
  for (const auto& p : c) {
    if (!s.empty()) s += ' ';
    s += fmt(f.x(p.fpr)) + "," + fmt(f.y(p.se));
  }
  return s;
}

std::string path_closed(const PlotFrame& f, const RocCurve& c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) {
    s += (i == 0 ? "M" : " L") + fmt(f.x(c[i].fpr)) + "," + fmt(f.y(c[i].se));
  }
  return s + " Z";
}

std::string cross(const PlotFrame& f, RocPoint p, const char* color, double half) {
  const double x = f.x(p.fpr);
  const double y = f.y(p.se);
  return "  <g class=\"pooled\" stroke=\"" + std::string(color) + "\" stroke-width=\"2.5\">\n" +
         "    <line x1=\"" + fmt(x - half) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(x + half) + "\" y2=\"" + fmt(y) +
         "\"/>\n" + "    <line x1=\"" + fmt(x) + "\" y1=\"" + fmt(y - half) + "\" x2=\"" + fmt(x) + "\" y2=\"" +
         fmt(y + half) + "\"/>\n  </g>\n";
}

std::string fit_label(const FitSummary& fit) {
  const std::string engine = fit.engine == Engine::Phm ? "PHM" : "Bivariate";
  return engine + " SROC (" + to_string(fit.effects_mode) + ") AUC " + fmt3(fit.auc) + " [" + fmt3(fit.auc_ci.lower) +
         ", " + fmt3(fit.auc_ci.upper) + "]";
}

struct LegendEntry {
  std::string kind;  // line, dash, dot, cross, circle, text
  std::string color;
  std::string label;
};

}  // namespace

PlotFrame plot_frame(const SvgOptions& o) {
  const double side = std::min(o.width_px - kMarginLeft - kMarginRight, o.height_px - kMarginTop - kMarginBottom);
  if (!(side > 0.0)) throw Error(ErrorKind::InvalidArgument, "SVG canvas too small for the plot");
  return {kMarginLeft, kMarginTop, side};
}

double marker_radius(double case_count, double median_case_count, double r0) {
  return r0 * std::sqrt(case_count / median_case_count);
}

SvgDocument to_svg(const AnalysisReport& report, const SvgOptions& options) {
  if (report.readers.empty()) throw Error(ErrorKind::EmptyReport, "cannot plot a report with no readers");
  const PlotFrame f = plot_frame(options);
  SvgDocument doc;
  std::string& s = doc.text;

  const bool has_subgroups = !report.subgroups.empty();
  auto group_color = [&](const std::optional<std::string>& g) -> std::string {
    if (!has_subgroups || !g || options.subgroup_palette.empty()) return kReaderColor;
    for (std::size_t i = 0; i < report.subgroups.size(); ++i) {
      if (report.subgroups[i].group == *g) return options.subgroup_palette[i % options.subgroup_palette.size()];
    }
    return kReaderColor;
  };

  s += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(options.width_px) +
       "\" height=\"" + std::to_string(options.height_px) + "\" viewBox=\"0 0 " + std::to_string(options.width_px) +
       " " + std::to_string(options.height_px) + "\" font-family=\"Helvetica, Arial, sans-serif\">\n";
  s += "  <rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  s += "  <text x=\"" + fmt(f.x(0.5)) + "\" y=\"" + fmt(kMarginTop / 2 + 6) +
       "\" text-anchor=\"middle\" font-size=\"15\">" + escape(report.dataset_label) + "</text>\n";

  // Grid, ticks and frame.
  s += "  <g class=\"grid\" stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (int i = 1; i < 10; ++i) {
    const double v = i / 10.0;
    s += "    <line x1=\"" + fmt(f.x(v)) + "\" y1=\"" + fmt(f.y(0)) + "\" x2=\"" + fmt(f.x(v)) + "\" y2=\"" +
         fmt(f.y(1)) + "\"/>\n";
    s += "    <line x1=\"" + fmt(f.x(0)) + "\" y1=\"" + fmt(f.y(v)) + "\" x2=\"" + fmt(f.x(1)) + "\" y2=\"" +
         fmt(f.y(v)) + "\"/>\n";
  }
  s += "  </g>\n";
  s += "  <rect class=\"frame\" x=\"" + fmt(f.x(0)) + "\" y=\"" + fmt(f.y(1)) + "\" width=\"" + fmt(f.side) +
       "\" height=\"" + fmt(f.side) + "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
  s += "  <g class=\"ticks\" font-size=\"11\" fill=\"#333333\">\n";
  for (int i = 0; i <= 10; i += 2) {
    const double v = i / 10.0;
    char label[8];
    std::snprintf(label, sizeof label, "%.1f", v);
    s += "    <text x=\"" + fmt(f.x(v)) + "\" y=\"" + fmt(f.y(0) + 16) + "\" text-anchor=\"middle\">" + label +
         "</text>\n";
    s += "    <text x=\"" + fmt(f.x(0) - 6) + "\" y=\"" + fmt(f.y(v) + 4) + "\" text-anchor=\"end\">" + label +
         "</text>\n";
  }
  s += "  </g>\n";
  s += "  <text x=\"" + fmt(f.x(0.5)) + "\" y=\"" + fmt(f.y(0) + 40) +
       "\" text-anchor=\"middle\" font-size=\"13\">False positive rate (1 &#8722; specificity)</text>\n";
  s += "  <text x=\"" + fmt(f.x(0) - 44) + "\" y=\"" + fmt(f.y(0.5)) + "\" text-anchor=\"middle\" font-size=\"13\" " +
       "transform=\"rotate(-90 " + fmt(f.x(0) - 44) + " " + fmt(f.y(0.5)) + ")\">Sensitivity</text>\n";
  s += "  <line class=\"chance\" x1=\"" + fmt(f.x(0)) + "\" y1=\"" + fmt(f.y(0)) + "\" x2=\"" + fmt(f.x(1)) +
       "\" y2=\"" + fmt(f.y(1)) + "\" stroke=\"#888888\" stroke-width=\"1\" stroke-dasharray=\"6,4\"/>\n";

  // Readers.
  std::vector<double> counts;
  for (const auto& r : report.readers) counts.push_back(r.case_count);
  const double med = median(counts);
  s += "  <g class=\"readers\" fill-opacity=\"0.55\" stroke-width=\"0.8\">\n";
  for (const auto& r : report.readers) {
    const RocPoint p = r.roc_point();
    const std::string color = group_color(r.group);
    s += "    <circle cx=\"" + fmt(f.x(p.fpr)) + "\" cy=\"" + fmt(f.y(p.se)) + "\" r=\"" +
         fmt(marker_radius(r.case_count, med, options.marker_radius_px)) + "\" fill=\"" + color + "\" stroke=\"" +
         color + "\"><title>" + escape(r.reader_id) + "</title></circle>\n";
  }
  s += "  </g>\n";

  std::vector<LegendEntry> legend;
  legend.push_back({"circle", kReaderColor, "Readers (area ∝ cases)"});

  bool any_region = false;
  auto draw_fit = [&](const FitSummary& fit, const std::string& color, const std::string& label) {
    const bool biv = fit.engine == Engine::Bivariate;
    s += "  <polyline class=\"sroc\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\"" +
         (biv ? std::string(" stroke-dasharray=\"10,3\"") : std::string()) + " points=\"" +
         points_attr(f, fit.curve) + "\"/>\n";
    if (fit.region && options.show_region) {
      any_region = true;
      s += "  <path class=\"region\" d=\"" + path_closed(f, *fit.region) + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"1.5\" stroke-dasharray=\"2,3\"/>\n";
    }
    if (fit.bivariate) {
      const RocPoint p = fit.bivariate->summary_point;
      s += "  <circle class=\"summary\" cx=\"" + fmt(f.x(p.fpr)) + "\" cy=\"" + fmt(f.y(p.se)) + "\" r=\"3.5\" fill=\"" +
           color + "\"/>\n";
    }
    legend.push_back({biv ? "dash" : "line", color, label});
  };

  for (const auto& fit : report.fits) {
    draw_fit(fit, fit.engine == Engine::Phm ? kPhmColor : kBivariateColor, fit_label(fit));
  }
  for (std::size_t g = 0; g < report.subgroups.size(); ++g) {
    const auto& sg = report.subgroups[g];
    const std::string color =
        options.subgroup_palette.empty() ? kReaderColor : options.subgroup_palette[g % options.subgroup_palette.size()];
    for (const auto& fit : sg.fits) draw_fit(fit, color, sg.group + ": " + fit_label(fit));
    if (sg.fits.empty()) legend.push_back({"circle", color, sg.group});
  }
  if (options.show_region && !any_region) {
    doc.warnings.push_back("svg: no fit carries a confidence region; region omitted");
  }

  if (options.show_pooled_cross) {
    for (const auto& p : report.pooled) s += cross(f, p.point.roc_point(), kPooledColor, 7.0);
    for (std::size_t g = 0; g < report.subgroups.size(); ++g) {
      const auto& sg = report.subgroups[g];
      if (!sg.pooled || options.subgroup_palette.empty()) continue;
      s += cross(f, sg.pooled->point.roc_point(),
                 options.subgroup_palette[g % options.subgroup_palette.size()].c_str(), 6.0);
    }
    if (!report.pooled.empty()) legend.push_back({"cross", kPooledColor, "Mean Se/Sp (naive pooling)"});
  }
  if (report.ai_comparison) {
    const auto& a = *report.ai_comparison;
    std::string label = "AI model AUC " + fmt3(a.ai_auc);
    if (a.ai_auc_ci) label += " [" + fmt3(a.ai_auc_ci->lower) + ", " + fmt3(a.ai_auc_ci->upper) + "]";
    legend.push_back({"text", "#c00000", label});
  }

  // Legend in the lower-right corner of the plot, where ROC data is sparse.
  constexpr double kRow = 15.0;
  const double lx = f.x(0.30);
  double ly = f.y(0) - 8.0 - kRow * static_cast<double>(legend.size() - 1);
  s += "  <g class=\"legend\" font-size=\"10.5\">\n";
  s += "    <rect x=\"" + fmt(lx - 6) + "\" y=\"" + fmt(ly - 11) + "\" width=\"" + fmt(f.x(1) - lx + 2) + "\" height=\"" +
       fmt(kRow * static_cast<double>(legend.size()) + 4) +
       "\" fill=\"#ffffff\" fill-opacity=\"0.85\" stroke=\"#bbbbbb\"/>\n";
  for (const auto& e : legend) {
    const double cy = ly - 4.0;
    if (e.kind == "circle") {
      s += "    <circle cx=\"" + fmt(lx + 8) + "\" cy=\"" + fmt(cy) + "\" r=\"4\" fill=\"" + e.color +
           "\" fill-opacity=\"0.55\"/>\n";
    } else if (e.kind == "cross") {
      s += "    <path d=\"M" + fmt(lx + 3) + "," + fmt(cy) + " L" + fmt(lx + 13) + "," + fmt(cy) + " M" + fmt(lx + 8) +
           "," + fmt(cy - 5) + " L" + fmt(lx + 8) + "," + fmt(cy + 5) + "\" stroke=\"" + e.color +
           "\" stroke-width=\"2\"/>\n";
    } else if (e.kind == "line" || e.kind == "dash") {
      s += "    <line x1=\"" + fmt(lx) + "\" y1=\"" + fmt(cy) + "\" x2=\"" + fmt(lx + 16) + "\" y2=\"" + fmt(cy) +
           "\" stroke=\"" + e.color + "\" stroke-width=\"2\"" +
           (e.kind == "dash" ? std::string(" stroke-dasharray=\"5,2\"") : std::string()) + "/>\n";
    }
    s += "    <text x=\"" + fmt(lx + 22) + "\" y=\"" + fmt(ly) + "\" fill=\"" +
         (e.kind == "text" ? e.color : std::string("#000000")) + "\">" + escape(e.label) + "</text>\n";
    ly += kRow;
  }
  s += "  </g>\n";
  s += "</svg>\n";
  return doc;
}

}  // namespace sroc
