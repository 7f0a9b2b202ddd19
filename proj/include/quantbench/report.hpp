#pragma once

// Table and chart rendering for benchmark results. All functions are pure:
// the same inputs produce byte-identical output.

#include <quantbench/bench.hpp>

#include <algorithm>
#include <string>
#include <vector>

namespace quantbench {

inline std::string format_accuracy_pct(double accuracy) { return format_fixed(100.0 * accuracy, 2); }
inline std::string format_seconds(double s) { return format_fixed(s, 4); }

namespace detail {

inline const BenchResult& find_baseline(const std::vector<BenchResult>& results) {
  const auto it = std::find_if(results.begin(), results.end(), [](const BenchResult& r) { return r.is_baseline(); });
  if (it == results.end()) throw ReportError("results contain no baseline cell");
  if (!it->ok()) throw ReportError("baseline cell failed: " + it->error);
  return *it;
}

inline std::vector<Technique> techniques_in_order(const std::vector<BenchResult>& results) {
  std::vector<Technique> out;
  for (const auto& r : results)
    if (!r.is_baseline() && std::find(out.begin(), out.end(), r.technique) == out.end()) out.push_back(r.technique);
  return out;
}

inline const BenchResult* find_cell(const std::vector<BenchResult>& results, Technique t, Precision p) {
  for (const auto& r : results)
    if (r.technique == t && r.precision == p) return &r;
  return nullptr;
}

inline std::string pad_left(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

inline std::string pad_right(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}

inline std::string xml_escape(std::string_view s) {
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

}  // namespace detail

/// Fixed-layout comparison table. The baseline's accuracy and time appear once,
/// on the first technique row; failed cells show "ERR". A footer lists the
/// derived time reductions.
inline std::string render_table(const std::vector<BenchResult>& results, const std::string& title = {}) {
  const BenchResult& base = detail::find_baseline(results);
  const std::vector<std::string> headers{"Technique",   "Acc Before %", "Acc F32 %", "Acc I32 %",
                                         "Time Before s", "Time F32 s",  "Time I32 s"};
  std::vector<std::vector<std::string>> rows;
  auto cell_text = [&](Technique t, Precision p, bool acc) -> std::string {
    const BenchResult* r = detail::find_cell(results, t, p);
    if (!r) return "";
    if (!r->ok()) return "ERR";
    return acc ? format_accuracy_pct(r->accuracy) : format_seconds(r->fit_time_s);
  };
  const auto techniques = detail::techniques_in_order(results);
  if (techniques.empty()) {
    rows.push_back({"-", format_accuracy_pct(base.accuracy), "", "", format_seconds(base.fit_time_s), "", ""});
  }
  for (std::size_t k = 0; k < techniques.size(); ++k) {
    const auto t = techniques[k];
    rows.push_back({std::string(display_name(t)), k == 0 ? format_accuracy_pct(base.accuracy) : "",
                    cell_text(t, Precision::F32, true), cell_text(t, Precision::I32, true),
                    k == 0 ? format_seconds(base.fit_time_s) : "", cell_text(t, Precision::F32, false),
                    cell_text(t, Precision::I32, false)});
  }

  std::vector<std::size_t> width(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) {
    width[c] = headers[c].size();
    for (const auto& r : rows) width[c] = std::max(width[c], r[c].size());
  }
  std::string out;
  if (!title.empty()) out += title + "\n";
  for (std::size_t c = 0; c < headers.size(); ++c) {
    out += c == 0 ? detail::pad_right(headers[c], width[c]) : " | " + detail::pad_left(headers[c], width[c]);
  }
  out += "\n";
  for (std::size_t c = 0; c < headers.size(); ++c) out += (c == 0 ? "" : "-+-") + std::string(width[c], '-');
  out += "\n";
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t c = 0; c < headers.size(); ++c) {
      line += c == 0 ? detail::pad_right(r[c], width[c]) : " | " + detail::pad_left(r[c], width[c]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }

  bool any = false;
  for (const auto& r : results) {
    if (r.is_baseline() || !r.ok()) continue;
    if (!any) out += "\nTime reduction vs baseline, 100 x (1 - t / t_baseline):\n";
    any = true;
    out += "  " + detail::pad_right(std::string(display_name(r.technique)), 20) + " " +
           std::string(to_string(r.precision)) + "  " + format_fixed(r.time_reduction_pct, 1) + " %\n";
  }
  out += "\nReference check of the reduction formula: 0.0258 s -> 0.0142 s is a " +
         format_fixed(time_reduction_pct(0.0142, 0.0258), 1) + " % reduction and 0.0258 s -> 0.0025 s is " +
         format_fixed(time_reduction_pct(0.0025, 0.0258), 1) +
         " %; a 92.1 % reduction from 0.0258 s would require " + format_seconds(0.0258 * (1.0 - 0.921)) +
         " s.\n";
  return out;
}

/// Accuracy-vs-n_quantiles series: one row per quantile count, one column
/// per precision, accuracy in percent.
inline std::string sweep_to_csv(const std::vector<SweepPoint>& points) {
  if (points.empty()) throw ReportError("empty sweep");
  std::vector<std::size_t> grid;
  std::vector<Precision> precisions;
  for (const auto& p : points) {
    if (std::find(grid.begin(), grid.end(), p.n_quantiles) == grid.end()) grid.push_back(p.n_quantiles);
    if (std::find(precisions.begin(), precisions.end(), p.precision) == precisions.end())
      precisions.push_back(p.precision);
  }
  std::string out = "n_quantiles";
  for (auto p : precisions) out += ",accuracy_" + std::string(to_string(p));
  out += "\n";
  for (auto nq : grid) {
    out += std::to_string(nq);
    for (auto prec : precisions) {
      out += ",";
      for (const auto& p : points)
        if (p.n_quantiles == nq && p.precision == prec) out += format_accuracy_pct(p.accuracy);
    }
    out += "\n";
  }
  return out;
}

/// Grouped-bar data: the baseline reference first, then one row per
/// successful technique x precision cell.
inline std::string comparison_to_csv(const std::vector<BenchResult>& results) {
  const BenchResult& base = detail::find_baseline(results);
  std::string out = "technique,precision,accuracy_pct,fit_time_s\n";
  out += std::string(display_name(base.technique)) + "," + std::string(to_string(base.precision)) + "," +
         format_accuracy_pct(base.accuracy) + "," + format_seconds(base.fit_time_s) + "\n";
  for (const auto& r : results) {
    if (r.is_baseline() || !r.ok()) continue;
    out += std::string(display_name(r.technique)) + "," + std::string(to_string(r.precision)) + "," +
           format_accuracy_pct(r.accuracy) + "," + format_seconds(r.fit_time_s) + "\n";
  }
  return out;
}

/// Self-contained SVG with an accuracy panel and a fit-time panel. Each bar
/// and baseline line carries a <title> holding exactly the value written by
/// comparison_to_csv.
inline std::string render_comparison_svg(const std::vector<BenchResult>& results) {
  const BenchResult& base = detail::find_baseline(results);
  std::vector<const BenchResult*> bars;
  for (const auto& r : results)
    if (!r.is_baseline() && r.ok()) bars.push_back(&r);

  constexpr int kPanelW = 420, kPanelH = 260, kMargin = 50, kGap = 40;
  const int plot_w = kPanelW - 2 * kMargin;
  const int plot_h = kPanelH - 2 * kMargin;
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(2 * kPanelW + kGap) +
         "\" height=\"" + std::to_string(kPanelH) + "\" font-family=\"sans-serif\" font-size=\"10\">\n";

  struct Panel {
    const char* label;
    const char* key;
    bool accuracy;
  };
  const Panel panels[] = {{"Accuracy (%)", "accuracy_pct", true}, {"Fit time (s)", "fit_time_s", false}};
  for (int pi = 0; pi < 2; ++pi) {
    const Panel& panel = panels[pi];
    const int x0 = pi * (kPanelW + kGap) + kMargin;
    const int y0 = kMargin;
    auto value = [&](const BenchResult& r) { return panel.accuracy ? 100.0 * r.accuracy : r.fit_time_s; };
    auto text = [&](const BenchResult& r) {
      return panel.accuracy ? format_accuracy_pct(r.accuracy) : format_seconds(r.fit_time_s);
    };
    double vmax = value(base);
    for (const auto* b : bars) vmax = std::max(vmax, value(*b));
    if (!(vmax > 0.0)) vmax = 1.0;
    auto scale_y = [&](double v) { return y0 + plot_h - static_cast<int>(v / vmax * plot_h + 0.5); };

    svg += "  <g>\n";
    svg += "    <text x=\"" + std::to_string(x0) + "\" y=\"" + std::to_string(y0 - 15) + "\" font-size=\"12\">" +
           panel.label + "</text>\n";
    svg += "    <line x1=\"" + std::to_string(x0) + "\" y1=\"" + std::to_string(y0 + plot_h) + "\" x2=\"" +
           std::to_string(x0 + plot_w) + "\" y2=\"" + std::to_string(y0 + plot_h) + "\" stroke=\"black\"/>\n";
    const std::size_t n = std::max<std::size_t>(bars.size(), 1);
    const int slot = plot_w / static_cast<int>(n);
    for (std::size_t i = 0; i < bars.size(); ++i) {
      const auto& r = *bars[i];
      const int top = scale_y(value(r));
      const char* fill = r.precision == Precision::F32 ? "#4c78a8" : r.precision == Precision::I32 ? "#f58518" : "#54a24b";
      const int x = x0 + static_cast<int>(i) * slot + 4;
      svg += "    <rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(top) + "\" width=\"" +
             std::to_string(std::max(slot - 8, 1)) + "\" height=\"" + std::to_string(y0 + plot_h - top) +
             "\" fill=\"" + fill + "\"><title>" + detail::xml_escape(display_name(r.technique)) + " " +
             std::string(to_string(r.precision)) + " " + panel.key + "=" + text(r) + "</title></rect>\n";
      svg += "    <text x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y0 + plot_h + 12) + "\">" +
             std::string(short_name(r.technique)) + "/" + std::string(to_string(r.precision)) + "</text>\n";
    }
    const int by = scale_y(value(base));
    svg += "    <line x1=\"" + std::to_string(x0) + "\" y1=\"" + std::to_string(by) + "\" x2=\"" +
           std::to_string(x0 + plot_w) + "\" y2=\"" + std::to_string(by) +
           "\" stroke=\"black\" stroke-dasharray=\"4 3\"><title>" + detail::xml_escape(display_name(base.technique)) +
           " " + std::string(to_string(base.precision)) + " " + panel.key + "=" + text(base) + "</title></line>\n";
    svg += "  </g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace quantbench
