#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "rgfdgd/harness.hpp"

namespace rgfdgd {
namespace {

struct Series {
  std::string label;
  std::vector<double> k;
  std::vector<double> value;
};

constexpr double kPanelWidth = 520.0;
constexpr double kPanelHeight = 340.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

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

// One log-y panel at horizontal offset x0. Nonpositive values are skipped.
std::string panel(double x0, const std::string& title, const std::vector<Series>& series) {
  double kmin = std::numeric_limits<double>::infinity(), kmax = -kmin;
  double vmin = kmin, vmax = -kmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.k.size(); ++i) {
      kmin = std::min(kmin, s.k[i]);
      kmax = std::max(kmax, s.k[i]);
      if (s.value[i] > 0.0 && std::isfinite(s.value[i])) {
        vmin = std::min(vmin, s.value[i]);
        vmax = std::max(vmax, s.value[i]);
      }
    }
  }
  if (!std::isfinite(vmin)) {
    vmin = 1e-16;
    vmax = 1.0;
  }
  double lo = std::floor(std::log10(vmin));
  double hi = std::ceil(std::log10(vmax));
  if (hi <= lo) hi = lo + 1;
  if (!(kmax > kmin)) kmax = kmin + 1;

  const double w = kPanelWidth - kMarginLeft - kMarginRight;
  const double h = kPanelHeight - kMarginTop - kMarginBottom;
  auto px = [&](double k) { return x0 + kMarginLeft + (k - kmin) / (kmax - kmin) * w; };
  auto py = [&](double v) { return kMarginTop + (hi - std::log10(v)) / (hi - lo) * h; };

  std::string s;
  s += fmt::format(
      "<text x=\"{:.1f}\" y=\"22\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
      x0 + kMarginLeft + w / 2, escape(title));
  s += fmt::format(
      "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" "
      "stroke=\"#333\"/>\n",
      x0 + kMarginLeft, kMarginTop, w, h);
  const int step = std::max(1, static_cast<int>((hi - lo) / 8) + 1);
  for (int e = static_cast<int>(lo); e <= static_cast<int>(hi); e += step) {
    const double y = py(std::pow(10.0, e));
    s += fmt::format(
        "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#ddd\"/>\n",
        x0 + kMarginLeft, y, x0 + kMarginLeft + w, y);
    s += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\" text-anchor=\"end\">1e{}</text>\n",
        x0 + kMarginLeft - 6, y + 4, e);
  }
  for (int t = 0; t <= 4; ++t) {
    const double k = kmin + (kmax - kmin) * t / 4.0;
    s += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\" text-anchor=\"middle\">{:.6g}</text>\n",
        px(k), kMarginTop + h + 16, k);
  }
  s += fmt::format(
      "<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"12\" text-anchor=\"middle\">iteration k</text>\n",
      x0 + kMarginLeft + w / 2, kMarginTop + h + 38);

  for (std::size_t c = 0; c < series.size(); ++c) {
    const auto& ser = series[c];
    const char* color = kColors[c % std::size(kColors)];
    std::string points;
    for (std::size_t i = 0; i < ser.k.size(); ++i) {
      if (!(ser.value[i] > 0.0) || !std::isfinite(ser.value[i])) continue;
      points += fmt::format("{:.2f},{:.2f} ", px(ser.k[i]), py(ser.value[i]));
    }
    s += fmt::format(
        "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color,
        points);
    if (!ser.label.empty()) {
      const double ly = kMarginTop + 14 + 16 * static_cast<double>(c);
      const double lx = x0 + kMarginLeft + w - 130;
      s += fmt::format(
          "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" "
          "stroke-width=\"2\"/>\n",
          lx, ly - 4, lx + 20, ly - 4, color);
      s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\">{}</text>\n", lx + 26,
                       ly, escape(ser.label));
    }
  }
  return s;
}

std::string document(const std::vector<std::pair<std::string, std::vector<Series>>>& panels) {
  const double width = kPanelWidth * static_cast<double>(panels.size());
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      width, kPanelHeight);
  for (std::size_t i = 0; i < panels.size(); ++i) {
    s += panel(kPanelWidth * static_cast<double>(i), panels[i].first, panels[i].second);
  }
  return s + "</svg>\n";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string render_trace_svg(const RunTrace& trace, const std::string& title) {
  if (trace.records.empty()) throw InvalidArgument("trace has no records");
  Series cons{"", {}, {}}, opt{"", {}, {}};
  for (const auto& r : trace.records) {
    cons.k.push_back(static_cast<double>(r.k));
    cons.value.push_back(r.consensus_error);
    if (r.optimality_error) {
      opt.k.push_back(static_cast<double>(r.k));
      opt.value.push_back(std::abs(*r.optimality_error));
    }
  }
  std::vector<std::pair<std::string, std::vector<Series>>> panels;
  panels.push_back({title + ": consensus error", {cons}});
  if (trace.has_optimality) panels.push_back({title + ": optimality error", {opt}});
  return document(panels);
}

std::string render_summary_svg(const std::filesystem::path& summary_path) {
  std::ifstream in(summary_path);
  if (!in) throw InvalidArgument("cannot read summary");
  std::string line;
  std::getline(in, line);
  const auto header = split_csv_line(line);
  if (header.size() != 7 || header[0] != "axis" || header[6] != "trace") {
    throw InvalidArgument("summary header must be axis,value,seed,status,...,trace");
  }
  // value label -> traces, in first-seen order
  std::vector<std::string> order;
  std::map<std::string, std::vector<RunTrace>> groups;
  std::string axis;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != 7) {
      throw InvalidArgument(fmt::format("summary row {} has {} fields", rows + 1, cells.size()));
    }
    ++rows;
    axis = cells[0];
    if (!groups.count(cells[1])) {
      order.push_back(cells[1]);
      groups[cells[1]];
    }
    if (cells[3] != "ok" || cells[6].empty()) continue;
    std::ifstream tin(summary_path.parent_path() / cells[6]);
    if (!tin) throw InvalidArgument(fmt::format("missing trace {}", cells[6]));
    groups[cells[1]].push_back(read_trace_csv(tin));
  }
  if (rows == 0) throw InvalidArgument("summary has no rows");

  std::vector<Series> cons, opt;
  bool any_opt = false;
  for (const auto& value : order) {
    const auto& traces = groups[value];
    if (traces.empty()) continue;
    std::size_t len = traces.front().records.size();
    for (const auto& t : traces) len = std::min(len, t.records.size());
    Series c{fmt::format("{} = {}", axis, value), {}, {}};
    Series o = c;
    for (std::size_t i = 0; i < len; ++i) {
      double cs = 0.0, os = 0.0;
      bool has_o = true;
      for (const auto& t : traces) {
        cs += t.records[i].consensus_error;
        if (t.records[i].optimality_error) {
          os += std::abs(*t.records[i].optimality_error);
        } else {
          has_o = false;
        }
      }
      const double k = static_cast<double>(traces.front().records[i].k);
      c.k.push_back(k);
      c.value.push_back(cs / static_cast<double>(traces.size()));
      if (has_o) {
        o.k.push_back(k);
        o.value.push_back(os / static_cast<double>(traces.size()));
      }
    }
    any_opt = any_opt || !o.k.empty();
    cons.push_back(std::move(c));
    opt.push_back(std::move(o));
  }
  if (cons.empty()) throw InvalidArgument("no successful cells to plot");
  std::vector<std::pair<std::string, std::vector<Series>>> panels;
  panels.push_back({"mean consensus error", cons});
  if (any_opt) panels.push_back({"mean optimality error", opt});
  return document(panels);
}

}  // namespace rgfdgd
