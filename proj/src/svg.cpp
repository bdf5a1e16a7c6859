#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "satfed/harness.hpp"

namespace satfed::harness {

namespace {

constexpr double kWidth = 840.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 660.0;  // legend sits to the right of this
constexpr double kTop = 40.0;
constexpr double kBottom = 460.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

std::string svg_curve(const std::vector<std::pair<std::string, fed::TrainingTrace>>& traces) {
  if (traces.empty()) throw std::invalid_argument("svg_curve: at least one trace required");
  for (const auto& [label, trace] : traces) {
    if (trace.records.empty()) {
      throw std::invalid_argument("svg_curve: trace \"" + label + "\" is empty");
    }
  }

  double x_max = 0.0;
  for (const auto& [label, trace] : traces) {
    for (const auto& r : trace.records) x_max = std::max(x_max, r.elapsed_ms);
  }
  const double x_span = std::max(x_max, 1e-9);

  const auto x_at = [&](double ms) { return kLeft + (kRight - kLeft) * (ms / x_span); };
  const auto y_at = [&](double acc) { return kBottom - (kBottom - kTop) * acc; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt_tick(kWidth)
      << "\" height=\"" << fmt_tick(kHeight) << "\" viewBox=\"0 0 " << fmt_tick(kWidth) << " "
      << fmt_tick(kHeight) << "\">\n";
  out << "  <rect x=\"0\" y=\"0\" width=\"" << fmt_tick(kWidth) << "\" height=\""
      << fmt_tick(kHeight) << "\" fill=\"white\"/>\n";

  // axes
  out << "  <line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kBottom) << "\" x2=\"" << fmt(kRight)
      << "\" y2=\"" << fmt(kBottom) << "\" stroke=\"black\"/>\n";
  out << "  <line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(kLeft)
      << "\" y2=\"" << fmt(kBottom) << "\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double frac = i / 5.0;
    const double x = kLeft + (kRight - kLeft) * frac;
    const double y = kBottom - (kBottom - kTop) * frac;
    out << "  <line x1=\"" << fmt(x) << "\" y1=\"" << fmt(kBottom) << "\" x2=\"" << fmt(x)
        << "\" y2=\"" << fmt(kBottom + 6.0) << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << fmt(x) << "\" y=\"" << fmt(kBottom + 22.0)
        << "\" font-size=\"12\" text-anchor=\"middle\">" << fmt_tick(x_span * frac) << "</text>\n";
    out << "  <line x1=\"" << fmt(kLeft - 6.0) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(kLeft)
        << "\" y2=\"" << fmt(y) << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << fmt(kLeft - 10.0) << "\" y=\"" << fmt(y + 4.0)
        << "\" font-size=\"12\" text-anchor=\"end\">" << fmt_tick(frac) << "</text>\n";
  }

  out << "  <text x=\"" << fmt((kLeft + kRight) / 2.0) << "\" y=\"" << fmt(kBottom + 45.0)
      << "\" font-size=\"14\" text-anchor=\"middle\">elapsed_ms</text>\n";
  out << "  <text x=\"18\" y=\"" << fmt((kTop + kBottom) / 2.0)
      << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << fmt((kTop + kBottom) / 2.0) << ")\">accuracy</text>\n";

  for (std::size_t t = 0; t < traces.size(); ++t) {
    const char* color = kPalette[t % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    const auto& records = traces[t].second.records;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (i > 0) out << " ";
      out << fmt(x_at(records[i].elapsed_ms)) << "," << fmt(y_at(records[i].accuracy));
    }
    out << "\"/>\n";

    const double ly = kTop + 18.0 * static_cast<double>(t);
    out << "  <line x1=\"" << fmt(kRight + 14.0) << "\" y1=\"" << fmt(ly) << "\" x2=\""
        << fmt(kRight + 38.0) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>\n";
    out << "  <text x=\"" << fmt(kRight + 44.0) << "\" y=\"" << fmt(ly + 4.0)
        << "\" font-size=\"12\">" << traces[t].first << "</text>\n";
  }

  out << "</svg>\n";
  return out.str();
}

void emit_svg_curve(const std::vector<std::string>& trace_csv_paths,
                    const std::string& out_path) {
  if (trace_csv_paths.empty()) {
    throw std::invalid_argument("emit_svg_curve: at least one trace CSV required");
  }

  std::vector<std::pair<std::string, fed::TrainingTrace>> traces;
  traces.reserve(trace_csv_paths.size());
  for (const std::string& path : trace_csv_paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("emit_svg_curve: cannot open " + path);
    std::ostringstream text;
    text << in.rdbuf();
    fed::TrainingTrace trace = fed::trace_from_csv(text.str());
    if (trace.records.empty()) {
      throw std::invalid_argument("emit_svg_curve: trace " + path + " is empty");
    }
    traces.emplace_back(std::filesystem::path(path).stem().string(), std::move(trace));
  }

  const std::string svg = svg_curve(traces);
  const std::string tmp = out_path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("emit_svg_curve: cannot write " + tmp);
    out << svg;
  }
  std::filesystem::rename(tmp, out_path);
}

}  // namespace satfed::harness
