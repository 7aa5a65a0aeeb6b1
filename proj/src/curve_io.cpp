#include "nspbound/curve_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "nspbound/errors.hpp"

namespace nspbound::io {

namespace {

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
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

[[noreturn]] void parse_fail(int line, const std::string& msg) {
  throw IoError("curve csv line " + std::to_string(line) + ": " + msg);
}

double parse_field(std::string_view text, int line) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    parse_fail(line, "not a decimal number: '" + std::string(text) + "'");
  }
  return v;
}

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 20.0;
constexpr double kMarginBottom = 50.0;
constexpr double kDeltaLo = 0.35;
constexpr double kDeltaHi = 1.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string format_decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_curve_csv(std::ostream& out, std::span<const phase::PhasePoint> points) {
  out << "delta,rho\n";
  for (const auto& pt : points) out << format_decimal(pt.delta) << ',' << format_decimal(pt.rho) << '\n';
}

std::string curve_csv(std::span<const phase::PhasePoint> points) {
  std::ostringstream os;
  write_curve_csv(os, points);
  return os.str();
}

std::vector<phase::PhasePoint> read_curve_csv(std::istream& in) {
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) parse_fail(1, "missing header");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "delta,rho") parse_fail(lineno, "expected header 'delta,rho'");

  std::vector<phase::PhasePoint> points;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      parse_fail(lineno, "expected two comma-separated fields");
    }
    const std::string_view view(line);
    const double delta = parse_field(view.substr(0, comma), lineno);
    const double rho = parse_field(view.substr(comma + 1), lineno);
    if (!(delta > 0.0 && delta < 1.0)) parse_fail(lineno, "delta out of range (0,1)");
    if (!(rho > 0.0 && rho < 1.0)) parse_fail(lineno, "rho out of range (0,1)");
    if (!points.empty() && !(delta > points.back().delta)) {
      parse_fail(lineno, "delta values must be strictly increasing");
    }
    points.push_back({delta, rho});
  }
  return points;
}

std::vector<phase::PhasePoint> read_curve_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return read_curve_csv(in);
}

void write_curve_csv_file(const std::string& path, std::span<const phase::PhasePoint> points) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_curve_csv(out, points);
  if (!out) throw IoError("write failed for '" + path + "'");
}

void write_ratio_csv(std::ostream& out, std::span<const phase::RatioPoint> ratios) {
  out << "delta,ratio\n";
  for (const auto& r : ratios) out << format_decimal(r.delta) << ',' << format_decimal(r.ratio) << '\n';
}

void write_svg(std::ostream& out, std::span<const SvgSeries> series) {
  double rho_max = 0.0;
  for (const auto& s : series) {
    for (const auto& pt : s.points) rho_max = std::max(rho_max, pt.rho);
  }
  rho_max = rho_max > 0.0 ? rho_max * 1.1 : 1.0;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto x_of = [&](double d) { return kMarginLeft + (d - kDeltaLo) / (kDeltaHi - kDeltaLo) * plot_w; };
  auto y_of = [&](double r) { return kMarginTop + plot_h - r / rho_max * plot_h; };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"600\" "
         "viewBox=\"0 0 800 600\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  const double x0 = kMarginLeft;
  const double y0 = kMarginTop + plot_h;
  out << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
  out << "<line x1=\"" << fixed(x0, 2) << "\" y1=\"" << fixed(y0, 2) << "\" x2=\"" << fixed(x0 + plot_w, 2)
      << "\" y2=\"" << fixed(y0, 2) << "\"/>\n";
  out << "<line x1=\"" << fixed(x0, 2) << "\" y1=\"" << fixed(kMarginTop, 2) << "\" x2=\"" << fixed(x0, 2)
      << "\" y2=\"" << fixed(y0, 2) << "\"/>\n";
  out << "</g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">\n";
  for (int i = 0; i <= 13; ++i) {
    const double d = kDeltaLo + 0.05 * i;
    if (d > kDeltaHi + 1e-9) break;
    const double x = x_of(d);
    out << "<line x1=\"" << fixed(x, 2) << "\" y1=\"" << fixed(y0, 2) << "\" x2=\"" << fixed(x, 2)
        << "\" y2=\"" << fixed(y0 + 5, 2) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fixed(x, 2) << "\" y=\"" << fixed(y0 + 20, 2) << "\" text-anchor=\"middle\">"
        << fixed(d, 2) << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double r = rho_max * i / 5.0;
    const double y = y_of(r);
    out << "<line x1=\"" << fixed(x0 - 5, 2) << "\" y1=\"" << fixed(y, 2) << "\" x2=\"" << fixed(x0, 2)
        << "\" y2=\"" << fixed(y, 2) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fixed(x0 - 8, 2) << "\" y=\"" << fixed(y + 4, 2) << "\" text-anchor=\"end\">"
        << format_decimal(std::round(r * 1e4) / 1e4) << "</text>\n";
  }
  out << "<text x=\"" << fixed(x0 + plot_w / 2, 2) << "\" y=\"" << fixed(kHeight - 10, 2)
      << "\" text-anchor=\"middle\">delta</text>\n";
  out << "<text x=\"15\" y=\"" << fixed(kMarginTop + plot_h / 2, 2) << "\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 15 " << fixed(kMarginTop + plot_h / 2, 2) << ")\">rho</text>\n";
  out << "</g>\n";

  std::size_t idx = 0;
  for (const auto& s : series) {
    const char* color = kPalette[idx % (sizeof kPalette / sizeof kPalette[0])];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (const auto& pt : s.points) {
      if (!first) out << ' ';
      first = false;
      out << fixed(x_of(pt.delta), 2) << ',' << fixed(y_of(pt.rho), 2);
    }
    out << "\"><title>" << xml_escape(s.label) << "</title></polyline>\n";
    ++idx;
  }
  out << "</svg>\n";
}

}  // namespace nspbound::io
