#pragma once

// CurveCsv: header "delta,rho", then one "delta,rho" row per point with '.'
// as decimal separator and a terminating newline. Values are written with
// 12 significant digits, so parse(emit(x)) re-emits byte-identically.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nspbound/phase.hpp"

namespace nspbound::io {

/// %.12g formatting.
std::string format_decimal(double v);

void write_curve_csv(std::ostream& out, std::span<const phase::PhasePoint> points);
std::string curve_csv(std::span<const phase::PhasePoint> points);

/// Throws IoError with a 1-based line number on malformed, unsorted or
/// out-of-range rows.
std::vector<phase::PhasePoint> read_curve_csv(std::istream& in);
std::vector<phase::PhasePoint> read_curve_csv_file(const std::string& path);
void write_curve_csv_file(const std::string& path, std::span<const phase::PhasePoint> points);

void write_ratio_csv(std::ostream& out, std::span<const phase::RatioPoint> ratios);

struct SvgSeries {
  std::string label;
  std::span<const phase::PhasePoint> points;
};

/// 800x600 SVG 1.1, delta axis fixed to [0.35, 1], rho axis autoscaled.
void write_svg(std::ostream& out, std::span<const SvgSeries> series);

}  // namespace nspbound::io
