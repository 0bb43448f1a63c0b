#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tropescope/dataset.hpp"
#include "tropescope/fitting.hpp"
#include "tropescope/stats.hpp"

namespace tropescope::report {

class ReportError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RankingEntry {
  std::size_t position = 0;  // 1-based, contiguous
  std::string name;
  std::size_t count = 0;

  bool operator==(const RankingEntry&) const = default;
};

// Degrees of a forward or reverse mapping, in key order.
std::vector<double> degree_sequence(const std::map<std::string, std::vector<std::string>>& index);

// The k highest-degree entries; ties break by name ascending. Fewer than k
// entries returns them all. k must be >= 1.
std::vector<RankingEntry> top_k(const std::map<std::string, std::vector<std::string>>& index,
                                std::size_t k);

// 100 * (top - bottom) / top over a non-empty ranking.
double spread_percent(std::span<const RankingEntry> ranking);

// 100 * films containing the trope / n_films. Unknown trope names throw.
double coverage_percent(std::string_view trope, const dataset::ReverseIndex& reverse,
                        std::size_t n_films);

struct HistBin {
  double lower = 0;
  double width = 0;
  std::size_t count = 0;
};

// Integer-aligned bins covering [min, max]; the width is the Freedman-
// Diaconis estimate rounded up to a positive integer unless forced_width > 0.
std::vector<HistBin> histogram(std::span<const double> values, std::size_t forced_width = 0);

struct AxisInputs {
  std::string axis_label;  // e.g. "Tropes per film"
  std::size_t n = 0;       // entities on this axis
  stats::StatsSummary stats;
  std::vector<fitting::FitResult> fits;  // ranked, best first
  std::vector<fitting::SelectionFailure> fit_failures;
  std::vector<RankingEntry> top;
  std::vector<HistBin> hist;
};

struct ReportInputs {
  std::size_t n_films = 0;
  std::size_t n_tropes = 0;
  std::size_t edges = 0;
  AxisInputs film_axis;
  AxisInputs trope_axis;
};

struct ReportBundle {
  std::string markdown;      // report.md
  std::string summary_json;  // summary.json
  std::string film_svg;      // film_axis.svg
  std::string trope_svg;     // trope_axis.svg
};

// Runs stats, fitting, ranking and binning on both axes of a dataset.
ReportInputs analyze(const dataset::FilmTropeDataset& d, std::size_t top,
                     std::span<const fitting::Family> families,
                     const fitting::FitOptions& opts = {});

// Byte-deterministic given identical inputs.
ReportBundle render_report(const ReportInputs& in);

void write_bundle(const ReportBundle& bundle, const std::string& dir);

}  // namespace tropescope::report
