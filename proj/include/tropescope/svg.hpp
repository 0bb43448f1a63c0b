#pragma once

#include <span>
#include <string>

#include "tropescope/fitting.hpp"
#include "tropescope/report.hpp"

namespace tropescope::svg {

// Normalized-density histogram with the fitted pdf overlaid as a polyline.
// Hand-emitted standalone SVG; byte-deterministic for identical inputs.
std::string distribution_figure(std::span<const report::HistBin> bins, std::size_t n,
                                const fitting::FitResult* fit, const std::string& x_label);

}  // namespace tropescope::svg
