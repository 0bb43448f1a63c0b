#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

namespace tropescope::stats {

// Population moments (divide by n), moment-coefficient skewness g1 and excess
// kurtosis g2. Skewness/kurtosis are absent when variance is zero.
struct StatsSummary {
  std::size_t n = 0;
  double minimum = 0;
  double maximum = 0;
  double mean = 0;
  double median = 0;
  double q1 = 0;
  double q3 = 0;
  double variance = 0;
  std::optional<double> skewness;
  std::optional<double> kurtosis;

  bool operator==(const StatsSummary&) const = default;
};

// Chunk-parallel moment accumulation; deterministic for a fixed input
// regardless of thread count.
StatsSummary summarize(std::span<const double> values);

// Plain-loop reference implementation.
StatsSummary summarize_serial(std::span<const double> values);

// Linear interpolation on the sorted sequence: h = (n-1)q,
// x[floor(h)] + frac(h) * (x[floor(h)+1] - x[floor(h)]).
double quantile(std::span<const double> values, double q);
double quantile_sorted(std::span<const double> sorted, double q);

// JSON object with the exact field names above; skewness/kurtosis are null
// when undefined.
std::string to_json(const StatsSummary& s);

}  // namespace tropescope::stats
