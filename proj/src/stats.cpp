#include "tropescope/stats.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tropescope/parallel.hpp"

namespace tropescope::stats {

namespace {

struct CentralSums {
  double s2 = 0, s3 = 0, s4 = 0;
};

StatsSummary from_sorted(std::span<const double> sorted, double mean, const CentralSums& cs) {
  const auto n = sorted.size();
  StatsSummary out;
  out.n = n;
  out.minimum = sorted.front();
  out.maximum = sorted.back();
  out.mean = mean;
  out.median = quantile_sorted(sorted, 0.5);
  out.q1 = quantile_sorted(sorted, 0.25);
  out.q3 = quantile_sorted(sorted, 0.75);
  if (sorted.front() == sorted.back()) {
    out.variance = 0.0;
    return out;  // skewness/kurtosis undefined
  }
  const double m2 = cs.s2 / static_cast<double>(n);
  const double m3 = cs.s3 / static_cast<double>(n);
  const double m4 = cs.s4 / static_cast<double>(n);
  out.variance = m2;
  out.skewness = m3 / (m2 * std::sqrt(m2));
  out.kurtosis = m4 / (m2 * m2) - 3.0;
  return out;
}

}  // namespace

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty input");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile fraction outside [0,1]");
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile(std::span<const double> values, double q) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return quantile_sorted(sorted, q);
}

StatsSummary summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("summarize of empty input");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();

  const double sum = par::chunked_sum(n, [&](std::size_t b, std::size_t e) {
    double s = 0;
    for (std::size_t i = b; i < e; ++i) s += sorted[i];
    return s;
  });
  const double mean = sum / static_cast<double>(n);

  const CentralSums cs = par::chunked_reduce(
      n, CentralSums{},
      [&](std::size_t b, std::size_t e) {
        CentralSums p;
        for (std::size_t i = b; i < e; ++i) {
          const double d = sorted[i] - mean;
          const double d2 = d * d;
          p.s2 += d2;
          p.s3 += d2 * d;
          p.s4 += d2 * d2;
        }
        return p;
      },
      [](CentralSums a, const CentralSums& b) {
        a.s2 += b.s2;
        a.s3 += b.s3;
        a.s4 += b.s4;
        return a;
      });

  return from_sorted(sorted, mean, cs);
}

StatsSummary summarize_serial(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("summarize of empty input");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  double sum = 0;
  for (const double v : sorted) sum += v;
  const double mean = sum / static_cast<double>(sorted.size());

  CentralSums cs;
  for (const double v : sorted) {
    const double d = v - mean;
    const double d2 = d * d;
    cs.s2 += d2;
    cs.s3 += d2 * d;
    cs.s4 += d2 * d2;
  }
  return from_sorted(sorted, mean, cs);
}

std::string to_json(const StatsSummary& s) {
  nlohmann::json j;
  j["n"] = s.n;
  j["minimum"] = s.minimum;
  j["maximum"] = s.maximum;
  j["mean"] = s.mean;
  j["median"] = s.median;
  j["q1"] = s.q1;
  j["q3"] = s.q3;
  j["variance"] = s.variance;
  j["skewness"] = s.skewness ? nlohmann::json(*s.skewness) : nlohmann::json(nullptr);
  j["kurtosis"] = s.kurtosis ? nlohmann::json(*s.kurtosis) : nlohmann::json(nullptr);
  return j.dump(2);
}

}  // namespace tropescope::stats
