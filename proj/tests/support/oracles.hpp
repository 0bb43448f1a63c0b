#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

namespace testsupport {

// Deliberately plain sort-and-sum reimplementation, kept independent of the
// library code it checks.
struct OracleStats {
  std::size_t n = 0;
  double minimum = 0, maximum = 0, mean = 0, median = 0, q1 = 0, q3 = 0, variance = 0;
  std::optional<double> skewness, kurtosis;
};

inline double oracle_quantile(const std::vector<double>& sorted, double q) {
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - std::floor(h)) * (sorted[lo + 1] - sorted[lo]);
}

inline OracleStats oracle_summarize(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  OracleStats o;
  o.n = v.size();
  o.minimum = v.front();
  o.maximum = v.back();
  double sum = 0;
  for (double x : v) sum += x;
  o.mean = sum / static_cast<double>(v.size());
  o.median = oracle_quantile(v, 0.5);
  o.q1 = oracle_quantile(v, 0.25);
  o.q3 = oracle_quantile(v, 0.75);
  if (v.front() == v.back()) {
    o.variance = 0;
    return o;
  }
  double s2 = 0, s3 = 0, s4 = 0;
  for (double x : v) {
    s2 += std::pow(x - o.mean, 2);
    s3 += std::pow(x - o.mean, 3);
    s4 += std::pow(x - o.mean, 4);
  }
  const double n = static_cast<double>(v.size());
  const double m2 = s2 / n;
  o.variance = m2;
  o.skewness = (s3 / n) / std::pow(m2, 1.5);
  o.kurtosis = (s4 / n) / (m2 * m2) - 3.0;
  return o;
}

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-8, int depth = 40) {
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

}  // namespace testsupport
