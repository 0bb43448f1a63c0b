#include "tropescope/fitting.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "tropescope/nelder_mead.hpp"
#include "tropescope/parallel.hpp"
#include "tropescope/stats.hpp"

namespace tropescope::fitting {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

// log(1 + e^t) without overflow.
double softplus(double t) {
  if (t > 0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

double loglogistic_logpdf(double x, const FitParams& p) {
  if (!(x > p.location)) return -kInf;
  const double z = (x - p.location) / p.scale;
  const double logz = std::log(z);
  return std::log(p.shape / p.scale) + (p.shape - 1.0) * logz - 2.0 * softplus(p.shape * logz);
}

double foldcauchy_logpdf(double x, const FitParams& p) {
  if (x < p.location) return -kInf;
  const double y = (x - p.location) / p.scale;
  const double a = y - p.shape;
  const double b = y + p.shape;
  const double dens = (1.0 / (1.0 + a * a) + 1.0 / (1.0 + b * b)) / (kPi * p.scale);
  return std::log(dens);
}

double lognormal_logpdf(double x, const FitParams& p) {
  if (!(x > p.location)) return -kInf;
  const double y = (x - p.location) / p.scale;
  const double logy = std::log(y);
  return -logy - std::log(p.shape * p.scale) - 0.5 * std::log(2.0 * kPi) -
         logy * logy / (2.0 * p.shape * p.shape);
}

double exponential_logpdf(double x, const FitParams& p) {
  if (x < p.location) return -kInf;
  return -std::log(p.scale) - (x - p.location) / p.scale;
}

double dispatch_logpdf(Family f, double x, const FitParams& p) {
  switch (f) {
    case Family::LogLogistic: return loglogistic_logpdf(x, p);
    case Family::FoldedCauchy: return foldcauchy_logpdf(x, p);
    case Family::LogNormal: return lognormal_logpdf(x, p);
    case Family::Exponential: return exponential_logpdf(x, p);
  }
  return -kInf;
}

struct Transform {
  // Encodes (location, shape, scale) as unconstrained coordinates. The
  // exponential drops the shape coordinate.
  double data_min = 0;
  bool has_shape = true;

  std::size_t dim() const { return has_shape ? 3 : 2; }

  std::vector<double> encode(const FitParams& p) const {
    const double gap = std::max(data_min - p.location, 1e-12 * std::max(1.0, std::abs(data_min)));
    std::vector<double> x{std::log(gap)};
    if (has_shape) x.push_back(std::log(p.shape));
    x.push_back(std::log(p.scale));
    return x;
  }

  FitParams decode(std::span<const double> x) const {
    FitParams p;
    p.location = data_min - std::exp(x[0]);
    p.shape = has_shape ? std::exp(x[1]) : 1.0;
    p.scale = std::exp(x[has_shape ? 2 : 1]);
    return p;
  }
};

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::LogLogistic: return "loglogistic";
    case Family::FoldedCauchy: return "foldcauchy";
    case Family::LogNormal: return "lognormal";
    case Family::Exponential: return "exponential";
  }
  return "unknown";
}

std::optional<Family> family_from_name(std::string_view name) {
  for (const Family f : kAllFamilies)
    if (family_name(f) == name) return f;
  return std::nullopt;
}

int family_free_params(Family f) {
  return f == Family::Exponential ? 2 : 3;
}

double loglogistic_pdf(double x, const FitParams& p) {
  const double lp = loglogistic_logpdf(x, p);
  return lp == -kInf ? 0.0 : std::exp(lp);
}

double loglogistic_cdf(double x, const FitParams& p) {
  if (!(x > p.location)) return 0.0;
  const double z = (x - p.location) / p.scale;
  // 1 / (1 + z^-c) computed as a logistic in log space.
  return 1.0 / (1.0 + std::exp(-p.shape * std::log(z)));
}

double foldcauchy_pdf(double x, const FitParams& p) {
  if (x < p.location) return 0.0;
  const double y = (x - p.location) / p.scale;
  const double a = y - p.shape;
  const double b = y + p.shape;
  return (1.0 / (1.0 + a * a) + 1.0 / (1.0 + b * b)) / (kPi * p.scale);
}

double foldcauchy_cdf(double x, const FitParams& p) {
  if (x < p.location) return 0.0;
  const double y = (x - p.location) / p.scale;
  return (std::atan(y - p.shape) + std::atan(y + p.shape)) / kPi;
}

double lognormal_pdf(double x, const FitParams& p) {
  const double lp = lognormal_logpdf(x, p);
  return lp == -kInf ? 0.0 : std::exp(lp);
}

double lognormal_cdf(double x, const FitParams& p) {
  if (!(x > p.location)) return 0.0;
  const double y = (x - p.location) / p.scale;
  return 0.5 * std::erfc(-std::log(y) / (p.shape * std::numbers::sqrt2));
}

double exponential_pdf(double x, const FitParams& p) {
  if (x < p.location) return 0.0;
  return std::exp(-(x - p.location) / p.scale) / p.scale;
}

double exponential_cdf(double x, const FitParams& p) {
  if (x < p.location) return 0.0;
  return -std::expm1(-(x - p.location) / p.scale);
}

double pdf(Family f, double x, const FitParams& p) {
  switch (f) {
    case Family::LogLogistic: return loglogistic_pdf(x, p);
    case Family::FoldedCauchy: return foldcauchy_pdf(x, p);
    case Family::LogNormal: return lognormal_pdf(x, p);
    case Family::Exponential: return exponential_pdf(x, p);
  }
  return 0.0;
}

double cdf(Family f, double x, const FitParams& p) {
  switch (f) {
    case Family::LogLogistic: return loglogistic_cdf(x, p);
    case Family::FoldedCauchy: return foldcauchy_cdf(x, p);
    case Family::LogNormal: return lognormal_cdf(x, p);
    case Family::Exponential: return exponential_cdf(x, p);
  }
  return 0.0;
}

double log_pdf(Family f, double x, const FitParams& p) { return dispatch_logpdf(f, x, p); }

double quantile(Family f, double prob, const FitParams& params) {
  if (!(prob >= 0.0 && prob <= 1.0)) throw FitError("quantile fraction outside [0,1]");
  switch (f) {
    case Family::LogLogistic: {
      if (prob == 0.0) return params.location;
      if (prob == 1.0) return kInf;
      return params.location + params.scale * std::pow(prob / (1.0 - prob), 1.0 / params.shape);
    }
    case Family::Exponential: {
      if (prob == 1.0) return kInf;
      return params.location - params.scale * std::log1p(-prob);
    }
    default: {
      if (prob == 0.0) return params.location;
      if (prob == 1.0) return kInf;
      double lo = params.location;
      double hi = params.location + params.scale;
      while (cdf(f, hi, params) < prob) {
        lo = hi;
        hi = params.location + 2.0 * (hi - params.location);
        if (!std::isfinite(hi)) throw FitError("quantile bracket diverged");
      }
      for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (cdf(f, mid, params) < prob ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
}

double neg_log_likelihood(Family f, const FitParams& p, std::span<const double> data) {
  if (data.empty()) throw FitError("neg_log_likelihood of empty data");
  const double sum = par::chunked_sum(data.size(), [&](std::size_t b, std::size_t e) {
    double s = 0;
    for (std::size_t i = b; i < e; ++i) s += dispatch_logpdf(f, data[i], p);
    return s;
  });
  return -sum;
}

double neg_log_likelihood_serial(Family f, const FitParams& p, std::span<const double> data) {
  if (data.empty()) throw FitError("neg_log_likelihood of empty data");
  double s = 0;
  for (const double x : data) s += dispatch_logpdf(f, x, p);
  return -s;
}

namespace {

double ks_from_sorted(Family f, const FitParams& p, std::span<const double> sorted) {
  const auto n = sorted.size();
  const double dn = static_cast<double>(n);
  double d = 0.0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : d)
#endif
  for (long long k = 0; k < static_cast<long long>(n); ++k) {
    const auto i = static_cast<std::size_t>(k);
    const double fx = cdf(f, sorted[i], p);
    const double lo = std::abs(fx - static_cast<double>(i) / dn);
    const double hi = std::abs(fx - static_cast<double>(i + 1) / dn);
    d = std::max(d, std::max(lo, hi));
  }
  return d;
}

}  // namespace

double ks_statistic(Family f, const FitParams& p, std::span<const double> data) {
  if (data.empty()) throw FitError("ks_statistic of empty data");
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  return ks_from_sorted(f, p, sorted);
}

double ks_statistic_serial(Family f, const FitParams& p, std::span<const double> data) {
  if (data.empty()) throw FitError("ks_statistic of empty data");
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const double dn = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double fx = cdf(f, sorted[i], p);
    d = std::max(d, std::abs(fx - static_cast<double>(i) / dn));
    d = std::max(d, std::abs(fx - static_cast<double>(i + 1) / dn));
  }
  return d;
}

FitResult fit_mle(Family f, std::span<const double> data, std::optional<FitParams> init,
                  const FitOptions& opts) {
  if (data.size() < 10) throw FitError("fit_mle needs at least 10 data points");
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  const double xmin = sorted.front();
  const double xmax = sorted.back();
  if (xmin == xmax) throw FitError("fit_mle on degenerate (all-equal) data");
  const double median = stats::quantile_sorted(sorted, 0.5);

  FitParams start;
  if (init) {
    start = *init;
    if (!(start.shape > 0) || !(start.scale > 0))
      throw FitError("initial shape and scale must be positive");
  } else {
    // The log-logistic median is location + scale, so anchoring on the
    // sample median gives a usable start for every family.
    double spread = median - xmin;
    if (spread <= 0) spread = std::max((xmax - xmin) / static_cast<double>(data.size()), 1e-3);
    start.location = xmin - 0.5 * spread;
    start.scale = median - start.location;
    start.shape = 1.0;
  }

  const Transform tf{xmin, f != Family::Exponential};
  auto objective = [&](std::span<const double> x) {
    const FitParams p = tf.decode(x);
    const double nll = neg_log_likelihood(f, p, data);
    return std::isfinite(nll) ? nll : kInf;
  };

  optim::NelderMeadOptions nm;
  nm.max_iterations = opts.max_iterations;
  nm.relative_diameter_tol = opts.relative_diameter_tol;
  auto run = optim::nelder_mead(objective, tf.encode(start), nm);
  // One restart from the found point tightens the optimum cheaply.
  nm.initial_step = 0.05;
  auto rerun = optim::nelder_mead(objective, run.x, nm);
  rerun.iterations += run.iterations;
  if (rerun.fx > run.fx) {
    rerun.x = run.x;
    rerun.fx = run.fx;
  }

  FitResult out;
  out.family = f;
  out.params = tf.decode(rerun.x);
  out.nll = neg_log_likelihood(f, out.params, data);
  out.ks = ks_from_sorted(f, out.params, sorted);
  out.aic = 2.0 * family_free_params(f) + 2.0 * out.nll;
  out.converged = rerun.converged;
  out.iterations = rerun.iterations;
  return out;
}

SelectionResult select_best(std::span<const Family> families, std::span<const double> data,
                            const FitOptions& opts) {
  if (families.empty()) throw FitError("select_best needs at least one family");
  SelectionResult out;
  for (const Family f : families) {
    try {
      out.ranked.push_back(fit_mle(f, data, std::nullopt, opts));
    } catch (const FitError& e) {
      out.failures.push_back({f, e.what()});
    }
  }
  std::stable_sort(out.ranked.begin(), out.ranked.end(), [](const FitResult& a, const FitResult& b) {
    if (a.ks != b.ks) return a.ks < b.ks;
    return a.aic < b.aic;
  });
  return out;
}

std::vector<double> sample(Family f, const FitParams& p, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // 53-bit mantissa draw in (0,1); avoids the support endpoints and is
  // identical across standard library implementations.
  auto uniform = [&rng] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };

  std::vector<double> out(n);
  switch (f) {
    case Family::LogLogistic:
      for (auto& x : out) {
        const double u = uniform();
        x = p.location + p.scale * std::pow(u / (1.0 - u), 1.0 / p.shape);
      }
      break;
    case Family::FoldedCauchy:
      for (auto& x : out) {
        const double u = uniform();
        x = p.location + p.scale * std::abs(p.shape + std::tan(kPi * (u - 0.5)));
      }
      break;
    case Family::LogNormal:
      for (auto& x : out) {
        const double u1 = uniform();
        const double u2 = uniform();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
        x = p.location + p.scale * std::exp(p.shape * z);
      }
      break;
    case Family::Exponential:
      for (auto& x : out) x = p.location - p.scale * std::log1p(-uniform());
      break;
  }
  return out;
}

std::string to_json(const FitResult& r) {
  nlohmann::json j;
  j["family"] = std::string(family_name(r.family));
  j["location"] = r.params.location;
  j["shape"] = r.params.shape;
  j["scale"] = r.params.scale;
  j["nll"] = r.nll;
  j["ks"] = r.ks;
  j["aic"] = r.aic;
  j["converged"] = r.converged;
  return j.dump(2);
}

}  // namespace tropescope::fitting
