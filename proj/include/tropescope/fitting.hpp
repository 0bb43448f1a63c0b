#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tropescope::fitting {

enum class Family { LogLogistic, FoldedCauchy, LogNormal, Exponential };

std::string_view family_name(Family f);
std::optional<Family> family_from_name(std::string_view name);
// Free parameters entering the AIC penalty: 3 for the three-parameter
// families, 2 for the exponential (no shape).
int family_free_params(Family f);

inline constexpr Family kAllFamilies[] = {Family::LogLogistic, Family::FoldedCauchy,
                                          Family::LogNormal, Family::Exponential};

struct FitParams {
  double location = 0;
  double shape = 1;  // > 0 (unused by the exponential)
  double scale = 1;  // > 0
};

class FitError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Densities are zero outside the support; no exceptions.
double loglogistic_pdf(double x, const FitParams& p);
double loglogistic_cdf(double x, const FitParams& p);
double foldcauchy_pdf(double x, const FitParams& p);
double foldcauchy_cdf(double x, const FitParams& p);
double lognormal_pdf(double x, const FitParams& p);
double lognormal_cdf(double x, const FitParams& p);
double exponential_pdf(double x, const FitParams& p);
double exponential_cdf(double x, const FitParams& p);

double pdf(Family f, double x, const FitParams& p);
double cdf(Family f, double x, const FitParams& p);
double log_pdf(Family f, double x, const FitParams& p);

// Inverse CDF; closed-form where available, bisection otherwise.
double quantile(Family f, double p, const FitParams& params);

// -sum(log density). A data point with zero density yields +infinity.
// Chunk-parallel with order-fixed combination; deterministic across thread
// counts. _serial is the reference loop.
double neg_log_likelihood(Family f, const FitParams& p, std::span<const double> data);
double neg_log_likelihood_serial(Family f, const FitParams& p, std::span<const double> data);

// D = max_i max(|F(x_i) - (i-1)/n|, |F(x_i) - i/n|) over the sorted sample.
double ks_statistic(Family f, const FitParams& p, std::span<const double> data);
double ks_statistic_serial(Family f, const FitParams& p, std::span<const double> data);

struct FitResult {
  Family family = Family::LogLogistic;
  FitParams params;
  double nll = 0;
  double ks = 0;
  double aic = 0;
  bool converged = false;
  std::size_t iterations = 0;
};

struct FitOptions {
  std::size_t max_iterations = 10'000;
  double relative_diameter_tol = 1e-8;
};

// Nelder-Mead on transformed parameters: log shape and log scale enforce
// positivity, location = min(data) - exp(t) keeps the support valid.
// Refuses fewer than 10 points and degenerate (all-equal) data.
FitResult fit_mle(Family f, std::span<const double> data,
                  std::optional<FitParams> init = std::nullopt, const FitOptions& opts = {});

struct SelectionFailure {
  Family family = Family::LogLogistic;
  std::string reason;
};

struct SelectionResult {
  std::vector<FitResult> ranked;  // ascending KS, AIC tie-break; best first
  std::vector<SelectionFailure> failures;
};

SelectionResult select_best(std::span<const Family> families, std::span<const double> data,
                            const FitOptions& opts = {});

// Inverse-CDF sampling (|Cauchy| construction for the folded Cauchy,
// Box-Muller for the lognormal). Deterministic for a given seed.
std::vector<double> sample(Family f, const FitParams& p, std::size_t n, std::uint64_t seed);

// JSON object with fields family, location, shape, scale, nll, ks, aic,
// converged.
std::string to_json(const FitResult& r);

}  // namespace tropescope::fitting
