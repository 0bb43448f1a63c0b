#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tropescope::optim {

struct NelderMeadOptions {
  double relative_diameter_tol = 1e-8;
  std::size_t max_iterations = 10'000;
  double initial_step = 0.25;
};

struct NelderMeadResult {
  std::vector<double> x;
  double fx = 0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Downhill simplex minimization. The objective may return +infinity for
// infeasible points; the starting point must be finite.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0,
                             const NelderMeadOptions& opts = {});

}  // namespace tropescope::optim
