#include "tropescope/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tropescope::optim {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0, const NelderMeadOptions& opts) {
  const std::size_t dim = x0.size();
  const std::size_t nverts = dim + 1;

  std::vector<std::vector<double>> verts(nverts, std::vector<double>(x0.begin(), x0.end()));
  for (std::size_t i = 0; i < dim; ++i) verts[i + 1][i] += opts.initial_step;
  std::vector<double> fv(nverts);
  for (std::size_t v = 0; v < nverts; ++v) fv[v] = f(verts[v]);

  std::vector<std::size_t> order(nverts);
  std::vector<double> centroid(dim), candidate(dim), second(dim);

  auto sort_order = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
  };

  NelderMeadResult result;
  std::size_t iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    sort_order();
    const std::size_t best = order[0];
    const std::size_t worst = order[nverts - 1];
    const std::size_t second_worst = order[nverts - 2];

    double diameter = 0.0;
    double scale = 1.0;
    for (std::size_t i = 0; i < dim; ++i)
      scale = std::max(scale, std::abs(verts[best][i]));
    for (std::size_t v = 0; v < nverts; ++v) {
      for (std::size_t i = 0; i < dim; ++i)
        diameter = std::max(diameter, std::abs(verts[v][i] - verts[best][i]));
    }
    if (diameter <= opts.relative_diameter_tol * scale) {
      result.converged = true;
      break;
    }

    for (std::size_t i = 0; i < dim; ++i) {
      double s = 0;
      for (std::size_t v = 0; v < nverts; ++v)
        if (v != worst) s += verts[v][i];
      centroid[i] = s / static_cast<double>(dim);
    }

    for (std::size_t i = 0; i < dim; ++i)
      candidate[i] = centroid[i] + kReflect * (centroid[i] - verts[worst][i]);
    const double f_reflect = f(candidate);

    if (f_reflect < fv[best]) {
      for (std::size_t i = 0; i < dim; ++i)
        second[i] = centroid[i] + kExpand * (candidate[i] - centroid[i]);
      const double f_expand = f(second);
      if (f_expand < f_reflect) {
        verts[worst] = second;
        fv[worst] = f_expand;
      } else {
        verts[worst] = candidate;
        fv[worst] = f_reflect;
      }
    } else if (f_reflect < fv[second_worst]) {
      verts[worst] = candidate;
      fv[worst] = f_reflect;
    } else {
      const bool outside = f_reflect < fv[worst];
      if (outside) {
        for (std::size_t i = 0; i < dim; ++i)
          second[i] = centroid[i] + kContract * (candidate[i] - centroid[i]);
      } else {
        for (std::size_t i = 0; i < dim; ++i)
          second[i] = centroid[i] + kContract * (verts[worst][i] - centroid[i]);
      }
      const double f_contract = f(second);
      if (f_contract < std::min(f_reflect, fv[worst])) {
        verts[worst] = second;
        fv[worst] = f_contract;
      } else {
        for (std::size_t v = 0; v < nverts; ++v) {
          if (v == best) continue;
          for (std::size_t i = 0; i < dim; ++i)
            verts[v][i] = verts[best][i] + kShrink * (verts[v][i] - verts[best][i]);
          fv[v] = f(verts[v]);
        }
      }
    }
  }

  sort_order();
  result.x = verts[order[0]];
  result.fx = fv[order[0]];
  result.iterations = iter;
  return result;
}

}  // namespace tropescope::optim
