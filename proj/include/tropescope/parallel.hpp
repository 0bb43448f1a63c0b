#pragma once

#include <cstddef>
#include <vector>

namespace tropescope::par {

// Work is cut into fixed-size chunks and the per-chunk partials are combined
// in chunk order, so the result does not depend on the number of threads.
inline constexpr std::size_t kChunkSize = 8192;

inline std::size_t chunk_count(std::size_t n) {
  return n == 0 ? 0 : (n + kChunkSize - 1) / kChunkSize;
}

// partial(begin, end) -> T for one chunk; combine(acc, T) folds them in order.
template <class T, class Partial, class Combine>
T chunked_reduce(std::size_t n, T init, Partial&& partial, Combine&& combine) {
  const std::size_t nchunks = chunk_count(n);
  if (nchunks <= 1) {
    return n == 0 ? init : combine(init, partial(std::size_t{0}, n));
  }
  std::vector<T> parts(nchunks);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long c = 0; c < static_cast<long long>(nchunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunkSize;
    const std::size_t end = begin + kChunkSize < n ? begin + kChunkSize : n;
    parts[static_cast<std::size_t>(c)] = partial(begin, end);
  }
  T acc = init;
  for (const T& p : parts) acc = combine(acc, p);
  return acc;
}

template <class Partial>
double chunked_sum(std::size_t n, Partial&& partial) {
  return chunked_reduce(
      n, 0.0, static_cast<Partial&&>(partial),
      [](double a, double b) { return a + b; });
}

}  // namespace tropescope::par
