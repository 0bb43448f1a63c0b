// Compares the serial reference paths against the OpenMP kernels on
// synthetic workloads: N-Triples parsing, likelihood sums, moment sums and
// the KS scan.

#include <chrono>
#include <functional>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tropescope/fitting.hpp"
#include "tropescope/ntriples.hpp"
#include "tropescope/parallel.hpp"
#include "tropescope/stats.hpp"

namespace nt = tropescope::ntriples;
namespace fitting = tropescope::fitting;
namespace stats = tropescope::stats;

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& body, int reps) {
  body();  // warm-up
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    body();
    const auto t1 = Clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void print_row(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-24s %10.2f ms %10.2f ms %8.2fx\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms);
}

std::string synthetic_dump(std::size_t lines) {
  std::mt19937_64 rng(7);
  std::string out;
  out.reserve(lines * 96);
  for (std::size_t i = 0; i < lines; ++i) {
    const auto film = rng() % 4000;
    const auto trope = rng() % 15000;
    out += "<http://dbtropes.org/resource/Film/F" + std::to_string(film) +
           "> <http://skipforward.net/skipforward/resource/seeder/skipinions/hasFeature> "
           "<http://dbtropes.org/resource/Main/T" +
           std::to_string(trope) + "> .\n";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t scale = 1;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--large") scale = 4;
  }

#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled; both columns run the same code path\n");
#endif
  std::printf("%-24s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

  {
    const auto dump = synthetic_dump(scale * 400'000);
    std::size_t sink_count = 0;
    const double serial = time_ms(
        [&] {
          nt::MemorySource src(dump);
          nt::TripleStream stream(src, nt::ParsePolicy::Lenient);
          sink_count = 0;
          while (auto t = stream.next()) sink_count += t->predicate.size();
        },
        3);
    const double parallel = time_ms(
        [&] {
          nt::MemorySource src(dump);
          sink_count = 0;
          nt::parse_blocks(src, nt::ParsePolicy::Lenient,
                           [&](std::span<const nt::Triple> batch) {
                             for (const auto& t : batch) sink_count += t.predicate.size();
                           });
        },
        3);
    print_row("ntriples parse", serial, parallel);
  }

  {
    fitting::FitParams p{0.0, 2.0, 30.0};
    const auto data = fitting::sample(fitting::Family::LogLogistic, p, scale * 2'000'000, 11);
    volatile double keep = 0;
    const double serial = time_ms(
        [&] { keep = fitting::neg_log_likelihood_serial(fitting::Family::LogLogistic, p, data); },
        5);
    const double parallel = time_ms(
        [&] { keep = fitting::neg_log_likelihood(fitting::Family::LogLogistic, p, data); }, 5);
    (void)keep;
    print_row("neg_log_likelihood", serial, parallel);
  }

  {
    fitting::FitParams p{0.0, 1.0, 4.0};
    const auto data = fitting::sample(fitting::Family::FoldedCauchy, p, scale * 2'000'000, 13);
    volatile double keep = 0;
    const double serial =
        time_ms([&] { keep = stats::summarize_serial(data).variance; }, 5);
    const double parallel = time_ms([&] { keep = stats::summarize(data).variance; }, 5);
    (void)keep;
    print_row("summarize", serial, parallel);
  }

  {
    fitting::FitParams p{0.0, 1.0, 4.0};
    const auto data = fitting::sample(fitting::Family::FoldedCauchy, p, scale * 2'000'000, 17);
    volatile double keep = 0;
    const double serial = time_ms(
        [&] { keep = fitting::ks_statistic_serial(fitting::Family::FoldedCauchy, p, data); }, 5);
    const double parallel = time_ms(
        [&] { keep = fitting::ks_statistic(fitting::Family::FoldedCauchy, p, data); }, 5);
    (void)keep;
    print_row("ks_statistic", serial, parallel);
  }

  return 0;
}
