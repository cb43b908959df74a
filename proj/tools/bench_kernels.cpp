// Times the OpenMP up-step histogram kernel against the serial reference.
//
//   bench_kernels [--N steps] [--paths count] [--reps r] [--threads t]

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "kelly/simulation.hpp"

namespace {

template <typename Fn>
double best_of(int reps, Fn&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  int steps = 200;
  long paths = 200000;
  int reps = 3;
  int threads = omp_get_max_threads();
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    const char* value = argv[i + 1];
    if (flag == "--N") {
      steps = std::atoi(value);
    } else if (flag == "--paths") {
      paths = std::atol(value);
    } else if (flag == "--reps") {
      reps = std::atoi(value);
    } else if (flag == "--threads") {
      threads = std::atoi(value);
    } else {
      std::fprintf(stderr, "unknown flag %s\n", flag.c_str());
      return 2;
    }
  }
  if (steps < 1 || paths < 1 || reps < 1 || threads < 1) {
    std::fprintf(stderr, "N, paths, reps and threads must be positive\n");
    return 2;
  }

  const kelly::WalkSpec walk(steps, kelly::Probability(0.6));
  const std::uint64_t seed = 12345;
  std::vector<std::int64_t> serial;
  std::vector<std::int64_t> parallel;

  const double t_serial = best_of(reps, [&] { serial = kelly::sim::up_step_histogram_serial(walk, paths, seed); });
  std::printf("%-10s %8s %12s %12s %10s\n", "kernel", "threads", "seconds", "Mdraws/s", "speedup");
  const double draws = static_cast<double>(steps) * static_cast<double>(paths) / 1e6;
  std::printf("%-10s %8d %12.4f %12.1f %10.2f\n", "serial", 1, t_serial, draws / t_serial, 1.0);

  for (int t = 1; t <= threads; t *= 2) {
    const double t_par = best_of(reps, [&] { parallel = kelly::sim::up_step_histogram(walk, paths, seed, t); });
    std::printf("%-10s %8d %12.4f %12.1f %10.2f\n", "openmp", t, t_par, draws / t_par, t_serial / t_par);
    if (parallel != serial) {
      std::fprintf(stderr, "histogram mismatch at %d threads\n", t);
      return 1;
    }
  }
  return 0;
}
