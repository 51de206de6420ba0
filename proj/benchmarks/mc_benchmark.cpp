// Compares the OpenMP Monte Carlo kernel against the serial reference and
// reports throughput for both, verifying that the reports agree exactly.

#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "eggsynth/stats.hpp"

int main(int argc, char** argv) {
  using namespace eggsynth;

  MonteCarloOptions options;
  options.replications = argc > 1 ? std::stoul(argv[1]) : 200'000;
  options.n_per_group = argc > 2 ? std::stoul(argv[2]) : 20;
  options.seed = 1;

#ifdef _OPENMP
  std::printf("OpenMP: max %d threads\n", omp_get_max_threads());
#else
  std::printf("OpenMP: not enabled\n");
#endif
  std::printf("fast mode, %zu replications, n = %zu per group\n", options.replications,
              options.n_per_group);

  const MonteCarloReport serial = run_monte_carlo_reference(options);
  std::printf("serial reference: %8.3f s  (%.0f reps/s)\n", serial.runtime_s,
              static_cast<double>(options.replications) / serial.runtime_s);

  const MonteCarloReport parallel = run_monte_carlo(options);
  std::printf("openmp kernel:    %8.3f s  (%.0f reps/s)\n", parallel.runtime_s,
              static_cast<double>(options.replications) / parallel.runtime_s);
  std::printf("speedup: %.2fx\n", serial.runtime_s / parallel.runtime_s);

  if (!serial.deterministic_equal(parallel)) {
    std::printf("FAIL: parallel report differs from the serial reference\n");
    return 1;
  }
  std::printf("reports identical: frac(p<0.05) = %.4f, frac(p<0.01) = %.4f, frac(p<0.001) = %.4f\n",
              parallel.frac_p_lt_05, parallel.frac_p_lt_01, parallel.frac_p_lt_001);
  return 0;
}
