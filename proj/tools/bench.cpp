// Compares the OpenMP kernels against their serial references: the
// two-replica layer update and the replicate-level harness. Also verifies the
// outputs agree while timing them.

#include <chrono>
#include <cstdio>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "polymerlab/env.hpp"
#include "polymerlab/experiments.hpp"
#include "polymerlab/mc.hpp"
#include "polymerlab/polymer.hpp"
#include "polymerlab/replica.hpp"
#include "polymerlab/rng.hpp"

using namespace polymerlab;
using clock_t_ = std::chrono::steady_clock;

namespace {

double seconds_since(clock_t_::time_point t0) {
  return std::chrono::duration<double>(clock_t_::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  int n = 160;
  int m = 64;
  if (argc > 1) n = std::atoi(argv[1]);
  if (argc > 2) m = std::atoi(argv[2]);
#ifdef _OPENMP
  const int threads = omp_get_max_threads();
#else
  const int threads = 1;
#endif
  printf("threads available: %d\n", threads);

  const EnvModel model = EnvModel::gaussian(0.25);
  const InterpolationPoint pt{0.7, 1.0, 0.3};

  // two-replica kernel: serial reference vs OpenMP rows
  {
    const EnvField f = sample_field(model, n, 42);
    auto t0 = clock_t_::now();
    const double ref = phi_reference(f, pt, model);
    const double t_ref = seconds_since(t0);
    t0 = clock_t_::now();
    const double par = phi(f, pt, model);
    const double t_par = seconds_since(t0);
    printf("phi n=%d            serial %8.3fs   openmp %8.3fs   speedup %5.2fx   |diff| %.2e\n",
           n, t_ref, t_par, t_ref / t_par, std::abs(ref - par));
  }

  // replicate harness: serial loop vs parallel map, estimate of p_n
  {
    const int len = 128;
    const double beta = 0.6;
    auto worker = [&](uint32_t r) {
      return log_w(model, len, rng::replicate_seed(7, r), beta) / len;
    };
    auto t0 = clock_t_::now();
    const auto serial = mc::map_replicates_serial<double>(m, worker);
    const double t_ser = seconds_since(t0);
    t0 = clock_t_::now();
    const auto parallel = mc::map_replicates<double>(m, 0, worker);
    const double t_par = seconds_since(t0);
    double worst = 0.0;
    for (int r = 0; r < m; ++r)
      worst = std::max(worst, std::abs(serial[static_cast<std::size_t>(r)] -
                                       parallel[static_cast<std::size_t>(r)]));
    printf("harness n=%d m=%d  serial %8.3fs   openmp %8.3fs   speedup %5.2fx   |diff| %.2e\n",
           len, m, t_ser, t_par, t_ser / t_par, worst);
  }
  return 0;
}
