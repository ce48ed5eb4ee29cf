#pragma once

// Replicate-level parallel map with a deterministic contract: every value is a
// pure function of (master seed, replicate index) and the reduction always
// runs in index order, so results are bit-identical for any worker count.

#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace polymerlab::mc {

inline int resolve_workers(int workers) {
#ifdef _OPENMP
  if (workers <= 0) return omp_get_max_threads();
  return workers;
#else
  (void)workers;
  return 1;
#endif
}

template <class T, class F>
std::vector<T> map_replicates(int m, int workers, F&& fn) {
  std::vector<T> out(static_cast<std::size_t>(m));
  const int nw = resolve_workers(workers);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nw)
#endif
  for (int r = 0; r < m; ++r) out[static_cast<std::size_t>(r)] = fn(static_cast<uint32_t>(r));
  (void)nw;
  return out;
}

// plain loop kept as the reference for the determinism tests
template <class T, class F>
std::vector<T> map_replicates_serial(int m, F&& fn) {
  std::vector<T> out(static_cast<std::size_t>(m));
  for (int r = 0; r < m; ++r) out[static_cast<std::size_t>(r)] = fn(static_cast<uint32_t>(r));
  return out;
}

}  // namespace polymerlab::mc
