#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#ifdef CRWVAR_HAVE_OPENMP
#include <omp.h>
#endif

namespace crwvar {

/// Execution policy for replicate loops. Both produce identical output.
enum class Exec { serial, parallel };

inline int max_threads() noexcept {
#ifdef CRWVAR_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Serial reference: out[k] = fn(k) for k in [0, n).
template <class Fn>
auto map_replicates_serial(std::size_t n, Fn&& fn) {
  using T = decltype(fn(std::size_t{0}));
  std::vector<T> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = fn(k);
  return out;
}

/**
 * OpenMP kernel: out[k] = fn(k) with iterations distributed across threads.
 * fn must be a pure function of k (each replicate owns its RngStream), so the
 * result equals map_replicates_serial bit for bit.
 */
template <class Fn>
auto map_replicates_parallel(std::size_t n, Fn&& fn) {
  using T = decltype(fn(std::size_t{0}));
  std::vector<T> out(n);
  const auto count = static_cast<std::int64_t>(n);
#ifdef CRWVAR_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::int64_t k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = fn(static_cast<std::size_t>(k));
  return out;
}

template <class Fn>
auto map_replicates(std::size_t n, Fn&& fn, Exec exec = Exec::parallel) {
  return exec == Exec::parallel ? map_replicates_parallel(n, static_cast<Fn&&>(fn))
                                : map_replicates_serial(n, static_cast<Fn&&>(fn));
}

}  // namespace crwvar
