#pragma once

#include <cstddef>
#include <cstdlib>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace idemkit::par {

/// Thread budget: min(hardware, IDEMKIT_THREADS when set).
inline int max_threads() {
#ifdef _OPENMP
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("IDEMKIT_THREADS")) {
        int cap = std::atoi(env);
        if (cap > 0 && cap < n) n = cap;
    }
    return n;
#else
    return 1;
#endif
}

/// Serial reference loop. Kept as the oracle the parallel kernels are tested against.
template <class F>
void serial_for(std::ptrdiff_t n, F&& f) {
    for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
}

/// OpenMP loop over [0, n). Each f(i) must be pure in i; results land in
/// caller-owned per-index slots so serial and parallel runs agree bitwise.
template <class F>
void parallel_for(std::ptrdiff_t n, F&& f) {
#ifdef _OPENMP
    const int nt = max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
    for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
#else
    serial_for(n, std::forward<F>(f));
#endif
}

} // namespace idemkit::par
