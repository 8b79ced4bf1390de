// parallel.hpp — execution policy for the data-parallel kernels
//
// Every parallel loop in the library is a map over independent slots (or a
// fixed block decomposition combined in index order), so Exec::Parallel
// produces bitwise the same results as the serial reference regardless of
// thread count. Tests compare the two paths for exact equality.

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace adlab {

enum class Exec { Serial, Parallel };

#ifdef _OPENMP
inline constexpr Exec kDefaultExec = Exec::Parallel;
#else
inline constexpr Exec kDefaultExec = Exec::Serial;
#endif

// Runs f(i) for i in [0, n). Exceptions are captured and the one thrown at
// the lowest index is rethrown, so failure behaviour matches the serial loop.
template <class F>
void parallel_for(Exec exec, std::ptrdiff_t n, F&& f) {
    if (n <= 0) return;
    if (exec == Exec::Serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
        return;
    }
#ifdef _OPENMP
    std::exception_ptr first_error;
    std::ptrdiff_t first_error_index = n;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            f(i);
        } catch (...) {
#pragma omp critical(adlab_parallel_for_error)
            {
                if (i < first_error_index) {
                    first_error_index = i;
                    first_error = std::current_exception();
                }
            }
        }
    }
    if (first_error) std::rethrow_exception(first_error);
#else
    for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
#endif
}

// Deterministic parallel reduction: n terms split into fixed-size blocks,
// block partials computed independently, combined in block order. The block
// layout depends only on n, never on the thread count.
template <class T, class F>
T blocked_sum(Exec exec, std::ptrdiff_t n, F&& term, std::ptrdiff_t block = 4096) {
    if (n <= 0) return T{};
    const std::ptrdiff_t nblocks = (n + block - 1) / block;
    std::vector<T> partial(static_cast<std::size_t>(nblocks), T{});
    parallel_for(exec, nblocks, [&](std::ptrdiff_t b) {
        const std::ptrdiff_t lo = b * block;
        const std::ptrdiff_t hi = std::min(lo + block, n);
        T acc{};
        for (std::ptrdiff_t i = lo; i < hi; ++i) acc += term(i);
        partial[static_cast<std::size_t>(b)] = acc;
    });
    T total{};
    for (const T& p : partial) total += p;
    return total;
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace adlab
