#pragma once

// Grid kernels run either serially (the reference path, kept for tests) or
// with OpenMP across independent points. Both paths call the same per-point
// function, so results are identical element by element.

#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wpt {

enum class Execution { kSerial, kParallel };

/// Calls fn(i) for i in [0, n). Exceptions thrown by fn are captured and the
/// first one (lowest index in serial mode) is rethrown after the loop.
template <typename Fn>
void for_each_index(std::size_t n, Execution exec, Fn&& fn) {
    if (exec == Execution::kSerial) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }

    std::exception_ptr error;
    std::mutex error_mutex;
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            const std::lock_guard lock(error_mutex);
            if (!error) {
                error = std::current_exception();
            }
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

[[nodiscard]] inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace wpt
