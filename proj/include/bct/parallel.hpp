#pragma once

#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bct {

// Thread count for parallel kernels: BCTENT_THREADS if set, else the OpenMP
// default. Always 1 without OpenMP.
inline int thread_count() {
#ifdef _OPENMP
    if (const char* env = std::getenv("BCTENT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<int>(v);
    }
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Order-independent parallel loop. Body must only touch slot i of shared
// state; results are then identical to a serial run.
template <typename Fn>
void parallel_for(std::uint64_t count, Fn&& body) {
#ifdef _OPENMP
    const int threads = thread_count();
    std::exception_ptr failure;
    std::mutex failure_mutex;
#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
        try {
            body(static_cast<std::uint64_t>(i));
        } catch (...) {
            // exceptions must not unwind out of the region
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
#else
    for (std::uint64_t i = 0; i < count; ++i) body(i);
#endif
}

}  // namespace bct
