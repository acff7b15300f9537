#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace hybridpn {

// Serial is the reference path; parallel must give bitwise identical results
// because every index writes a disjoint slot.
enum class Execution { serial, parallel };

template <class F>
void for_each_index(Execution exec, std::ptrdiff_t count, F&& f) {
    if (exec == Execution::serial || count < 2) {
        for (std::ptrdiff_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex guard;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            f(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(guard);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace hybridpn
