#ifndef OSGOODLAB_PARALLEL_HPP
#define OSGOODLAB_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace osgoodlab {

/// Calls body(i) for i in [0, n) on up to `threads` workers with a static
/// block partition. Each index is handled by exactly one call, so writing
/// results to slot i keeps the output independent of the thread count.
/// If bodies throw, the exception from the lowest worker block is rethrown.
template <class Body>
void parallel_for(std::size_t n, std::size_t threads, Body&& body) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t w = 0; w < threads; ++w) {
            const std::size_t begin = n * w / threads;
            const std::size_t end = n * (w + 1) / threads;
            pool.emplace_back([&, w, begin, end] {
                for (std::size_t i = begin; i < end; ++i) {
                    try {
                        body(i);
                    } catch (...) {
                        errors[w] = std::current_exception();
                        return;
                    }
                }
            });
        }
    }
    for (std::size_t w = 0; w < threads; ++w)
        if (errors[w]) std::rethrow_exception(errors[w]);
}

} // namespace osgoodlab

#endif // OSGOODLAB_PARALLEL_HPP
