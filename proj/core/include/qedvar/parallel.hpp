#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace qedvar {

/// Splits [0, count) into contiguous chunks, one per thread, and calls
/// body(begin, end) on each. Runs inline when threads <= 1.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (threads == 1) {
        body(std::size_t{0}, count);
        return;
    }
    const std::size_t chunk = (count + threads - 1) / threads;
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t begin = std::min(count, t * chunk);
        const std::size_t end = std::min(count, begin + chunk);
        if (begin == end) break;
        workers.emplace_back([&body, begin, end] { body(begin, end); });
    }
}

}  // namespace qedvar
