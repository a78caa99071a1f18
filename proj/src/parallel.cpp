#include "meshcarve/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace mc {

int worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* cap = std::getenv("SC_THREADS")) {
        long v = std::strtol(cap, nullptr, 10);
        if (v > 0 && static_cast<unsigned long>(v) < hw) hw = static_cast<unsigned>(v);
    }
    return static_cast<int>(hw);
}

void parallel_for_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
    if (workers <= 1) {
        body(0, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) {
        std::size_t b = w * chunk;
        std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back(body, b, e);
    }
    body(0, std::min(chunk, n));
    for (auto& t : pool) t.join();
}

}  // namespace mc
