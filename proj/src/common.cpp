#include "hyperembed/common.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace hyperembed {

namespace {
std::atomic<int> g_threads{1};
std::atomic<ReductionMode> g_reduction{ReductionMode::sequential};
}  // namespace

void set_num_threads(int n) {
    if (n < 0) throw ParameterError("thread count must be >= 0");
    if (n == 0) n = static_cast<int>(std::thread::hardware_concurrency());
    g_threads.store(std::max(1, n));
}

int num_threads() { return g_threads.load(); }

void set_reduction_mode(ReductionMode mode) { g_reduction.store(mode); }

ReductionMode reduction_mode() { return g_reduction.load(); }

void parallel_for(Index begin, Index end, const std::function<void(Index, Index)>& body) {
    const Index total = end - begin;
    if (total <= 0) return;
    const int nt = std::min<Index>(num_threads(), total);
    if (nt <= 1) {
        body(begin, end);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(nt);
    const Index chunk = (total + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        Index lo = begin + t * chunk;
        Index hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto& w : workers) w.join();
}

}  // namespace hyperembed
