#include "pbl/parallel.hpp"

#include <cstdlib>
#include <memory>
#include <mutex>

#include <tbb/global_control.h>
#include <tbb/parallel_for.h>

namespace pbl {

namespace {
std::once_flag g_once;
std::unique_ptr<tbb::global_control> g_control;
int g_cap = 0;
}  // namespace

int thread_cap() {
    std::call_once(g_once, [] {
        if (const char* s = std::getenv("PRANDTL_THREADS")) {
            int n = std::atoi(s);
            if (n > 0) {
                g_cap = n;
                g_control = std::make_unique<tbb::global_control>(
                    tbb::global_control::max_allowed_parallelism, std::size_t(n));
            }
        }
    });
    return g_cap;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    thread_cap();
    tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n), [&](const tbb::blocked_range<std::size_t>& r) {
        for (std::size_t i = r.begin(); i != r.end(); ++i) body(i);
    });
}

}  // namespace pbl
