#pragma once

#include <cstddef>
#include <functional>

namespace pbl {

/// Thread cap from PRANDTL_THREADS (0 or unset: library default). Installed
/// once per process on first use.
int thread_cap();

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace pbl
