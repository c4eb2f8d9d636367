#ifndef WAVEKIN_PARALLEL_HPP
#define WAVEKIN_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace wavekin {

// Global cap on worker threads for all internal pools (CLI --threads).
// 0 means hardware concurrency.
void set_thread_budget(unsigned n);
unsigned thread_budget();

// Runs fn(i) for i in [0, n) across the thread budget. Work is split into
// contiguous blocks; results must be written to disjoint slots so the output
// is deterministic regardless of thread count. Exceptions propagate.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace wavekin

#endif
