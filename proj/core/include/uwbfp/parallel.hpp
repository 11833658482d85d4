#pragma once

#include <cstddef>
#include <functional>

namespace uwbfp {

/// Resolves a requested worker count; 0 means hardware concurrency.
unsigned resolve_threads(unsigned requested) noexcept;

/// Calls body(i) for every i in [0, n) on up to `threads` workers.
///
/// Indices are handed out in contiguous blocks. Callers must write results to
/// per-index slots; the first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace uwbfp
