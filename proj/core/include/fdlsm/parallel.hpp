#pragma once

#include <cstddef>
#include <functional>

namespace fdlsm {

/// Sets the worker count used by parallel loops. Zero selects the hardware
/// concurrency.
void set_thread_count(unsigned count);
unsigned thread_count();

/// Splits [0, n) into contiguous chunks with boundaries that depend only on
/// n and chunk, so per-chunk partial results can be reduced in a fixed order
/// independent of the thread count. body(chunk_index, begin, end).
void parallel_chunks(std::size_t n, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

inline std::size_t chunk_count(std::size_t n, std::size_t chunk) {
  return chunk == 0 ? 0 : (n + chunk - 1) / chunk;
}

}  // namespace fdlsm
