#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace sphd {

/// Process-wide execution controls for the batched kernels.
///
/// In deterministic mode the work is always split into the same chunks and
/// partial sums are reduced in chunk order, so results are bitwise identical
/// whatever the thread count. Otherwise one chunk per thread is used.
struct ExecutionSettings {
  int threads = 1;
  bool deterministic = true;
};

ExecutionSettings& execution();

struct ChunkRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Splits [0, n) into contiguous chunks according to the current settings.
std::vector<ChunkRange> make_chunks(std::size_t n);

/// Runs body(chunk_index, range) for every chunk, possibly concurrently.
void run_chunks(const std::vector<ChunkRange>& chunks,
                const std::function<void(std::size_t, ChunkRange)>& body);

}  // namespace sphd
