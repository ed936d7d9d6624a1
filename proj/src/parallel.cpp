#include "sphdesign/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace sphd {

namespace {
constexpr std::size_t kDeterministicChunks = 16;
}

ExecutionSettings& execution() {
  static ExecutionSettings settings;
  return settings;
}

std::vector<ChunkRange> make_chunks(std::size_t n) {
  const auto& s = execution();
  std::size_t want = s.deterministic ? kDeterministicChunks
                                     : static_cast<std::size_t>(std::max(1, s.threads));
  want = std::max<std::size_t>(1, std::min(want, n));
  std::vector<ChunkRange> out;
  out.reserve(want);
  for (std::size_t c = 0; c < want; ++c) {
    out.push_back({n * c / want, n * (c + 1) / want});
  }
  return out;
}

void run_chunks(const std::vector<ChunkRange>& chunks,
                const std::function<void(std::size_t, ChunkRange)>& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, execution().threads));
  if (workers == 1 || chunks.size() <= 1) {
    for (std::size_t c = 0; c < chunks.size(); ++c) body(c, chunks[c]);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < chunks.size(); c = next++) body(c, chunks[c]);
  };
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < std::min(workers, chunks.size()); ++w) pool.emplace_back(worker);
  worker();
}

}  // namespace sphd
