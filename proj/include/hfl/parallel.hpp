#pragma once

// Deterministic chunked execution. Ranges are cut at absolute multiples of
// 2^16 and at caller-supplied grid points; workers pull chunk indices from an
// atomic counter and results are returned in chunk order, so any reduction the
// caller performs over them is independent of the thread count.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace hfl {

struct Chunk {
  std::uint64_t begin, end;  // inclusive range [begin, end]
};

inline constexpr std::uint64_t chunk_size = 1ULL << 16;

/// Splits [lo, hi] at multiples of 2^16 and after every cut point.
inline std::vector<Chunk> make_chunks(std::uint64_t lo, std::uint64_t hi, std::vector<std::uint64_t> cuts = {}) {
  std::vector<Chunk> out;
  if (hi < lo) return out;
  std::sort(cuts.begin(), cuts.end());
  std::uint64_t b = lo;
  auto next_cut = cuts.begin();
  while (b <= hi) {
    std::uint64_t e = (b / chunk_size + 1) * chunk_size - 1;
    e = std::min(e, hi);
    while (next_cut != cuts.end() && *next_cut < b) ++next_cut;
    if (next_cut != cuts.end() && *next_cut < e) e = *next_cut;
    out.push_back({b, e});
    b = e + 1;
  }
  return out;
}

inline unsigned default_threads() {
  unsigned t = std::thread::hardware_concurrency();
  return t == 0 ? 1 : t;
}

/// Runs body(chunk) for every chunk on `threads` workers; returns results in
/// chunk order. If any chunk throws, the exception of the lowest-index
/// failing chunk is rethrown.
template <class Result, class Body>
std::vector<Result> run_chunks(const std::vector<Chunk>& chunks, unsigned threads, Body&& body) {
  std::vector<Result> results(chunks.size());
  std::vector<std::exception_ptr> errors(chunks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= chunks.size()) return;
      try {
        results[i] = body(chunks[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(chunks.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace hfl
