#pragma once

// Deterministic block-parallel helpers. Work is cut into blocks whose
// boundaries depend only on the range and block size, never on the thread
// count, and partial results are combined in block order. Output is therefore
// bit-identical for any number of threads.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "divcorr/scalar.hpp"

namespace divcorr {

// Thread count from DIVCORR_THREADS, falling back to 1.
inline unsigned default_threads() {
  if (const char* env = std::getenv("DIVCORR_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

struct Block {
  std::uint64_t index;
  std::uint64_t lo;  // inclusive
  std::uint64_t hi;  // exclusive
};

inline std::vector<Block> make_blocks(std::uint64_t lo, std::uint64_t hi, std::uint64_t block_size) {
  std::vector<Block> blocks;
  if (hi <= lo) return blocks;
  block_size = std::max<std::uint64_t>(block_size, 1);
  for (std::uint64_t b = lo, i = 0; b < hi; b += block_size, ++i) {
    blocks.push_back({i, b, std::min(hi, b + block_size)});
  }
  return blocks;
}

// Runs fn(block) for every block, statically assigned round-robin to threads.
// The first exception thrown by any worker is rethrown on the caller.
template <class Fn>
void for_each_block(const std::vector<Block>& blocks, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks.size())));
  if (threads <= 1) {
    for (const auto& b : blocks) fn(b);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < blocks.size(); i += threads) fn(blocks[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  workers.clear();
  if (failure) std::rethrow_exception(failure);
}

// Sum of partial(block) over blocks of [lo, hi), combined in block order.
template <Scalar S, class Partial>
S blocked_sum(std::uint64_t lo, std::uint64_t hi, std::uint64_t block_size, unsigned threads,
              Partial&& partial) {
  const auto blocks = make_blocks(lo, hi, block_size);
  std::vector<S> parts(blocks.size(), from_int<S>(0));
  for_each_block(blocks, threads, [&](const Block& b) { parts[b.index] = partial(b.lo, b.hi); });
  CompensatedSum<S> total;
  for (const auto& p : parts) total.add(p);
  return total.value();
}

}  // namespace divcorr
