/*
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <cstdint>
#include <functional>
#include <random>

namespace streamflow {

/// mt19937_64 with distribution mappings fixed here rather than taken from
/// <random>, whose distributions are implementation-defined. Sequences are
/// identical across standard libraries for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t index(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  /// Uniform real in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Worker count: STREAMFLOW_THREADS if set to a positive integer, else the
/// hardware concurrency (at least 1).
unsigned worker_count();

/// Calls fn(begin, end, chunk) over `chunks` contiguous chunks of [0, n),
/// on up to worker_count() threads. Chunk boundaries depend only on n and
/// chunks, so callers that write per-chunk results and merge them by chunk
/// index get output independent of the thread count.
void parallel_chunks(std::size_t n, std::size_t chunks,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace streamflow
