// Copyright 2026 The asymflow authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace asymflow {

/// Runs fn over [begin, end) split into contiguous chunks, one per thread.
/// Chunks are disjoint, so results are bitwise-deterministic for any thread
/// count as long as fn only writes its own index range. threads <= 1 runs
/// inline.
inline void parallel_for(int begin, int end, int threads,
                         const std::function<void(int, int)>& fn) {
  const int count = end - begin;
  if (threads <= 1 || count < 2 * threads) {
    fn(begin, end);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const int chunk = (count + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int lo = begin + t * chunk;
    if (lo >= end) break;
    const int hi = (lo + chunk < end) ? lo + chunk : end;
    pool.emplace_back(fn, lo, hi);
  }
  for (auto& th : pool) th.join();
}

}  // namespace asymflow
