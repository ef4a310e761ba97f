// Copyright 2026 The SBM Cavity Authors.
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

#ifndef SBM_CAVITY_PARALLEL_H_
#define SBM_CAVITY_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sbm_cavity {

// Runs task(index) for every index in [0, count) on up to `threads` workers.
// Tasks are claimed in increasing index order. The first exception thrown by
// a task is rethrown after all workers finish.
template <typename Task>
void ParallelFor(size_t count, int threads, Task&& task) {
  const size_t width =
      std::min<size_t>(count, static_cast<size_t>(std::max(threads, 1)));
  if (width <= 1) {
    for (size_t index = 0; index < count; ++index) task(index);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const size_t index = next.fetch_add(1);
      if (index >= count) return;
      try {
        task(index);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(width);
  for (size_t w = 0; w < width; ++w) pool.emplace_back(worker);
  for (auto& thread : pool) thread.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace sbm_cavity

#endif  // SBM_CAVITY_PARALLEL_H_
