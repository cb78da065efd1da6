/*
   Copyright 2026 The conelab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstddef>
#include <functional>

namespace conelab {

/// Worker count used by parallel loops. Initialized from CONELAB_THREADS,
/// else 1. Never affects results, only wall time.
int thread_count() noexcept;
void set_thread_count(int n) noexcept;

/**
 * Runs body(i) for i in [0, n) on thread_count() workers. Each index is
 * executed exactly once; callers write results into per-index slots, which
 * keeps outputs independent of the schedule.
 */
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/**
 * Runs body(begin, end) over fixed-size contiguous chunks. The chunking
 * depends only on n and chunk, never on the worker count.
 */
void parallel_chunks(std::size_t n, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

/// Number of chunks parallel_chunks will produce.
constexpr std::size_t chunk_count(std::size_t n, std::size_t chunk) noexcept
{
    return chunk == 0 ? 0 : (n + chunk - 1) / chunk;
}

} // namespace conelab
