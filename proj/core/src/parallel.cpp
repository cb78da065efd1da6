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

#include "conelab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace conelab {

namespace {

int initial_thread_count() noexcept
{
    if (const char* env = std::getenv("CONELAB_THREADS"))
    {
        const int n = std::atoi(env);
        if (n > 0)
        {
            return n;
        }
    }
    return 1;
}

// Set on threads executing a parallel body; nested loops then run inline.
thread_local bool t_in_parallel = false;

std::atomic<int>& thread_setting() noexcept
{
    static std::atomic<int> n{initial_thread_count()};
    return n;
}

} // namespace

int thread_count() noexcept { return thread_setting().load(); }

void set_thread_count(int n) noexcept { thread_setting().store(std::max(1, n)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body)
{
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
    if (workers <= 1 || t_in_parallel)
    {
        for (std::size_t i = 0; i < n; ++i)
        {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        t_in_parallel = true;
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
        {
            try
            {
                body(i);
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (!error)
                {
                    error = std::current_exception();
                }
                next.store(n);
            }
        }
        t_in_parallel = false;
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w)
    {
        pool.emplace_back(run);
    }
    run();
    for (auto& t : pool)
    {
        t.join();
    }
    if (error)
    {
        std::rethrow_exception(error);
    }
}

void parallel_chunks(std::size_t n, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body)
{
    const std::size_t count = chunk_count(n, chunk);
    parallel_for(count, [&](std::size_t c) {
        const std::size_t begin = c * chunk;
        body(c, begin, std::min(n, begin + chunk));
    });
}

} // namespace conelab
