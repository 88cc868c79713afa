// SPDX-License-Identifier: Apache-2.0
//
// u2v-chansim: LiDAR-aided UAV-to-vehicle channel simulation toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef U2V_PARALLEL_HPP
#define U2V_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace u2v
{
    // Runs fn(i) for i in [0, n) on up to `jobs` threads (interleaved assignment).
    // The first exception thrown by any task is rethrown after all threads finish.
    template <typename Fn>
    void parallel_for(std::size_t n, std::size_t jobs, Fn &&fn)
    {
        jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
        if (jobs == 1)
        {
            for (std::size_t i = 0; i < n; ++i)
                fn(i);
            return;
        }

        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> workers;
        workers.reserve(jobs);
        for (std::size_t w = 0; w < jobs; ++w)
            workers.emplace_back([&, w]
                                 {
                for (std::size_t i = w; i < n; i += jobs)
                {
                    try
                    {
                        fn(i);
                    }
                    catch (...)
                    {
                        std::lock_guard lock(error_mutex);
                        if (!error)
                            error = std::current_exception();
                        return;
                    }
                } });
        for (auto &t : workers)
            t.join();
        if (error)
            std::rethrow_exception(error);
    }
}

#endif
