// SPDX-License-Identifier: Apache-2.0
//
// mmfsk - multimodal frequency-shift-keying MIMO radar depth imaging
// Copyright (C) 2026 The mmfsk Authors
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

#ifndef MMFSK_PARALLEL_HPP
#define MMFSK_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mmfsk
{
    // Splits [0, n) into `workers` contiguous ranges and calls body(begin, end)
    // once per range. Each range is owned by exactly one thread, so results
    // written per index do not depend on the worker count. The first exception
    // thrown by any range is rethrown on the calling thread.
    template <typename Body>
    void parallel_ranges(std::size_t n, unsigned workers, Body &&body)
    {
        if (n == 0)
            return;
        const std::size_t parts = std::max<std::size_t>(1, std::min<std::size_t>(workers, n));
        if (parts == 1)
        {
            body(std::size_t{0}, n);
            return;
        }

        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        pool.reserve(parts - 1);

        auto run = [&](std::size_t b, std::size_t e)
        {
            try
            {
                body(b, e);
            }
            catch (...)
            {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        };

        const std::size_t chunk = n / parts, rest = n % parts;
        std::size_t begin = 0;
        for (std::size_t p = 0; p < parts; ++p)
        {
            const std::size_t end = begin + chunk + (p < rest ? 1 : 0);
            if (p + 1 == parts)
                run(begin, end);
            else
                pool.emplace_back(run, begin, end);
            begin = end;
        }
        for (auto &t : pool)
            t.join();
        if (error)
            std::rethrow_exception(error);
    }

} // namespace mmfsk

#endif
