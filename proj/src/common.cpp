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

#include "mmfsk/common.hpp"

#include <cstdlib>
#include <thread>

namespace mmfsk
{
    const char *error_kind_name(ErrorKind kind) noexcept
    {
        switch (kind)
        {
        case ErrorKind::validation: return "validation error";
        case ErrorKind::domain: return "domain error";
        case ErrorKind::configuration: return "configuration error";
        case ErrorKind::structural: return "structural error";
        case ErrorKind::insufficient_data: return "insufficient data";
        case ErrorKind::degenerate_geometry: return "degenerate geometry";
        case ErrorKind::empty_image: return "empty image";
        case ErrorKind::numerical: return "numerical failure";
        case ErrorKind::io: return "i/o error";
        }
        return "error";
    }

    unsigned resolve_workers(const Execution &exec) noexcept
    {
        if (exec.workers > 0)
            return exec.workers;
        if (const char *env = std::getenv("MMFSK_WORKERS"))
        {
            char *end = nullptr;
            const long v = std::strtol(env, &end, 10);
            if (end != env && v > 0 && v < 4096)
                return static_cast<unsigned>(v);
        }
        const unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? hw : 1;
    }

} // namespace mmfsk
