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

#ifndef MMFSK_COMMON_HPP
#define MMFSK_COMMON_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mmfsk
{
    using Complex = std::complex<double>;

    inline constexpr double kSpeedOfLight = 299'792'458.0; // m/s, exact
    inline constexpr double kPi = 3.14159265358979323846;

    // Error categories. The CLI maps these onto process exit codes
    // (validation-type -> 1, io -> 2, numerical/empty_image -> 3).
    enum class ErrorKind
    {
        validation,          // malformed inputs, broken invariants
        domain,              // argument outside the mathematical domain
        configuration,       // unknown names, wrong frequency count, bad params
        structural,          // dimension mismatch between tensors/arrays/grids
        insufficient_data,   // not enough valid samples
        degenerate_geometry, // collinear input and similar
        empty_image,         // nothing left to evaluate
        numerical,           // numerical failure
        io                   // file system and format errors
    };

    const char *error_kind_name(ErrorKind kind) noexcept;

    class Error : public std::runtime_error
    {
    public:
        Error(ErrorKind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}
        ErrorKind kind() const noexcept { return kind_; }

    private:
        ErrorKind kind_;
    };

    [[noreturn]] inline void fail(ErrorKind kind, const std::string &what) { throw Error(kind, what); }

    struct Vec3
    {
        double x = 0.0, y = 0.0, z = 0.0;

        constexpr Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
        constexpr Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
        constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
        constexpr bool operator==(const Vec3 &) const = default;

        constexpr double dot(const Vec3 &o) const { return x * o.x + y * o.y + z * o.z; }
        double norm() const { return std::sqrt(x * x + y * y + z * z); }
        bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
    };

    inline double distance(const Vec3 &a, const Vec3 &b) { return (a - b).norm(); }

    // Worker count for data-parallel kernels; 0 selects the hardware default
    // (overridable through the MMFSK_WORKERS environment variable).
    struct Execution
    {
        unsigned workers = 0;
    };

    unsigned resolve_workers(const Execution &exec) noexcept;

} // namespace mmfsk

#endif
