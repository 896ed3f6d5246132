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

#ifndef MMFSK_CAMERA_HPP
#define MMFSK_CAMERA_HPP

#include "mmfsk/common.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace mmfsk
{
    struct CameraIntrinsics
    {
        double fu = 200.0, fv = 200.0; // focal lengths, px
        double cu = 79.5, cv = 59.5;   // principal point, px

        void validate() const;
    };

    // Rigid camera-to-radar transform: p_radar = R * p_camera + t.
    struct Extrinsics
    {
        std::array<double, 9> rotation{1, 0, 0, 0, 1, 0, 0, 0, 1}; // row-major
        Vec3 translation;

        // Throws validation error unless R^T R = I and det R = +1 within 1e-9.
        void validate() const;
        Vec3 apply(const Vec3 &p) const;
        Vec3 rotate(const Vec3 &p) const;

        // Rotation about the unit axis (ax, ay, az) by `angle` radians.
        static Extrinsics from_axis_angle(const Vec3 &axis, double angle, const Vec3 &translation);
    };

    // Depth along the camera z axis per pixel, row-major (v * width + u).
    struct OpticalDepthMap
    {
        std::size_t width = 0, height = 0;
        std::vector<double> depth;
        std::vector<std::uint8_t> valid;

        OpticalDepthMap() = default;
        OpticalDepthMap(std::size_t w, std::size_t h);
        std::size_t valid_count() const noexcept;
        void validate() const;
    };

} // namespace mmfsk

#endif
