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

#ifndef MMFSK_IO_HPP
#define MMFSK_IO_HPP

#include "mmfsk/camera.hpp"
#include "mmfsk/correlate.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mmfsk
{
    // Little-endian tensor container: "FSKT", u32 version, u32 T, R, F, then
    // T*R*F complex64 values in (t, r, k) row-major order.
    void write_fskt(const std::filesystem::path &path, const BasebandTensor &baseband);
    BasebandTensor read_fskt(const std::filesystem::path &path);

    // Same layout for correlation fields: "FSKC", u32 version, u32 H, W, F,
    // then H*W*F complex64 values; invalid pixels hold NaN. The reader marks
    // a pixel valid when all of its values are finite and leaves the pitch
    // and center of the returned geometry at their defaults.
    void write_fskc(const std::filesystem::path &path, const CorrelationField &field);
    CorrelationField read_fskc(const std::filesystem::path &path);

    // Single-channel float image, row 0 at the top. Non-finite samples mark
    // invalid pixels.
    struct FloatImage
    {
        std::size_t width = 0, height = 0;
        std::vector<double> values;

        std::vector<std::uint8_t> finite_mask() const;
    };

    // PFM ("Pf", little-endian, scale -1). Values are stored as float32 with
    // rows bottom to top, as the format prescribes. Invalid pixels become NaN.
    void write_pfm(const std::filesystem::path &path, std::size_t width, std::size_t height,
                   std::span<const double> values, std::span<const std::uint8_t> valid = {});
    FloatImage read_pfm(const std::filesystem::path &path);

    // ASCII PLY with float x, y, z and an optional per-vertex scalar.
    struct PointCloud
    {
        std::vector<Vec3> points;
        std::vector<double> scalar; // empty or one per point
        std::string scalar_name = "magnitude";
    };

    void write_ply(const std::filesystem::path &path, const PointCloud &cloud);
    PointCloud read_ply(const std::filesystem::path &path);

    struct Calibration
    {
        CameraIntrinsics intrinsics;
        Extrinsics extrinsics;
    };

    // JSON document {"intrinsics": {fu, fv, cu, cv},
    //                "extrinsics": {"R": [9 numbers, row-major], "t": [3 numbers]}}
    Calibration parse_calibration(const std::string &text);
    std::string format_calibration(const Calibration &calibration);
    Calibration read_calibration(const std::filesystem::path &path);
    void write_calibration(const std::filesystem::path &path, const Calibration &calibration);

    std::string read_text_file(const std::filesystem::path &path);
    void write_text_file(const std::filesystem::path &path, const std::string &text);

} // namespace mmfsk

#endif
