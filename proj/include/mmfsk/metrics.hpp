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

#ifndef MMFSK_METRICS_HPP
#define MMFSK_METRICS_HPP

#include "mmfsk/reconstruct.hpp"
#include "mmfsk/simulate.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mmfsk
{
    // Nearest-neighbour queries over a fixed point set, backed by a uniform
    // grid whose cell count is at most the number of points.
    class NearestNeighborIndex
    {
      public:
        explicit NearestNeighborIndex(std::span<const Vec3> points);

        // Euclidean distance from q to the closest indexed point.
        double nearest_distance(const Vec3 &q) const;

      private:
        std::vector<Vec3> points_; // sorted by cell
        std::vector<std::uint32_t> cell_start_;
        Vec3 origin_;
        double cell_ = 1.0;
        std::size_t nx_ = 1, ny_ = 1, nz_ = 1;

        std::size_t clamp_cell(double coord, double origin, std::size_t n) const;
    };

    // Mean over `from` of the distance to the nearest point of `to`.
    // Throws insufficient_data when either set is empty.
    double chamfer_one_way(std::span<const Vec3> from, std::span<const Vec3> to);

    // Reference implementation with an O(|from| |to|) scan.
    double chamfer_one_way_brute(std::span<const Vec3> from, std::span<const Vec3> to);

    // 4-neighbour erosion; pixels outside the image count as invalid.
    std::vector<std::uint8_t> erode_mask(std::span<const std::uint8_t> mask, std::size_t width, std::size_t height,
                                         unsigned iterations);

    // Mean |d_est - d_ref| over pixels valid in both maps (after eroding the
    // joint mask `erosion` times), divided by the number of such pixels.
    // Throws insufficient_data when no pixel remains.
    struct ProjectiveError
    {
        double mean_abs = 0.0;
        std::size_t pixels = 0;
    };
    ProjectiveError projective_error(std::span<const double> estimate, std::span<const std::uint8_t> estimate_valid,
                                     std::span<const double> reference, std::span<const std::uint8_t> reference_valid,
                                     std::size_t width, std::size_t height, unsigned erosion = 0);

    // Ground truth resampled onto a radar grid.
    struct GroundTruth
    {
        GridGeometry geometry;
        std::vector<double> depth;
        std::vector<std::uint8_t> valid;
        std::vector<Vec3> points;
    };

    // Surfaces are sampled at pixel centers; random clouds use their target
    // positions as the point set and splat the nearest target (smallest z)
    // into the depth map.
    GroundTruth resample_ground_truth(const SceneSpec &spec, const GridGeometry &geometry);

    std::vector<Vec3> image_points(const RadarImage &image);

    inline constexpr unsigned kDefaultErosion = 1;

    struct EvalReport
    {
        double chamfer_gt_to_radar = 0.0;
        double chamfer_radar_to_gt = 0.0;
        double projective_masked = 0.0;
        double projective_eroded = 0.0;
        std::size_t radar_points = 0;
        std::size_t gt_points = 0;
        std::size_t masked_pixels = 0;
        std::size_t eroded_pixels = 0;
    };

    EvalReport evaluate(const RadarImage &image, const GroundTruth &truth, unsigned erosion = kDefaultErosion);

} // namespace mmfsk

#endif
