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

#ifndef MMFSK_DEPTH_PRIOR_HPP
#define MMFSK_DEPTH_PRIOR_HPP

#include "mmfsk/camera.hpp"
#include "mmfsk/correlate.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace mmfsk
{
    struct Pixel
    {
        std::int32_t u = 0, v = 0;
        bool operator==(const Pixel &) const = default;
    };

    struct TriangleMesh
    {
        std::vector<Vec3> vertices;
        std::vector<Pixel> source_pixels; // one per vertex
        std::vector<std::array<std::int32_t, 3>> triangles;

        void validate() const;
    };

    // One camera-frame point per valid pixel, p = K^-1 (u d, v d, d).
    // Invalid pixels are skipped. Throws insufficient_data below three points.
    TriangleMesh backproject_depth(const OpticalDepthMap &map, const CameraIntrinsics &intrinsics);

    // 2D Delaunay triangulation of integer pixel positions. Exact predicates;
    // the result covers the convex hull. Duplicate positions are kept once
    // (later copies are ignored). Triangles are counter-clockwise in (u, v).
    // Throws insufficient_data for < 3 points and degenerate_geometry when
    // all points are collinear. Coordinates must satisfy |u|, |v| < 2^20.
    std::vector<std::array<std::int32_t, 3>> delaunay_triangulate(std::span<const Pixel> pixels);

    // Triangulates the mesh vertices by their source pixels (topology only).
    TriangleMesh triangulate(TriangleMesh points);

    TriangleMesh transform_mesh(const TriangleMesh &mesh, const Extrinsics &extrinsics);

    struct RasterOptions
    {
        double max_edge_length = 0.0; // meters; 0 keeps every triangle
        Execution exec;
    };

    // Orthographic rendering onto the radar pixel grid: a pixel is covered when
    // its center lies inside a triangle's (x, y) projection (top-left rule on
    // shared edges); its prior is the barycentric z of the front-most covering
    // triangle. Uncovered pixels are invalid.
    CandidateGrid rasterize_prior(const TriangleMesh &mesh, const GridGeometry &geometry,
                                  const RasterOptions &options = {});

    // backproject_depth -> triangulate -> transform_mesh -> rasterize_prior
    CandidateGrid build_prior(const OpticalDepthMap &map, const CameraIntrinsics &intrinsics,
                              const Extrinsics &extrinsics, const GridGeometry &geometry,
                              const RasterOptions &options = {});

} // namespace mmfsk

#endif
