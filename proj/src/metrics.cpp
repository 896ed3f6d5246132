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

#include "mmfsk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mmfsk
{
    namespace
    {
        void require_finite(std::span<const Vec3> pts, const char *what)
        {
            for (const Vec3 &p : pts)
                if (!p.finite())
                    fail(ErrorKind::validation, std::string(what) + " contains a non-finite point");
        }
    } // namespace

    NearestNeighborIndex::NearestNeighborIndex(std::span<const Vec3> points)
    {
        if (points.empty())
            fail(ErrorKind::insufficient_data, "nearest-neighbour index needs at least one point");
        if (points.size() >= std::numeric_limits<std::uint32_t>::max())
            fail(ErrorKind::validation, "too many points for the nearest-neighbour index");
        require_finite(points, "point set");

        Vec3 lo = points[0], hi = points[0];
        for (const Vec3 &p : points)
        {
            lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
            hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
        }
        origin_ = lo;
        const double L[3] = {hi.x - lo.x, hi.y - lo.y, hi.z - lo.z};
        const double span = std::max({L[0], L[1], L[2]});
        const std::size_t n = points.size();

        auto cells_for = [&](double h, std::size_t dims[3])
        {
            double total = 1.0;
            for (int a = 0; a < 3; ++a)
            {
                dims[a] = std::size_t(std::floor(L[a] / h)) + 1;
                total *= double(dims[a]);
            }
            return total;
        };

        cell_ = span > 0.0 ? span : 1.0;
        std::size_t dims[3];
        cells_for(cell_, dims);
        for (int it = 0; it < 64; ++it)
        {
            std::size_t trial[3];
            if (cells_for(cell_ * 0.5, trial) > double(n))
                break;
            cell_ *= 0.5;
            std::copy(trial, trial + 3, dims);
        }
        nx_ = dims[0];
        ny_ = dims[1];
        nz_ = dims[2];

        const std::size_t ncell = nx_ * ny_ * nz_;
        std::vector<std::uint32_t> key(n);
        cell_start_.assign(ncell + 1, 0);
        for (std::size_t i = 0; i < n; ++i)
        {
            const std::size_t ix = clamp_cell(points[i].x, origin_.x, nx_);
            const std::size_t iy = clamp_cell(points[i].y, origin_.y, ny_);
            const std::size_t iz = clamp_cell(points[i].z, origin_.z, nz_);
            key[i] = std::uint32_t((iz * ny_ + iy) * nx_ + ix);
            ++cell_start_[key[i] + 1];
        }
        for (std::size_t c = 0; c < ncell; ++c)
            cell_start_[c + 1] += cell_start_[c];
        points_.resize(n);
        std::vector<std::uint32_t> fill(cell_start_.begin(), cell_start_.end() - 1);
        for (std::size_t i = 0; i < n; ++i)
            points_[fill[key[i]]++] = points[i];
    }

    std::size_t NearestNeighborIndex::clamp_cell(double coord, double origin, std::size_t n) const
    {
        const double c = std::floor((coord - origin) / cell_);
        if (!(c > 0.0))
            return 0;
        return std::min(std::size_t(c), n - 1);
    }

    double NearestNeighborIndex::nearest_distance(const Vec3 &q) const
    {
        const long cx = long(clamp_cell(q.x, origin_.x, nx_));
        const long cy = long(clamp_cell(q.y, origin_.y, ny_));
        const long cz = long(clamp_cell(q.z, origin_.z, nz_));
        const long max_ring = long(std::max({nx_, ny_, nz_}));
        double best2 = std::numeric_limits<double>::infinity();

        auto scan = [&](long ix, long iy, long iz)
        {
            if (ix < 0 || iy < 0 || iz < 0 || ix >= long(nx_) || iy >= long(ny_) || iz >= long(nz_))
                return;
            const std::size_t c = (std::size_t(iz) * ny_ + std::size_t(iy)) * nx_ + std::size_t(ix);
            for (std::uint32_t i = cell_start_[c]; i < cell_start_[c + 1]; ++i)
            {
                const Vec3 d = points_[i] - q;
                best2 = std::min(best2, d.dot(d));
            }
        };

        for (long r = 0; r <= max_ring; ++r)
        {
            for (long dz = -r; dz <= r; ++dz)
                for (long dy = -r; dy <= r; ++dy)
                {
                    const bool face = std::abs(dz) == r || std::abs(dy) == r;
                    if (face)
                        for (long dx = -r; dx <= r; ++dx)
                            scan(cx + dx, cy + dy, cz + dz);
                    else
                    {
                        scan(cx - r, cy + dy, cz + dz);
                        if (r > 0)
                            scan(cx + r, cy + dy, cz + dz);
                    }
                }
            const double reach = double(r) * cell_;
            if (best2 <= reach * reach)
                break;
        }
        return std::sqrt(best2);
    }

    double chamfer_one_way(std::span<const Vec3> from, std::span<const Vec3> to)
    {
        if (from.empty() || to.empty())
            fail(ErrorKind::insufficient_data, "Chamfer distance needs two non-empty point sets");
        require_finite(from, "point set");
        const NearestNeighborIndex index(to);
        double sum = 0.0;
        for (const Vec3 &p : from)
            sum += index.nearest_distance(p);
        return sum / double(from.size());
    }

    double chamfer_one_way_brute(std::span<const Vec3> from, std::span<const Vec3> to)
    {
        if (from.empty() || to.empty())
            fail(ErrorKind::insufficient_data, "Chamfer distance needs two non-empty point sets");
        double sum = 0.0;
        for (const Vec3 &p : from)
        {
            double best = std::numeric_limits<double>::infinity();
            for (const Vec3 &q : to)
                best = std::min(best, distance(p, q));
            sum += best;
        }
        return sum / double(from.size());
    }

    std::vector<std::uint8_t> erode_mask(std::span<const std::uint8_t> mask, std::size_t width, std::size_t height,
                                         unsigned iterations)
    {
        if (mask.size() != width * height)
            fail(ErrorKind::structural, "mask size does not match its dimensions");
        std::vector<std::uint8_t> cur(mask.begin(), mask.end()), next(cur.size());
        for (unsigned it = 0; it < iterations; ++it)
        {
            for (std::size_t v = 0; v < height; ++v)
                for (std::size_t u = 0; u < width; ++u)
                {
                    const std::size_t i = v * width + u;
                    next[i] = cur[i] && u > 0 && cur[i - 1] && u + 1 < width && cur[i + 1] && v > 0 &&
                              cur[i - width] && v + 1 < height && cur[i + width];
                }
            cur.swap(next);
        }
        return cur;
    }

    ProjectiveError projective_error(std::span<const double> estimate, std::span<const std::uint8_t> estimate_valid,
                                     std::span<const double> reference, std::span<const std::uint8_t> reference_valid,
                                     std::size_t width, std::size_t height, unsigned erosion)
    {
        const std::size_t n = width * height;
        if (estimate.size() != n || estimate_valid.size() != n || reference.size() != n || reference_valid.size() != n)
            fail(ErrorKind::structural, "depth maps must share one grid");
        std::vector<std::uint8_t> joint(n);
        for (std::size_t i = 0; i < n; ++i)
            joint[i] = estimate_valid[i] && reference_valid[i] && std::isfinite(estimate[i]) &&
                       std::isfinite(reference[i]);
        joint = erode_mask(joint, width, height, erosion);

        ProjectiveError e;
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (joint[i])
            {
                sum += std::abs(estimate[i] - reference[i]);
                ++e.pixels;
            }
        if (e.pixels == 0)
            fail(ErrorKind::insufficient_data, "no pixel is valid in both depth maps");
        e.mean_abs = sum / double(e.pixels);
        return e;
    }

    GroundTruth resample_ground_truth(const SceneSpec &spec, const GridGeometry &geometry)
    {
        spec.validate();
        geometry.validate();
        GroundTruth gt;
        gt.geometry = geometry;
        gt.depth.assign(geometry.size(), std::numeric_limits<double>::quiet_NaN());
        gt.valid.assign(geometry.size(), 0);

        if (has_surface(spec))
        {
            for (std::size_t v = 0; v < geometry.height; ++v)
                for (std::size_t u = 0; u < geometry.width; ++u)
                {
                    const double x = geometry.x(u), y = geometry.y(v);
                    const auto z = surface_depth(spec, x, y);
                    if (!z)
                        continue;
                    const std::size_t i = v * geometry.width + u;
                    gt.depth[i] = *z;
                    gt.valid[i] = 1;
                    gt.points.push_back({x, y, *z});
                }
        }
        else
        {
            for (const Target &t : make_scene(spec).targets)
            {
                gt.points.push_back(t.position);
                const double fu = std::round(geometry.u_of(t.position.x));
                const double fv = std::round(geometry.v_of(t.position.y));
                if (fu < 0.0 || fv < 0.0 || fu >= double(geometry.width) || fv >= double(geometry.height))
                    continue;
                const std::size_t i = std::size_t(fv) * geometry.width + std::size_t(fu);
                if (!gt.valid[i] || t.position.z < gt.depth[i])
                {
                    gt.depth[i] = t.position.z;
                    gt.valid[i] = 1;
                }
            }
        }
        if (gt.points.empty())
            fail(ErrorKind::insufficient_data, "ground truth has no point inside the radar grid");
        return gt;
    }

    std::vector<Vec3> image_points(const RadarImage &image)
    {
        std::vector<Vec3> pts;
        const GridGeometry &g = image.geometry;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (image.valid[i] && std::isfinite(image.depth[i]))
                pts.push_back({g.x(i % g.width), g.y(i / g.width), image.depth[i]});
        return pts;
    }

    EvalReport evaluate(const RadarImage &image, const GroundTruth &truth, unsigned erosion)
    {
        if (!(image.geometry == truth.geometry))
            fail(ErrorKind::structural, "image and ground truth use different grids");
        const std::vector<Vec3> radar = image_points(image);
        if (radar.empty())
            fail(ErrorKind::empty_image, "radar image has no valid pixel");

        EvalReport rep;
        rep.radar_points = radar.size();
        rep.gt_points = truth.points.size();
        rep.chamfer_gt_to_radar = chamfer_one_way(truth.points, radar);
        rep.chamfer_radar_to_gt = chamfer_one_way(radar, truth.points);
        const std::size_t W = image.geometry.width, H = image.geometry.height;
        const ProjectiveError masked = projective_error(image.depth, image.valid, truth.depth, truth.valid, W, H, 0);
        rep.projective_masked = masked.mean_abs;
        rep.masked_pixels = masked.pixels;
        try
        {
            const ProjectiveError e = projective_error(image.depth, image.valid, truth.depth, truth.valid, W, H, erosion);
            rep.projective_eroded = e.mean_abs;
            rep.eroded_pixels = e.pixels;
        }
        catch (const Error &err)
        {
            if (err.kind() != ErrorKind::insufficient_data)
                throw;
            rep.projective_eroded = std::numeric_limits<double>::quiet_NaN();
        }
        return rep;
    }

} // namespace mmfsk
