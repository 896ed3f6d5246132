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

#ifndef MMFSK_GEOMETRY_ORACLES_HPP
#define MMFSK_GEOMETRY_ORACLES_HPP

// Brute-force geometry references shared by the unit and acceptance tests.
// Integer predicates are exact for coordinates below 2^20.

#include "mmfsk/depth_prior.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <vector>

namespace test_support
{
    inline std::int64_t orient(const mmfsk::Pixel &a, const mmfsk::Pixel &b, const mmfsk::Pixel &c)
    {
        return std::int64_t(b.u - a.u) * (c.v - a.v) - std::int64_t(b.v - a.v) * (c.u - a.u);
    }

    // > 0 when d lies strictly inside the circumcircle of the
    // counter-clockwise triangle (a, b, c).
    inline std::int64_t in_circle(const mmfsk::Pixel &a, const mmfsk::Pixel &b, const mmfsk::Pixel &c,
                                  const mmfsk::Pixel &d)
    {
        const std::int64_t ax = a.u - d.u, ay = a.v - d.v;
        const std::int64_t bx = b.u - d.u, by = b.v - d.v;
        const std::int64_t cx = c.u - d.u, cy = c.v - d.v;
        const std::int64_t a2 = ax * ax + ay * ay, b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
        return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
    }

    // Twice the convex hull area (Andrew's monotone chain).
    inline std::int64_t hull_area2(std::vector<mmfsk::Pixel> pts)
    {
        std::sort(pts.begin(), pts.end(),
                  [](const mmfsk::Pixel &a, const mmfsk::Pixel &b) { return a.u < b.u || (a.u == b.u && a.v < b.v); });
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        if (pts.size() < 3)
            return 0;
        std::vector<mmfsk::Pixel> h(2 * pts.size());
        std::size_t k = 0;
        for (std::size_t i = 0; i < pts.size(); ++i)
        {
            while (k >= 2 && orient(h[k - 2], h[k - 1], pts[i]) <= 0)
                --k;
            h[k++] = pts[i];
        }
        for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;)
        {
            while (k >= t && orient(h[k - 2], h[k - 1], pts[i]) <= 0)
                --k;
            h[k++] = pts[i];
        }
        h.resize(k - 1);
        std::int64_t area = 0;
        for (std::size_t i = 0; i < h.size(); ++i)
        {
            const mmfsk::Pixel &p = h[i], &q = h[(i + 1) % h.size()];
            area += std::int64_t(p.u) * q.v - std::int64_t(q.u) * p.v;
        }
        return area;
    }

    // Empty string when `tris` is a Delaunay triangulation of `pts`: every
    // triangle is counter-clockwise, no input point lies strictly inside a
    // circumcircle, the triangles tile the convex hull, and every distinct
    // point is a vertex. Otherwise a description of the first violation.
    inline std::string delaunay_violation(const std::vector<mmfsk::Pixel> &pts,
                                          const std::vector<std::array<std::int32_t, 3>> &tris)
    {
        std::int64_t area = 0;
        std::set<std::int32_t> used;
        for (std::size_t n = 0; n < tris.size(); ++n)
        {
            const auto &t = tris[n];
            for (int j = 0; j < 3; ++j)
            {
                if (t[j] < 0 || std::size_t(t[j]) >= pts.size())
                    return "triangle " + std::to_string(n) + " has an out-of-range index";
                used.insert(t[j]);
            }
            const std::int64_t o = orient(pts[t[0]], pts[t[1]], pts[t[2]]);
            if (o <= 0)
                return "triangle " + std::to_string(n) + " is not counter-clockwise";
            area += o;
            for (std::size_t i = 0; i < pts.size(); ++i)
            {
                if (pts[i] == pts[t[0]] || pts[i] == pts[t[1]] || pts[i] == pts[t[2]])
                    continue;
                if (in_circle(pts[t[0]], pts[t[1]], pts[t[2]], pts[i]) > 0)
                    return "point " + std::to_string(i) + " lies inside the circumcircle of triangle " +
                           std::to_string(n);
            }
        }
        if (area != hull_area2(pts))
            return "triangles do not tile the convex hull";
        std::set<std::pair<std::int32_t, std::int32_t>> distinct;
        for (const mmfsk::Pixel &p : pts)
            distinct.insert({p.u, p.v});
        if (used.size() != distinct.size())
            return "not every distinct point is a vertex";
        return {};
    }

    // Mean nearest-neighbour distance in extended precision by full scan.
    inline double brute_chamfer(const std::vector<mmfsk::Vec3> &from, const std::vector<mmfsk::Vec3> &to)
    {
        long double sum = 0.0L;
        for (const mmfsk::Vec3 &p : from)
        {
            long double best = std::numeric_limits<long double>::infinity();
            for (const mmfsk::Vec3 &q : to)
            {
                const long double dx = (long double)p.x - q.x, dy = (long double)p.y - q.y,
                                  dz = (long double)p.z - q.z;
                best = std::min(best, dx * dx + dy * dy + dz * dz);
            }
            sum += std::sqrt(best);
        }
        return double(sum / (long double)from.size());
    }
} // namespace test_support

#endif
