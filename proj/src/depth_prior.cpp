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

#include "mmfsk/depth_prior.hpp"
#include "mmfsk/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace mmfsk
{
    // ---------------------------------------------------------------- camera

    void CameraIntrinsics::validate() const
    {
        if (!(fu > 0.0) || !(fv > 0.0) || !std::isfinite(fu) || !std::isfinite(fv))
            fail(ErrorKind::validation, "focal lengths must be positive");
        if (!std::isfinite(cu) || !std::isfinite(cv))
            fail(ErrorKind::validation, "principal point must be finite");
    }

    void Extrinsics::validate() const
    {
        const auto &m = rotation;
        for (double x : m)
            if (!std::isfinite(x))
                fail(ErrorKind::validation, "rotation must be finite");
        if (!translation.finite())
            fail(ErrorKind::validation, "translation must be finite");
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
            {
                double s = 0.0;
                for (int k = 0; k < 3; ++k)
                    s += m[3 * k + i] * m[3 * k + j];
                if (std::abs(s - (i == j ? 1.0 : 0.0)) > 1e-9)
                    fail(ErrorKind::validation, "rotation is not orthonormal");
            }
        const double det = m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
                           m[2] * (m[3] * m[7] - m[4] * m[6]);
        if (std::abs(det - 1.0) > 1e-9)
            fail(ErrorKind::validation, "rotation must have determinant +1");
    }

    Vec3 Extrinsics::rotate(const Vec3 &p) const
    {
        const auto &m = rotation;
        return {m[0] * p.x + m[1] * p.y + m[2] * p.z, m[3] * p.x + m[4] * p.y + m[5] * p.z,
                m[6] * p.x + m[7] * p.y + m[8] * p.z};
    }

    Vec3 Extrinsics::apply(const Vec3 &p) const { return rotate(p) + translation; }

    Extrinsics Extrinsics::from_axis_angle(const Vec3 &axis, double angle, const Vec3 &translation)
    {
        const double n = axis.norm();
        if (!(n > 0.0))
            fail(ErrorKind::validation, "rotation axis must be non-zero");
        const double x = axis.x / n, y = axis.y / n, z = axis.z / n;
        const double c = std::cos(angle), s = std::sin(angle), C = 1.0 - c;
        Extrinsics e;
        e.rotation = {c + x * x * C,     x * y * C - z * s, x * z * C + y * s,
                      y * x * C + z * s, c + y * y * C,     y * z * C - x * s,
                      z * x * C - y * s, z * y * C + x * s, c + z * z * C};
        e.translation = translation;
        return e;
    }

    OpticalDepthMap::OpticalDepthMap(std::size_t w, std::size_t h)
        : width(w), height(h), depth(w * h, std::numeric_limits<double>::quiet_NaN()), valid(w * h, 0)
    {
    }

    std::size_t OpticalDepthMap::valid_count() const noexcept
    {
        return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
    }

    void OpticalDepthMap::validate() const
    {
        if (depth.size() != width * height || valid.size() != width * height)
            fail(ErrorKind::structural, "depth map buffers do not match its dimensions");
        if (width >= (1u << 20) || height >= (1u << 20))
            fail(ErrorKind::validation, "depth map is too large");
    }

    void TriangleMesh::validate() const
    {
        if (source_pixels.size() != vertices.size())
            fail(ErrorKind::structural, "mesh needs one source pixel per vertex");
        for (const auto &tri : triangles)
            for (std::int32_t v : tri)
                if (v < 0 || std::size_t(v) >= vertices.size())
                    fail(ErrorKind::structural, "triangle references a missing vertex");
    }

    TriangleMesh backproject_depth(const OpticalDepthMap &map, const CameraIntrinsics &intr)
    {
        map.validate();
        intr.validate();
        TriangleMesh mesh;
        for (std::size_t v = 0; v < map.height; ++v)
            for (std::size_t u = 0; u < map.width; ++u)
            {
                const std::size_t i = v * map.width + u;
                if (!map.valid[i])
                    continue;
                const double d = map.depth[i];
                if (!std::isfinite(d) || !(d > 0.0))
                    fail(ErrorKind::validation, "valid depth samples must be positive and finite");
                mesh.vertices.push_back({(double(u) - intr.cu) * d / intr.fu, (double(v) - intr.cv) * d / intr.fv, d});
                mesh.source_pixels.push_back({std::int32_t(u), std::int32_t(v)});
            }
        if (mesh.vertices.size() < 3)
            fail(ErrorKind::insufficient_data, "depth map has fewer than three valid pixels");
        return mesh;
    }

    // ------------------------------------------------------------- Delaunay

    namespace
    {
        constexpr std::int32_t kGhost = -1;

        struct Tri
        {
            std::array<std::int32_t, 3> v;   // counter-clockwise; ghost vertex last
            std::array<std::int32_t, 3> nbr; // nbr[i] lies across the edge opposite v[i]
            std::uint32_t mark = 0;
            bool alive = true;

            bool ghost() const { return v[2] == kGhost; }
        };

        std::int64_t orient(const Pixel &a, const Pixel &b, const Pixel &c)
        {
            return std::int64_t(b.u - a.u) * (c.v - a.v) - std::int64_t(b.v - a.v) * (c.u - a.u);
        }

        // > 0 when d is strictly inside the circle through counter-clockwise a, b, c.
        __int128 incircle(const Pixel &a, const Pixel &b, const Pixel &c, const Pixel &d)
        {
            const __int128 adx = a.u - d.u, ady = a.v - d.v;
            const __int128 bdx = b.u - d.u, bdy = b.v - d.v;
            const __int128 cdx = c.u - d.u, cdy = c.v - d.v;
            return (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy) +
                   (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
        }

        class Triangulator
        {
          public:
            explicit Triangulator(std::span<const Pixel> pts) : pts_(pts) {}

            std::vector<std::array<std::int32_t, 3>> run()
            {
                const std::size_t n = pts_.size();
                if (n < 3)
                    fail(ErrorKind::insufficient_data, "triangulation needs at least three points");
                for (const Pixel &p : pts_)
                    if (std::abs(p.u) >= (1 << 20) || std::abs(p.v) >= (1 << 20))
                        fail(ErrorKind::validation, "pixel coordinate out of range");

                std::size_t a = 0, b = n, c = n;
                for (std::size_t i = 1; i < n && b == n; ++i)
                    if (!(pts_[i] == pts_[a]))
                        b = i;
                for (std::size_t i = 1; b != n && i < n && c == n; ++i)
                    if (orient(pts_[a], pts_[b], pts_[i]) != 0)
                        c = i;
                if (c == n)
                    fail(ErrorKind::degenerate_geometry, "all points are collinear");
                tris_.reserve(2 * n + 8);
                seed(std::int32_t(a), std::int32_t(b), std::int32_t(c));

                for (std::size_t i = 0; i < n; ++i)
                    if (i != a && i != b && i != c)
                        insert(std::int32_t(i));

                std::vector<std::array<std::int32_t, 3>> out;
                for (const Tri &t : tris_)
                    if (t.alive && !t.ghost())
                        out.push_back(t.v);
                return out;
            }

          private:
            std::span<const Pixel> pts_;
            std::vector<Tri> tris_;
            std::vector<std::int32_t> free_;
            std::int32_t last_ = 0;
            std::uint32_t epoch_ = 0;
            std::vector<std::int32_t> cavity_, stack_;

            std::int32_t create(std::array<std::int32_t, 3> v)
            {
                Tri t;
                t.v = v;
                t.nbr = {-1, -1, -1};
                if (!free_.empty())
                {
                    const std::int32_t id = free_.back();
                    free_.pop_back();
                    tris_[id] = t;
                    return id;
                }
                tris_.push_back(t);
                return std::int32_t(tris_.size() - 1);
            }

            // Slot of the edge {x, y} in triangle t (the index of the opposite vertex).
            static int edge_slot(const Tri &t, std::int32_t x, std::int32_t y)
            {
                for (int i = 0; i < 3; ++i)
                {
                    const std::int32_t p = t.v[(i + 1) % 3], q = t.v[(i + 2) % 3];
                    if ((p == x && q == y) || (p == y && q == x))
                        return i;
                }
                fail(ErrorKind::numerical, "triangulation adjacency is inconsistent");
            }

            void link(std::int32_t t1, std::int32_t t2, std::int32_t x, std::int32_t y)
            {
                tris_[t1].nbr[edge_slot(tris_[t1], x, y)] = t2;
                tris_[t2].nbr[edge_slot(tris_[t2], x, y)] = t1;
            }

            void seed(std::int32_t a, std::int32_t b, std::int32_t c)
            {
                if (orient(pts_[a], pts_[b], pts_[c]) < 0)
                    std::swap(b, c);
                const std::int32_t t0 = create({a, b, c});
                const std::int32_t g_ab = create({b, a, kGhost});
                const std::int32_t g_bc = create({c, b, kGhost});
                const std::int32_t g_ca = create({a, c, kGhost});
                link(t0, g_ab, a, b);
                link(t0, g_bc, b, c);
                link(t0, g_ca, c, a);
                link(g_ab, g_bc, b, kGhost);
                link(g_bc, g_ca, c, kGhost);
                link(g_ca, g_ab, a, kGhost);
                last_ = t0;
            }

            bool conflicts(const Tri &t, const Pixel &p) const
            {
                const Pixel &a = pts_[t.v[0]], &b = pts_[t.v[1]];
                if (t.ghost())
                {
                    const std::int64_t o = orient(a, b, p);
                    if (o > 0)
                        return true;
                    if (o < 0)
                        return false;
                    const std::int64_t d1 = std::int64_t(p.u - a.u) * (b.u - a.u) + std::int64_t(p.v - a.v) * (b.v - a.v);
                    const std::int64_t d2 = std::int64_t(p.u - b.u) * (a.u - b.u) + std::int64_t(p.v - b.v) * (a.v - b.v);
                    return d1 > 0 && d2 > 0;
                }
                return incircle(a, b, pts_[t.v[2]], p) > 0;
            }

            // Visibility walk from the last created real triangle. Returns a
            // conflicting triangle, or -1 when p duplicates an existing vertex.
            std::int32_t locate(const Pixel &p)
            {
                std::int32_t cur = last_;
                if (!tris_[cur].alive || tris_[cur].ghost())
                    for (std::size_t i = 0; i < tris_.size(); ++i)
                        if (tris_[i].alive && !tris_[i].ghost())
                        {
                            cur = std::int32_t(i);
                            break;
                        }
                const std::size_t limit = 4 * tris_.size() + 16;
                unsigned rot = 0;
                for (std::size_t step = 0; step < limit; ++step)
                {
                    const Tri &t = tris_[cur];
                    if (t.ghost())
                        return cur;
                    std::int32_t next = -1;
                    for (int j = 0; j < 3; ++j)
                    {
                        const int i = int((j + rot) % 3);
                        if (orient(pts_[t.v[(i + 1) % 3]], pts_[t.v[(i + 2) % 3]], p) < 0)
                        {
                            next = t.nbr[i];
                            break;
                        }
                    }
                    ++rot;
                    if (next < 0)
                    {
                        for (std::int32_t vi : t.v)
                            if (pts_[vi] == p)
                                return -1;
                        return cur;
                    }
                    cur = next;
                }
                for (std::size_t i = 0; i < tris_.size(); ++i)
                    if (tris_[i].alive && conflicts(tris_[i], p))
                    {
                        for (std::int32_t vi : tris_[i].v)
                            if (vi != kGhost && pts_[vi] == p)
                                return -1;
                        return std::int32_t(i);
                    }
                fail(ErrorKind::numerical, "point location failed");
            }

            void insert(std::int32_t pi)
            {
                const Pixel &p = pts_[pi];
                const std::int32_t start = locate(p);
                if (start < 0)
                    return;

                ++epoch_;
                cavity_.clear();
                stack_.assign(1, start);
                tris_[start].mark = epoch_;
                while (!stack_.empty())
                {
                    const std::int32_t t = stack_.back();
                    stack_.pop_back();
                    cavity_.push_back(t);
                    for (std::int32_t nb : tris_[t].nbr)
                        if (tris_[nb].mark != epoch_ && conflicts(tris_[nb], p))
                        {
                            tris_[nb].mark = epoch_;
                            stack_.push_back(nb);
                        }
                }

                struct Boundary
                {
                    std::int32_t a, b, outer;
                };
                std::vector<Boundary> boundary;
                for (std::int32_t t : cavity_)
                    for (int i = 0; i < 3; ++i)
                    {
                        const std::int32_t nb = tris_[t].nbr[i];
                        if (tris_[nb].mark != epoch_)
                            boundary.push_back({tris_[t].v[(i + 1) % 3], tris_[t].v[(i + 2) % 3], nb});
                    }
                for (std::int32_t t : cavity_)
                {
                    tris_[t].alive = false;
                    tris_[t].mark = 0;
                    free_.push_back(t);
                }

                std::unordered_map<std::int32_t, std::int32_t> by_start;
                by_start.reserve(boundary.size() * 2);
                std::vector<std::int32_t> created;
                created.reserve(boundary.size());
                for (const Boundary &e : boundary)
                {
                    std::array<std::int32_t, 3> v{e.a, e.b, pi};
                    if (e.a == kGhost)
                        v = {e.b, pi, kGhost};
                    else if (e.b == kGhost)
                        v = {pi, e.a, kGhost};
                    const std::int32_t id = create(v);
                    Tri &nt = tris_[id];
                    nt.nbr[edge_slot(nt, e.a, e.b)] = e.outer;
                    Tri &outer = tris_[e.outer];
                    outer.nbr[edge_slot(outer, e.a, e.b)] = id;
                    by_start[e.a] = id;
                    created.push_back(id);
                    if (e.a != kGhost && e.b != kGhost)
                        last_ = id;
                }
                for (std::size_t j = 0; j < boundary.size(); ++j)
                {
                    const auto it = by_start.find(boundary[j].b);
                    if (it == by_start.end())
                        fail(ErrorKind::numerical, "cavity boundary is not closed");
                    link(created[j], it->second, boundary[j].b, pi);
                }
            }
        };
    } // namespace

    std::vector<std::array<std::int32_t, 3>> delaunay_triangulate(std::span<const Pixel> pixels)
    {
        return Triangulator(pixels).run();
    }

    TriangleMesh triangulate(TriangleMesh points)
    {
        points.validate();
        points.triangles = delaunay_triangulate(points.source_pixels);
        return points;
    }

    TriangleMesh transform_mesh(const TriangleMesh &mesh, const Extrinsics &extrinsics)
    {
        extrinsics.validate();
        mesh.validate();
        TriangleMesh out = mesh;
        for (Vec3 &v : out.vertices)
            v = extrinsics.apply(v);
        return out;
    }

    // ---------------------------------------------------------- rasterizer

    namespace
    {
        struct P2
        {
            double u, v;
        };

        bool lex_less(const P2 &a, const P2 &b) { return a.u < b.u || (a.u == b.u && a.v < b.v); }

        // Edge function of a -> b at q, evaluated with the endpoints in a fixed
        // order so that the reversed edge yields the exact negation.
        double edge_fn(const P2 &a, const P2 &b, double qu, double qv)
        {
            if (lex_less(b, a))
                return -edge_fn(b, a, qu, qv);
            return (b.u - a.u) * (qv - a.v) - (b.v - a.v) * (qu - a.u);
        }

        // Exactly one of the two directions of a shared edge owns its points.
        bool owns_edge(const P2 &a, const P2 &b)
        {
            const double dv = b.v - a.v, du = b.u - a.u;
            return dv > 0.0 || (dv == 0.0 && du < 0.0);
        }
    } // namespace

    CandidateGrid rasterize_prior(const TriangleMesh &mesh, const GridGeometry &geometry, const RasterOptions &options)
    {
        geometry.validate();
        mesh.validate();
        if (options.max_edge_length < 0.0 || !std::isfinite(options.max_edge_length))
            fail(ErrorKind::validation, "max edge length must be non-negative");

        struct Prepared
        {
            std::array<P2, 3> p;
            std::array<double, 3> z;
            double area;
            double umin, umax, vmin, vmax;
        };
        std::vector<Prepared> tris;
        tris.reserve(mesh.triangles.size());
        for (const auto &t : mesh.triangles)
        {
            const Vec3 &a = mesh.vertices[t[0]], &b = mesh.vertices[t[1]], &c = mesh.vertices[t[2]];
            if (!a.finite() || !b.finite() || !c.finite())
                continue;
            if (options.max_edge_length > 0.0 &&
                std::max({distance(a, b), distance(b, c), distance(c, a)}) > options.max_edge_length)
                continue;
            Prepared pr;
            pr.p = {P2{geometry.u_of(a.x), geometry.v_of(a.y)}, P2{geometry.u_of(b.x), geometry.v_of(b.y)},
                    P2{geometry.u_of(c.x), geometry.v_of(c.y)}};
            pr.z = {a.z, b.z, c.z};
            pr.area = edge_fn(pr.p[0], pr.p[1], pr.p[2].u, pr.p[2].v);
            if (pr.area == 0.0 || !std::isfinite(pr.area))
                continue;
            if (pr.area < 0.0)
            {
                std::swap(pr.p[1], pr.p[2]);
                std::swap(pr.z[1], pr.z[2]);
                pr.area = -pr.area;
            }
            pr.umin = std::min({pr.p[0].u, pr.p[1].u, pr.p[2].u});
            pr.umax = std::max({pr.p[0].u, pr.p[1].u, pr.p[2].u});
            pr.vmin = std::min({pr.p[0].v, pr.p[1].v, pr.p[2].v});
            pr.vmax = std::max({pr.p[0].v, pr.p[1].v, pr.p[2].v});
            tris.push_back(pr);
        }

        CandidateGrid grid;
        grid.geometry = geometry;
        grid.prior.assign(geometry.size(), std::numeric_limits<double>::quiet_NaN());
        grid.valid.assign(geometry.size(), 0);
        const double W = double(geometry.width), H = double(geometry.height);

        parallel_ranges(geometry.height, resolve_workers(options.exec), [&](std::size_t row_begin, std::size_t row_end)
        {
            for (const Prepared &t : tris)
            {
                const double v_lo = std::max(std::ceil(t.vmin), double(row_begin));
                const double v_hi = std::min(std::floor(t.vmax), double(row_end) - 1.0);
                const double u_lo = std::max(std::ceil(t.umin), 0.0);
                const double u_hi = std::min(std::floor(t.umax), W - 1.0);
                if (v_lo > v_hi || u_lo > u_hi || v_hi < 0.0 || v_lo >= H)
                    continue;
                for (double qv = v_lo; qv <= v_hi; qv += 1.0)
                    for (double qu = u_lo; qu <= u_hi; qu += 1.0)
                    {
                        double w[3];
                        bool inside = true;
                        for (int e = 0; e < 3 && inside; ++e)
                        {
                            const P2 &a = t.p[(e + 1) % 3], &b = t.p[(e + 2) % 3];
                            w[e] = edge_fn(a, b, qu, qv);
                            inside = w[e] > 0.0 || (w[e] == 0.0 && owns_edge(a, b));
                        }
                        if (!inside)
                            continue;
                        const double z = (w[0] * t.z[0] + w[1] * t.z[1] + w[2] * t.z[2]) / (w[0] + w[1] + w[2]);
                        const std::size_t i = std::size_t(qv) * geometry.width + std::size_t(qu);
                        if (!grid.valid[i] || z < grid.prior[i])
                        {
                            grid.prior[i] = z;
                            grid.valid[i] = 1;
                        }
                    }
            }
        });
        return grid;
    }

    CandidateGrid build_prior(const OpticalDepthMap &map, const CameraIntrinsics &intrinsics,
                              const Extrinsics &extrinsics, const GridGeometry &geometry, const RasterOptions &options)
    {
        extrinsics.validate();
        return rasterize_prior(transform_mesh(triangulate(backproject_depth(map, intrinsics)), extrinsics), geometry,
                               options);
    }

} // namespace mmfsk
