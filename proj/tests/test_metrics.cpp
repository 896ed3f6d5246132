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

#include <catch2/catch_amalgamated.hpp>

#include "mmfsk/metrics.hpp"
#include "geometry_oracles.hpp"
#include "test_support.hpp"

#include <cmath>
#include <limits>

using namespace mmfsk;
using test_support::brute_chamfer;
using test_support::Rng;

namespace
{
    ErrorKind kind_of(auto &&fn)
    {
        try
        {
            fn();
        }
        catch (const Error &e)
        {
            return e.kind();
        }
        FAIL("expected an mmfsk::Error");
        return ErrorKind::numerical;
    }

    std::vector<Vec3> random_cloud(Rng &rng, std::size_t n, double spread)
    {
        std::vector<Vec3> pts(n);
        for (Vec3 &p : pts)
            p = rng.point(-spread, spread);
        return pts;
    }

    GridGeometry grid_of(std::size_t w, std::size_t h, double pitch)
    {
        GridGeometry g;
        g.width = w;
        g.height = h;
        g.pitch_x = g.pitch_y = pitch;
        return g;
    }
} // namespace

// ================================================================================================
// Chamfer distance

TEST_CASE("Metrics - Chamfer of identical clouds is zero")
{
    Rng rng(61);
    const auto a = random_cloud(rng, 500, 0.1);
    REQUIRE(chamfer_one_way(a, a) == 0.0);
}

TEST_CASE("Metrics - Chamfer unit example")
{
    const std::vector<Vec3> from = {{0, 0, 0}, {1, 0, 0}};
    const std::vector<Vec3> to = {{0, 0, 1}, {1, 0, 1}, {5, 5, 5}};
    REQUIRE(chamfer_one_way(from, to) == Catch::Approx(1.0).epsilon(1e-15));
    REQUIRE(chamfer_one_way_brute(from, to) == Catch::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("Metrics - Chamfer matches a brute-force oracle")
{
    Rng rng(62);
    for (int trial = 0; trial < 12; ++trial)
    {
        const std::size_t n = 1 + rng.index(2000), m = 1 + rng.index(2000);
        // mix of dense and very anisotropic clouds to exercise the grid index
        auto a = random_cloud(rng, n, 0.1);
        auto b = random_cloud(rng, m, trial % 2 ? 0.1 : 0.02);
        if (trial % 3 == 0)
            for (Vec3 &p : b)
                p.z = 0.3;
        CAPTURE(trial, n, m);
        const double oracle = brute_chamfer(a, b);
        REQUIRE(std::abs(chamfer_one_way(a, b) - oracle) <= 1e-12);
        REQUIRE(std::abs(chamfer_one_way_brute(a, b) - oracle) <= 1e-12);
    }
}

TEST_CASE("Metrics - Chamfer shrinks when the target set grows")
{
    Rng rng(63);
    for (int trial = 0; trial < 10; ++trial)
    {
        const auto a = random_cloud(rng, 300, 0.1);
        auto b = random_cloud(rng, 200, 0.1);
        const double before = chamfer_one_way(a, b);
        const auto extra = random_cloud(rng, 100, 0.1);
        b.insert(b.end(), extra.begin(), extra.end());
        REQUIRE(chamfer_one_way(a, b) <= before);
    }
}

TEST_CASE("Metrics - Chamfer is non-negative and zero on subsets")
{
    Rng rng(64);
    const auto b = random_cloud(rng, 400, 0.1);
    const std::vector<Vec3> a(b.begin(), b.begin() + 100);
    REQUIRE(chamfer_one_way(a, b) == 0.0);
    REQUIRE(chamfer_one_way(b, a) > 0.0);
}

TEST_CASE("Metrics - Nearest-neighbour index agrees with a scan")
{
    Rng rng(65);
    const auto pts = random_cloud(rng, 1500, 0.05);
    const NearestNeighborIndex index(pts);
    for (int q = 0; q < 500; ++q)
    {
        // queries far outside the bounding box probe the clamped cells
        const Vec3 p = rng.point(-0.3, 0.3);
        double best = std::numeric_limits<double>::infinity();
        for (const Vec3 &s : pts)
            best = std::min(best, distance(p, s));
        REQUIRE(std::abs(index.nearest_distance(p) - best) <= 1e-15);
    }
    const std::vector<Vec3> one = {{1, 2, 3}};
    REQUIRE(NearestNeighborIndex(one).nearest_distance({1, 2, 5}) == 2.0);
}

TEST_CASE("Metrics - Chamfer errors")
{
    const std::vector<Vec3> empty, one = {{0, 0, 0}};
    REQUIRE(kind_of([&] { chamfer_one_way(empty, one); }) == ErrorKind::insufficient_data);
    REQUIRE(kind_of([&] { chamfer_one_way(one, empty); }) == ErrorKind::insufficient_data);
    const std::vector<Vec3> bad = {{std::nan(""), 0, 0}};
    REQUIRE(kind_of([&] { chamfer_one_way(one, bad); }) == ErrorKind::validation);
}

// ================================================================================================
// Projective error

TEST_CASE("Metrics - Projective error of equal and offset maps")
{
    const std::size_t W = 10, H = 8;
    std::vector<double> ref(W * H), est(W * H);
    std::vector<std::uint8_t> valid(W * H, 1);
    Rng rng(66);
    for (std::size_t i = 0; i < W * H; ++i)
    {
        ref[i] = rng.uniform(0.25, 0.35);
        est[i] = ref[i] + 0.002;
    }
    REQUIRE(projective_error(ref, valid, ref, valid, W, H).mean_abs == 0.0);
    const ProjectiveError e = projective_error(est, valid, ref, valid, W, H);
    REQUIRE(e.pixels == W * H);
    REQUIRE(std::abs(e.mean_abs - 0.002) < 1e-12);
}

TEST_CASE("Metrics - Projective error counts only jointly valid pixels")
{
    const std::size_t W = 4, H = 1;
    const std::vector<double> ref = {0.3, 0.3, 0.3, std::nan("")};
    const std::vector<double> est = {0.301, 0.5, 0.303, 0.3};
    const std::vector<std::uint8_t> rv = {1, 1, 1, 0}, ev = {1, 0, 1, 1};
    const ProjectiveError e = projective_error(est, ev, ref, rv, W, H);
    REQUIRE(e.pixels == 2);
    REQUIRE(std::abs(e.mean_abs - 0.002) < 1e-12);
}

TEST_CASE("Metrics - Erosion removes a boundary spike")
{
    const std::size_t W = 20, H = 20;
    std::vector<double> ref(W * H, 0.3), est(W * H, 0.3001);
    std::vector<std::uint8_t> valid(W * H, 0);
    for (std::size_t v = 4; v < 16; ++v)
        for (std::size_t u = 4; u < 16; ++u)
            valid[v * W + u] = 1;
    for (std::size_t u = 4; u < 16; ++u)
        est[4 * W + u] = 0.35; // error concentrated on the mask boundary
    const ProjectiveError plain = projective_error(est, valid, ref, valid, W, H, 0);
    const ProjectiveError eroded = projective_error(est, valid, ref, valid, W, H, 1);
    REQUIRE(eroded.pixels == 10 * 10);
    REQUIRE(eroded.mean_abs < plain.mean_abs);
    REQUIRE(std::abs(eroded.mean_abs - 0.0001) < 1e-12);

    // zero erosion is the plain mean
    long double sum = 0.0L;
    for (std::size_t i = 0; i < W * H; ++i)
        if (valid[i])
            sum += std::abs((long double)est[i] - ref[i]);
    REQUIRE(std::abs(plain.mean_abs - double(sum / 144)) < 1e-15);
}

TEST_CASE("Metrics - Mask erosion")
{
    const std::size_t W = 7, H = 5;
    std::vector<std::uint8_t> full(W * H, 1);
    const auto once = erode_mask(full, W, H, 1);
    for (std::size_t v = 0; v < H; ++v)
        for (std::size_t u = 0; u < W; ++u)
            REQUIRE(bool(once[v * W + u]) == (u > 0 && v > 0 && u + 1 < W && v + 1 < H));
    const auto twice = erode_mask(full, W, H, 2);
    REQUIRE(std::count(twice.begin(), twice.end(), 1) == 3);
    REQUIRE(erode_mask(full, W, H, 0) == full);
    const auto thrice = erode_mask(full, W, H, 3);
    REQUIRE(std::count(thrice.begin(), thrice.end(), 1) == 0);

    // 4-neighbour: a plus shape keeps only its center
    std::vector<std::uint8_t> plus(25, 0);
    for (std::size_t i : {7u, 11u, 12u, 13u, 17u})
        plus[i] = 1;
    const auto p = erode_mask(plus, 5, 5, 1);
    REQUIRE(std::count(p.begin(), p.end(), 1) == 1);
    REQUIRE(p[12] == 1);

    // property: erosion is monotone and shrinking
    Rng rng(67);
    std::vector<std::uint8_t> mask(30 * 30);
    for (auto &m : mask)
        m = rng.uniform() < 0.8;
    const auto e1 = erode_mask(mask, 30, 30, 1);
    for (std::size_t i = 0; i < mask.size(); ++i)
        REQUIRE(e1[i] <= mask[i]);
    REQUIRE_THROWS_AS(erode_mask(mask, 31, 30, 1), Error);
}

TEST_CASE("Metrics - Projective error errors")
{
    const std::vector<double> d(4, 0.3);
    const std::vector<std::uint8_t> none(4, 0), all(4, 1);
    REQUIRE(kind_of([&] { projective_error(d, none, d, all, 2, 2); }) == ErrorKind::insufficient_data);
    REQUIRE(kind_of([&] { projective_error(d, all, d, all, 2, 2, 1); }) == ErrorKind::insufficient_data);
    REQUIRE(kind_of([&] { projective_error(d, all, d, all, 3, 2); }) == ErrorKind::structural);
}

// ================================================================================================
// Ground truth

TEST_CASE("Metrics - Plane ground truth is a regular grid")
{
    SceneSpec spec;
    spec.extent = 0.02;
    const GridGeometry g = grid_of(32, 32, 0.001);
    const GroundTruth gt = resample_ground_truth(spec, g);
    REQUIRE(gt.points.size() == std::size_t(std::count(gt.valid.begin(), gt.valid.end(), 1)));
    std::size_t n = 0;
    for (std::size_t v = 0; v < 32; ++v)
        for (std::size_t u = 0; u < 32; ++u)
        {
            const std::size_t i = v * 32 + u;
            const bool inside = std::abs(g.x(u)) <= 0.01 && std::abs(g.y(v)) <= 0.01;
            REQUIRE(bool(gt.valid[i]) == inside);
            if (inside)
            {
                REQUIRE(gt.depth[i] == 0.30);
                REQUIRE(gt.points[n].x == g.x(u));
                REQUIRE(gt.points[n].y == g.y(v));
                ++n;
            }
        }
    REQUIRE(n == 20 * 20);
}

TEST_CASE("Metrics - Sphere ground truth lies on the sphere")
{
    SceneSpec spec;
    spec.kind = SceneKind::sphere_cap;
    const GroundTruth gt = resample_ground_truth(spec, grid_of(64, 64, 0.001));
    REQUIRE(gt.points.size() > 1000);
    for (const Vec3 &p : gt.points)
    {
        const double r2 = p.x * p.x + p.y * p.y + (p.z - spec.sphere_center_z) * (p.z - spec.sphere_center_z);
        REQUIRE(std::abs(r2 - spec.radius * spec.radius) < 1e-12);
        REQUIRE(p.z < spec.sphere_center_z);
    }
}

TEST_CASE("Metrics - Doubling sampling density quadruples the point count")
{
    SceneSpec spec;
    spec.extent = 0.04;
    const auto coarse = resample_ground_truth(spec, grid_of(64, 64, 0.001)).points.size();
    const auto fine = resample_ground_truth(spec, grid_of(128, 128, 0.0005)).points.size();
    const double ratio = double(fine) / double(coarse);
    REQUIRE(ratio > 3.6);
    REQUIRE(ratio < 4.4);
}

TEST_CASE("Metrics - Random cloud ground truth keeps the targets")
{
    SceneSpec spec;
    spec.kind = SceneKind::random_cloud;
    spec.count = 40;
    spec.extent = 0.05;
    spec.seed = 9;
    const GridGeometry g = grid_of(64, 64, 0.001);
    const GroundTruth gt = resample_ground_truth(spec, g);
    const Scene scene = make_scene(spec);
    REQUIRE(gt.points.size() == scene.targets.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        if (gt.valid[i])
        {
            double nearest = 1.0;
            for (const Target &t : scene.targets)
                if (std::round(g.u_of(t.position.x)) == double(i % 64) && std::round(g.v_of(t.position.y)) == double(i / 64))
                    nearest = std::min(nearest, t.position.z);
            REQUIRE(gt.depth[i] == nearest);
        }
}

// ================================================================================================
// Evaluation

TEST_CASE("Metrics - Perfect reconstruction scores zero")
{
    SceneSpec spec;
    spec.slope_y = 0.05;
    const GridGeometry g = grid_of(48, 48, 0.001);
    const GroundTruth gt = resample_ground_truth(spec, g);
    RadarImage img(g);
    img.depth = gt.depth;
    img.valid = gt.valid;
    const EvalReport rep = evaluate(img, gt);
    REQUIRE(rep.chamfer_gt_to_radar == 0.0);
    REQUIRE(rep.chamfer_radar_to_gt == 0.0);
    REQUIRE(rep.projective_masked == 0.0);
    REQUIRE(rep.projective_eroded == 0.0);
    REQUIRE(rep.radar_points == gt.points.size());
    REQUIRE(rep.masked_pixels == gt.points.size());
    REQUIRE(rep.eroded_pixels < rep.masked_pixels);
}

TEST_CASE("Metrics - Constant offset is reported by every metric")
{
    SceneSpec spec;
    const GridGeometry g = grid_of(40, 40, 0.001);
    const GroundTruth gt = resample_ground_truth(spec, g);
    RadarImage img(g);
    img.valid = gt.valid;
    for (std::size_t i = 0; i < g.size(); ++i)
        img.depth[i] = gt.depth[i] + 0.0005;
    const EvalReport rep = evaluate(img, gt);
    REQUIRE(std::abs(rep.projective_masked - 0.0005) < 1e-12);
    REQUIRE(std::abs(rep.projective_eroded - 0.0005) < 1e-12);
    REQUIRE(rep.chamfer_gt_to_radar <= 0.0005 + 1e-12);
    REQUIRE(rep.chamfer_radar_to_gt <= 0.0005 + 1e-12);
    REQUIRE(rep.chamfer_radar_to_gt > 0.0);
}

TEST_CASE("Metrics - Evaluation errors")
{
    SceneSpec spec;
    const GroundTruth gt = resample_ground_truth(spec, grid_of(16, 16, 0.001));
    RadarImage other(grid_of(16, 16, 0.002));
    REQUIRE(kind_of([&] { evaluate(other, gt); }) == ErrorKind::structural);
    RadarImage empty(grid_of(16, 16, 0.001));
    REQUIRE(kind_of([&] { evaluate(empty, gt); }) == ErrorKind::empty_image);
    SceneSpec far = spec;
    far.center_x = 1.0;
    REQUIRE(kind_of([&] { resample_ground_truth(far, grid_of(16, 16, 0.001)); }) == ErrorKind::insufficient_data);
}
