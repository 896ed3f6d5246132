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

#include "mmfsk/simulate.hpp"
#include "test_support.hpp"

#include <cmath>
#include <set>

using namespace mmfsk;
using test_support::Rng;

namespace
{
    Scene random_scene(Rng &rng, std::size_t n)
    {
        Scene s;
        for (std::size_t i = 0; i < n; ++i)
        {
            Target t;
            t.position = {rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05), rng.uniform(0.2, 0.4)};
            t.reflectivity = rng.unit_phasor() * rng.uniform(0.2, 1.5);
            t.phase_offset = rng.uniform(-1.0, 1.0);
            s.targets.push_back(t);
        }
        return s;
    }

    double wrap(double a)
    {
        while (a > kPi)
            a -= 2 * kPi;
        while (a <= -kPi)
            a += 2 * kPi;
        return a;
    }
} // namespace

// ================================================================================================
// Forward model

TEST_CASE("Simulate - Single monostatic target phase")
{
    const double f = 82e9;
    const BasebandTensor s =
        simulate_baseband(test_support::point_scene({0, 0, 0.3}), test_support::colocated_array(), FrequencySet({f}));
    REQUIRE(s.tx_count() == 1);
    REQUIRE(s.rx_count() == 1);
    REQUIRE(s.freq_count() == 1);
    const long double expected = -2.0L * test_support::kPiL * 82e9L * 0.6L / test_support::kC;
    const double diff = wrap(std::arg(s.at(0, 0, 0)) - double(std::remainder(expected, 2.0L * test_support::kPiL)));
    REQUIRE(std::abs(diff) < 1e-9);
    REQUIRE(std::abs(std::abs(s.at(0, 0, 0)) - 1.0) < 1e-14);
}

TEST_CASE("Simulate - Superposition of two targets")
{
    Rng rng(21);
    const AntennaArray array = AntennaArray::cross(6, 5, 0.2);
    const FrequencySet freqs({72e9, 77e9, 82e9});
    const Scene a = random_scene(rng, 1), b = random_scene(rng, 1);
    Scene both = a;
    both.targets.push_back(b.targets[0]);
    const BasebandTensor sa = simulate_baseband(a, array, freqs);
    const BasebandTensor sb = simulate_baseband(b, array, freqs);
    const BasebandTensor sab = simulate_baseband(both, array, freqs);
    for (std::size_t i = 0; i < sab.data().size(); ++i)
        REQUIRE(sab.data()[i] == sa.data()[i] + sb.data()[i]);
}

TEST_CASE("Simulate - Linearity over random scene unions")
{
    Rng rng(22);
    const AntennaArray array = AntennaArray::cross(4, 4, 0.1);
    const FrequencySet freqs = fscw_sweep(72e9, 82e9, 5);
    for (int trial = 0; trial < 10; ++trial)
    {
        const Scene a = random_scene(rng, 1 + rng.index(5)), b = random_scene(rng, 1 + rng.index(5));
        Scene both = a;
        both.targets.insert(both.targets.end(), b.targets.begin(), b.targets.end());
        const auto sa = simulate_baseband(a, array, freqs), sb = simulate_baseband(b, array, freqs);
        const auto sab = simulate_baseband(both, array, freqs);
        for (std::size_t i = 0; i < sab.data().size(); ++i)
            REQUIRE(std::abs(sab.data()[i] - (sa.data()[i] + sb.data()[i])) < 1e-12);
    }
}

TEST_CASE("Simulate - Reduced QAR50 shape matches the reference evaluator")
{
    Rng rng(23);
    const AntennaArray array = AntennaArray::cross(8, 8, 0.3);
    const FrequencySet freqs = fscw_sweep(72e9, 82e9, 16);
    const Scene scene = random_scene(rng, 7);
    const BasebandTensor fast = simulate_baseband(scene, array, freqs, {}, {false, {3}});
    const BasebandTensor ref = test_support::reference_simulate(scene, array, freqs);
    REQUIRE(test_support::max_relative_difference(test_support::tensor_values(fast), test_support::tensor_values(ref)) <
            1e-12);
}

TEST_CASE("Simulate - Frequency shift consistency for a single target")
{
    Rng rng(24);
    const AntennaArray array = AntennaArray::cross(5, 5, 0.2);
    const FrequencySet freqs({72e9, 80.98e9, 82e9});
    for (int trial = 0; trial < 10; ++trial)
    {
        const Vec3 p{rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05), rng.uniform(0.2, 0.5)};
        const auto s = simulate_baseband(test_support::point_scene(p), array, freqs);
        for (std::size_t t = 0; t < 5; ++t)
            for (std::size_t r = 0; r < 5; ++r)
            {
                const long double rho = test_support::norm_ld(array.tx()[t], p) + test_support::norm_ld(array.rx()[r], p);
                for (std::size_t k = 1; k < 3; ++k)
                {
                    const double measured = std::arg(s.at(t, r, k)) - std::arg(s.at(t, r, 0));
                    const long double expected =
                        -2.0L * test_support::kPiL * ((long double)freqs[k] - freqs[0]) * rho / test_support::kC;
                    REQUIRE(std::abs(wrap(measured - double(std::remainder(expected, 2.0L * test_support::kPiL)))) < 1e-9);
                }
            }
    }
}

TEST_CASE("Simulate - Path loss weights each term by the inverse squared round trip")
{
    const Vec3 p{0.01, -0.02, 0.3};
    const AntennaArray array = AntennaArray::cross(3, 3, 0.1);
    const auto s = simulate_baseband(test_support::point_scene(p), array, FrequencySet({77e9}), {}, {true, {}});
    for (std::size_t t = 0; t < 3; ++t)
        for (std::size_t r = 0; r < 3; ++r)
        {
            const double rho = round_trip_distance(array.tx()[t], array.rx()[r], p);
            REQUIRE(std::abs(std::abs(s.at(t, r, 0)) - 1.0 / (rho * rho)) < 1e-12);
        }
}

// ================================================================================================
// Noise

TEST_CASE("Simulate - Noise is deterministic under a fixed seed")
{
    const AntennaArray array = AntennaArray::cross(4, 4, 0.2);
    const FrequencySet freqs({72e9, 82e9});
    const Scene scene = test_support::point_scene({0, 0, 0.3});
    const auto a = simulate_baseband(scene, array, freqs, {20.0, 7}, {false, {1}});
    const auto b = simulate_baseband(scene, array, freqs, {20.0, 7}, {false, {4}});
    const auto c = simulate_baseband(scene, array, freqs, {20.0, 8}, {false, {1}});
    bool differs = false;
    for (std::size_t i = 0; i < a.data().size(); ++i)
    {
        REQUIRE(a.data()[i] == b.data()[i]);
        differs |= a.data()[i] != c.data()[i];
    }
    REQUIRE(differs);
}

TEST_CASE("Simulate - Noise power follows the requested SNR")
{
    const AntennaArray array = AntennaArray::cross(32, 32, 0.2);
    const FrequencySet freqs = fscw_sweep(72e9, 82e9, 8);
    const Scene scene = test_support::point_scene({0.01, 0, 0.3});
    const auto clean = simulate_baseband(scene, array, freqs);
    for (double snr : {0.0, 10.0, 20.0})
    {
        const auto noisy = simulate_baseband(scene, array, freqs, {snr, 3});
        double signal = 0.0, noise = 0.0, re = 0.0, im = 0.0, re2 = 0.0, im2 = 0.0;
        for (std::size_t i = 0; i < clean.data().size(); ++i)
        {
            const Complex n = noisy.data()[i] - clean.data()[i];
            signal += std::norm(clean.data()[i]);
            noise += std::norm(n);
            re += n.real();
            im += n.imag();
            re2 += n.real() * n.real();
            im2 += n.imag() * n.imag();
        }
        const double n_samples = double(clean.data().size());
        const double measured_db = 10.0 * std::log10(signal / noise);
        CAPTURE(snr, measured_db);
        REQUIRE(std::abs(measured_db - snr) < 0.2);
        // circular: zero mean, equal power in both quadratures
        REQUIRE(std::abs(re / n_samples) < 0.05 * std::sqrt(noise / n_samples));
        REQUIRE(std::abs(im / n_samples) < 0.05 * std::sqrt(noise / n_samples));
        REQUIRE(std::abs(re2 / im2 - 1.0) < 0.1);
    }
}

// ================================================================================================
// Scenes

TEST_CASE("Simulate - Plane scene sits at its depth")
{
    SceneSpec spec;
    spec.kind = SceneKind::plane;
    spec.depth = 0.30;
    spec.extent = 0.004;
    spec.spacing = 0.001;
    const Scene scene = make_scene(spec);
    REQUIRE(scene.targets.size() == 25);
    for (const auto &t : scene.targets)
        REQUIRE(t.position.z == 0.30);
}

TEST_CASE("Simulate - Step scene has exactly two depth levels")
{
    SceneSpec spec;
    spec.kind = SceneKind::step;
    spec.level_low = 0.28;
    spec.level_high = 0.32;
    std::set<double> levels;
    for (const auto &t : make_scene(spec).targets)
        levels.insert(t.position.z);
    REQUIRE(levels == std::set<double>{0.28, 0.32});
}

TEST_CASE("Simulate - Sphere cap targets satisfy the sphere equation")
{
    SceneSpec spec;
    spec.kind = SceneKind::sphere_cap;
    spec.radius = 0.05;
    spec.sphere_center_z = 0.35;
    spec.center_x = 0.004;
    spec.center_y = -0.002;
    const Scene scene = make_scene(spec);
    REQUIRE(scene.targets.size() > 100);
    for (const auto &t : scene.targets)
    {
        const double dx = t.position.x - spec.center_x, dy = t.position.y - spec.center_y;
        const double dz = t.position.z - spec.sphere_center_z;
        REQUIRE(std::abs(dx * dx + dy * dy + dz * dz - spec.radius * spec.radius) < 1e-12);
        REQUIRE(t.position.z < spec.sphere_center_z);
    }
}

TEST_CASE("Simulate - Tilted plane and random cloud scenes")
{
    SceneSpec plane;
    plane.slope_x = 0.05;
    plane.slope_y = -0.03;
    for (const auto &t : make_scene(plane).targets)
        REQUIRE(std::abs(t.position.z - (0.30 + 0.05 * t.position.x - 0.03 * t.position.y)) < 1e-15);

    SceneSpec cloud;
    cloud.kind = SceneKind::random_cloud;
    cloud.count = 200;
    cloud.seed = 5;
    const Scene a = make_scene(cloud), b = make_scene(cloud);
    REQUIRE(a.targets.size() == 200);
    for (std::size_t i = 0; i < a.targets.size(); ++i)
    {
        REQUIRE(a.targets[i].position == b.targets[i].position);
        REQUIRE(std::abs(a.targets[i].position.z - cloud.depth) <= cloud.depth_span / 2);
        REQUIRE(std::abs(a.targets[i].position.x) <= cloud.extent / 2);
    }
    cloud.seed = 6;
    REQUIRE_FALSE(make_scene(cloud).targets[0].position == a.targets[0].position);
}

TEST_CASE("Simulate - Scene reflectivities are positive and tapered at the edge")
{
    SceneSpec spec;
    const Scene scene = make_scene(spec);
    double centre = 0.0, corner = 1.0;
    for (const auto &t : scene.targets)
    {
        REQUIRE(std::abs(t.reflectivity) > 0.0);
        if (t.position.x == 0.0 && t.position.y == 0.0)
            centre = std::abs(t.reflectivity);
        corner = std::min(corner, std::abs(t.reflectivity));
    }
    REQUIRE(centre == 1.0);
    REQUIRE(corner < 0.1);
}

TEST_CASE("Simulate - Unknown scene kind and bad parameters are configuration errors")
{
    REQUIRE_THROWS_MATCHES(parse_scene_kind("cube"), Error,
                           Catch::Matchers::Predicate<Error>([](const Error &e)
                                                             { return e.kind() == ErrorKind::configuration; }));
    SceneSpec spec;
    spec.depth = -1.0;
    REQUIRE_THROWS_AS(make_scene(spec), Error);
    spec = {};
    spec.kind = SceneKind::step;
    spec.level_high = spec.level_low;
    REQUIRE_THROWS_AS(make_scene(spec), Error);
    Scene empty;
    REQUIRE_THROWS_AS(simulate_baseband(empty, test_support::colocated_array(), FrequencySet({72e9})), Error);
}

// ================================================================================================
// Synthetic depth camera

TEST_CASE("Simulate - Camera renders the analytic plane")
{
    SceneSpec spec;
    spec.slope_x = 0.04;
    spec.slope_y = 0.02;
    CameraRig rig;
    const OpticalDepthMap map = render_optical_depth(spec, rig);
    REQUIRE(map.width == rig.width);
    REQUIRE(map.valid_count() > 1000);
    const Extrinsics &e = rig.extrinsics;
    for (std::size_t v = 0; v < map.height; ++v)
        for (std::size_t u = 0; u < map.width; ++u)
        {
            const std::size_t i = v * map.width + u;
            if (!map.valid[i])
                continue;
            const double d = map.depth[i];
            const Vec3 pc{(double(u) - rig.intrinsics.cu) * d / rig.intrinsics.fu,
                          (double(v) - rig.intrinsics.cv) * d / rig.intrinsics.fv, d};
            const Vec3 pr = e.apply(pc);
            REQUIRE(std::abs(pr.z - (spec.depth + spec.slope_x * pr.x + spec.slope_y * pr.y)) < 1e-9);
        }
}

TEST_CASE("Simulate - Camera noise and dropouts are seeded")
{
    SceneSpec spec;
    CameraRig rig;
    rig.noise_sigma = 0.002;
    rig.invalid_fraction = 0.2;
    rig.seed = 9;
    const auto a = render_optical_depth(spec, rig, {1});
    const auto b = render_optical_depth(spec, rig, {3});
    REQUIRE(a.valid == b.valid);
    for (std::size_t i = 0; i < a.depth.size(); ++i)
        if (a.valid[i])
            REQUIRE(a.depth[i] == b.depth[i]);

    rig.noise_sigma = 0.0;
    rig.invalid_fraction = 0.0;
    const auto clean = render_optical_depth(spec, rig);
    std::size_t hit = 0, dropped = 0;
    for (std::size_t i = 0; i < clean.depth.size(); ++i)
        if (clean.valid[i])
        {
            ++hit;
            dropped += a.valid[i] ? 0 : 1;
        }
    const double share = double(dropped) / double(hit);
    REQUIRE(share > 0.17);
    REQUIRE(share < 0.23);

    SceneSpec cloud;
    cloud.kind = SceneKind::random_cloud;
    REQUIRE_THROWS_AS(render_optical_depth(cloud, rig), Error);
}
