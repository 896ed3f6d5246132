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

#include "mmfsk/simulate.hpp"
#include "mmfsk/parallel.hpp"
#include "mmfsk/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mmfsk
{
    BasebandTensor simulate_baseband(const Scene &scene, const AntennaArray &array, const FrequencySet &freqs,
                                     const NoiseSpec &noise, const SimulationOptions &options)
    {
        scene.validate();
        if (freqs.size() == 0)
            fail(ErrorKind::validation, "frequency set is empty");

        const std::size_t T = array.tx_count(), R = array.rx_count(), F = freqs.size();
        const std::size_t N = scene.targets.size();
        BasebandTensor out(T, R, F);

        std::vector<double> wavenumber(F);
        for (std::size_t k = 0; k < F; ++k)
            wavenumber[k] = 2.0 * kPi * freqs[k] / kSpeedOfLight;

        // one-way RX distances are shared by every TX row
        std::vector<double> rx_dist(N * R);
        for (std::size_t n = 0; n < N; ++n)
            for (std::size_t r = 0; r < R; ++r)
                rx_dist[n * R + r] = distance(array.rx()[r], scene.targets[n].position);

        parallel_ranges(T, resolve_workers(options.exec), [&](std::size_t t_begin, std::size_t t_end)
        {
            for (std::size_t t = t_begin; t < t_end; ++t)
            {
                const Vec3 &tx = array.tx()[t];
                for (std::size_t n = 0; n < N; ++n)
                {
                    const Target &target = scene.targets[n];
                    const double tx_dist = distance(tx, target.position);
                    for (std::size_t r = 0; r < R; ++r)
                    {
                        const double rho = tx_dist + rx_dist[n * R + r];
                        const double gain = options.path_loss ? 1.0 / (rho * rho) : 1.0;
                        for (std::size_t k = 0; k < F; ++k)
                        {
                            const Complex term = target.reflectivity *
                                                 std::polar(gain, -wavenumber[k] * rho + target.phase_offset);
                            out.at(t, r, k) += term;
                        }
                    }
                }
            }
        });

        if (noise.snr_db)
            add_noise(out, noise);
        return out;
    }

    void add_noise(BasebandTensor &baseband, const NoiseSpec &noise)
    {
        if (!noise.snr_db)
            return;
        if (!std::isfinite(*noise.snr_db))
            fail(ErrorKind::validation, "SNR must be finite");
        auto data = baseband.data();
        if (data.empty())
            return;
        double power = 0.0;
        for (const Complex &c : data)
            power += std::norm(c);
        power /= double(data.size());
        const double sigma = std::sqrt(power / std::pow(10.0, *noise.snr_db / 10.0) / 2.0);
        for (std::size_t i = 0; i < data.size(); ++i)
        {
            const auto [a, b] = normal_pair(noise.seed, rng_stream::noise, i);
            data[i] += Complex(sigma * a, sigma * b);
        }
    }

    SceneKind parse_scene_kind(std::string_view name)
    {
        if (name == "plane")
            return SceneKind::plane;
        if (name == "sphere-cap")
            return SceneKind::sphere_cap;
        if (name == "step")
            return SceneKind::step;
        if (name == "random-cloud")
            return SceneKind::random_cloud;
        fail(ErrorKind::configuration, "unknown scene kind '" + std::string(name) + "'");
    }

    const char *scene_kind_name(SceneKind kind)
    {
        switch (kind)
        {
        case SceneKind::plane: return "plane";
        case SceneKind::sphere_cap: return "sphere-cap";
        case SceneKind::step: return "step";
        case SceneKind::random_cloud: return "random-cloud";
        }
        return "unknown";
    }

    void SceneSpec::validate() const
    {
        auto require = [](bool ok, const char *what)
        {
            if (!ok)
                fail(ErrorKind::configuration, std::string("scene: ") + what);
        };
        require(std::isfinite(center_x) && std::isfinite(center_y), "center must be finite");
        require(extent > 0.0 && extent <= 2.0, "extent must be in (0, 2] m");
        require(spacing > 0.0 && spacing <= extent, "spacing must be in (0, extent]");
        require(extent / spacing <= 4000.0, "extent / spacing must not exceed 4000");
        require(edge_taper >= 0.0 && edge_taper <= 1.0, "edge_taper must be in [0, 1]");
        require(amplitude > 0.0 && std::isfinite(amplitude), "amplitude must be positive");
        switch (kind)
        {
        case SceneKind::plane:
            require(depth > 0.0 && depth < 10.0, "plane depth must be in (0, 10) m");
            require(std::abs(slope_x) <= 1.0 && std::abs(slope_y) <= 1.0, "plane slopes must be within [-1, 1]");
            require(depth - (std::abs(slope_x) + std::abs(slope_y)) * extent / 2 > 0.0,
                    "tilted plane must stay in front of the array");
            break;
        case SceneKind::sphere_cap:
            require(radius > 0.0 && radius < 1.0, "radius must be in (0, 1) m");
            require(cap_fraction > 0.0 && cap_fraction <= 1.0, "cap_fraction must be in (0, 1]");
            require(sphere_center_z - radius > 0.0, "sphere must lie in front of the array");
            break;
        case SceneKind::step:
            require(level_low > 0.0 && level_high > 0.0, "step levels must be positive");
            require(level_low != level_high, "step levels must differ");
            require(std::abs(step_offset) < extent / 2, "step edge must lie inside the extent");
            break;
        case SceneKind::random_cloud:
            require(count >= 1 && count <= 1'000'000, "count must be in [1, 1e6]");
            require(depth > 0.0 && depth_span >= 0.0 && depth - depth_span / 2 > 0.0,
                    "cloud must lie in front of the array");
            break;
        }
    }

    namespace
    {
        // Raised-cosine roll-off over the outer `taper` fraction of [0, 1).
        double taper_weight(double a, double taper)
        {
            if (taper <= 0.0 || a <= 1.0 - taper)
                return 1.0;
            const double s = std::min(1.0, (a - (1.0 - taper)) / taper);
            return 0.5 * (1.0 + std::cos(kPi * s));
        }

        std::vector<double> lattice(double extent, double spacing)
        {
            const auto n = static_cast<std::size_t>(std::floor(extent / spacing + 1e-9)) + 1;
            std::vector<double> off(n);
            for (std::size_t i = 0; i < n; ++i)
                off[i] = (double(i) - double(n - 1) / 2.0) * spacing;
            return off;
        }
    } // namespace

    bool has_surface(const SceneSpec &spec) { return spec.kind != SceneKind::random_cloud; }

    std::optional<double> surface_depth(const SceneSpec &spec, double x, double y)
    {
        const double dx = x - spec.center_x, dy = y - spec.center_y;
        const double half = spec.extent / 2;
        switch (spec.kind)
        {
        case SceneKind::plane:
            if (std::abs(dx) > half || std::abs(dy) > half)
                return std::nullopt;
            return spec.depth + spec.slope_x * dx + spec.slope_y * dy;
        case SceneKind::step:
            if (std::abs(dx) > half || std::abs(dy) > half)
                return std::nullopt;
            return dx < spec.step_offset ? spec.level_low : spec.level_high;
        case SceneKind::sphere_cap:
        {
            const double cap = spec.cap_fraction * spec.radius;
            const double rr = dx * dx + dy * dy;
            if (rr > cap * cap)
                return std::nullopt;
            return spec.sphere_center_z - std::sqrt(spec.radius * spec.radius - rr);
        }
        case SceneKind::random_cloud:
            return std::nullopt;
        }
        return std::nullopt;
    }

    Scene make_scene(const SceneSpec &spec)
    {
        spec.validate();
        Scene scene;

        auto reflectivity = [&](std::size_t index, double weight)
        {
            if (!spec.random_phase)
                return Complex(spec.amplitude * weight, 0.0);
            const double phase = 2.0 * kPi * uniform_open(spec.seed, rng_stream::scene, 4 * index + 3);
            return std::polar(spec.amplitude * weight, phase);
        };

        if (spec.kind == SceneKind::random_cloud)
        {
            for (std::size_t i = 0; i < spec.count; ++i)
            {
                const double u = uniform_open(spec.seed, rng_stream::scene, 4 * i);
                const double v = uniform_open(spec.seed, rng_stream::scene, 4 * i + 1);
                const double w = uniform_open(spec.seed, rng_stream::scene, 4 * i + 2);
                Target t;
                t.position = {spec.center_x + (u - 0.5) * spec.extent, spec.center_y + (v - 0.5) * spec.extent,
                              spec.depth + (w - 0.5) * spec.depth_span};
                t.reflectivity = reflectivity(i, 1.0);
                scene.targets.push_back(t);
            }
            return scene;
        }

        const auto off = lattice(spec.extent, spec.spacing);
        // the outermost samples keep a small positive weight
        const double half = spec.extent / 2 + spec.spacing / 2;
        const double cap = spec.cap_fraction * spec.radius;
        std::size_t index = 0;
        for (double oy : off)
            for (double ox : off)
            {
                const double x = spec.center_x + ox, y = spec.center_y + oy;
                double weight = 1.0;
                if (spec.kind == SceneKind::sphere_cap)
                {
                    const double rho = std::hypot(ox, oy);
                    if (rho > cap)
                        continue;
                    weight = taper_weight(rho / (cap + spec.spacing / 2), spec.edge_taper);
                }
                else
                {
                    weight = taper_weight(std::abs(ox) / half, spec.edge_taper) *
                             taper_weight(std::abs(oy) / half, spec.edge_taper);
                }
                const auto z = surface_depth(spec, x, y);
                if (!z)
                    continue;
                Target t;
                t.position = {x, y, *z};
                t.reflectivity = reflectivity(index++, weight);
                scene.targets.push_back(t);
            }
        if (scene.targets.empty())
            fail(ErrorKind::configuration, "scene parameters produce no targets");
        return scene;
    }

    Extrinsics CameraRig::default_extrinsics()
    {
        Extrinsics e;
        e.translation = {0.06, 0.0, 0.0};
        return e;
    }

    void CameraRig::validate() const
    {
        intrinsics.validate();
        extrinsics.validate();
        if (width == 0 || height == 0 || width >= (1u << 20) || height >= (1u << 20))
            fail(ErrorKind::configuration, "camera resolution out of range");
        if (!(near > 0.0) || !(far > near) || !std::isfinite(far))
            fail(ErrorKind::configuration, "camera range must satisfy 0 < near < far");
        if (!(march_step > 0.0) || !std::isfinite(march_step))
            fail(ErrorKind::configuration, "camera march step must be positive");
        if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
            fail(ErrorKind::configuration, "camera depth noise must be non-negative");
        if (!(invalid_fraction >= 0.0) || !(invalid_fraction < 1.0))
            fail(ErrorKind::configuration, "camera invalid fraction must lie in [0, 1)");
    }

    namespace
    {
        // Closed interval of radar z covered by the analytic surface.
        std::pair<double, double> surface_z_range(const SceneSpec &spec)
        {
            const double half = spec.extent / 2;
            switch (spec.kind)
            {
            case SceneKind::plane:
            {
                const double dz = (std::abs(spec.slope_x) + std::abs(spec.slope_y)) * half;
                return {spec.depth - dz, spec.depth + dz};
            }
            case SceneKind::step:
                return {std::min(spec.level_low, spec.level_high), std::max(spec.level_low, spec.level_high)};
            case SceneKind::sphere_cap:
            {
                const double cap = spec.cap_fraction * spec.radius;
                return {spec.sphere_center_z - spec.radius,
                        spec.sphere_center_z - std::sqrt(spec.radius * spec.radius - cap * cap)};
            }
            case SceneKind::random_cloud:
                break;
            }
            return {0.0, 0.0};
        }
    } // namespace

    OpticalDepthMap render_optical_depth(const SceneSpec &spec, const CameraRig &rig, const Execution &exec)
    {
        spec.validate();
        rig.validate();
        if (!has_surface(spec))
            fail(ErrorKind::configuration, "scene kind has no surface for a depth camera");

        const auto [zlo, zhi] = surface_z_range(spec);
        const double margin = 0.002;
        const CameraIntrinsics &K = rig.intrinsics;
        const Extrinsics &E = rig.extrinsics;
        OpticalDepthMap map(rig.width, rig.height);

        parallel_ranges(rig.height, resolve_workers(exec), [&](std::size_t row_begin, std::size_t row_end)
        {
            for (std::size_t v = row_begin; v < row_end; ++v)
                for (std::size_t u = 0; u < rig.width; ++u)
                {
                    const std::size_t i = v * rig.width + u;
                    const Vec3 dir = E.rotate({(double(u) - K.cu) / K.fu, (double(v) - K.cv) / K.fv, 1.0});
                    // radar point at camera depth d: E.translation + d * dir
                    auto gap = [&](double d) -> std::optional<double>
                    {
                        const Vec3 p = E.translation + dir * d;
                        const auto h = surface_depth(spec, p.x, p.y);
                        if (!h)
                            return std::nullopt;
                        return p.z - *h;
                    };

                    double d_lo = rig.near, d_hi = rig.far;
                    if (dir.z > 0.0)
                    {
                        d_lo = std::max(d_lo, (zlo - margin - E.translation.z) / dir.z);
                        d_hi = std::min(d_hi, (zhi + margin - E.translation.z) / dir.z);
                    }
                    else if (dir.z < 0.0)
                    {
                        d_lo = std::max(d_lo, (zhi + margin - E.translation.z) / dir.z);
                        d_hi = std::min(d_hi, (zlo - margin - E.translation.z) / dir.z);
                    }
                    if (!(d_lo < d_hi))
                        continue;

                    std::optional<double> g_prev = gap(d_lo);
                    double d_prev = d_lo;
                    std::optional<double> hit;
                    for (double d = d_lo + rig.march_step;; d += rig.march_step)
                    {
                        const double dd = std::min(d, d_hi);
                        const std::optional<double> g = gap(dd);
                        if (g_prev && g && *g_prev < 0.0 && *g >= 0.0)
                        {
                            double a = d_prev, b = dd;
                            for (int it = 0; it < 200 && b - a > 1e-13; ++it)
                            {
                                const double m = 0.5 * (a + b);
                                const auto gm = gap(m);
                                if (gm && *gm < 0.0)
                                    a = m;
                                else
                                    b = m;
                            }
                            hit = 0.5 * (a + b);
                            break;
                        }
                        g_prev = g;
                        d_prev = dd;
                        if (dd >= d_hi)
                            break;
                    }
                    if (!hit)
                        continue;

                    if (rig.invalid_fraction > 0.0 &&
                        uniform_open(rig.seed, rng_stream::camera, 4 * i + 2) < rig.invalid_fraction)
                        continue;
                    double depth = *hit;
                    if (rig.noise_sigma > 0.0)
                        depth += rig.noise_sigma * normal_pair(rig.seed, rng_stream::camera, 2 * i).first;
                    if (!(depth > 0.0))
                        continue;
                    map.depth[i] = depth;
                    map.valid[i] = 1;
                }
        });
        return map;
    }

} // namespace mmfsk
