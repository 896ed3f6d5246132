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

#ifndef MMFSK_SIMULATE_HPP
#define MMFSK_SIMULATE_HPP

#include "mmfsk/camera.hpp"
#include "mmfsk/signal.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace mmfsk
{
    struct NoiseSpec
    {
        std::optional<double> snr_db; // empty: noise-free
        std::uint64_t seed = 0;
    };

    struct SimulationOptions
    {
        bool path_loss = false; // scale each term by 1 / rho^2
        Execution exec;
    };

    // Point-target forward model. Entry (t, r, k) is
    //   sum_targets A * exp(j (-2 pi f_k rho / c + phi_c))  +  noise,
    // with rho the bistatic round trip of the pair. Noise is circular complex
    // Gaussian, drawn per (t, r, k) from the counter-based generator, scaled
    // against the mean power of the clean tensor.
    BasebandTensor simulate_baseband(const Scene &scene, const AntennaArray &array, const FrequencySet &freqs,
                                     const NoiseSpec &noise = {}, const SimulationOptions &options = {});

    // Adds noise in place at the given SNR relative to the current mean power.
    void add_noise(BasebandTensor &baseband, const NoiseSpec &noise);

    enum class SceneKind
    {
        plane,
        sphere_cap,
        step,
        random_cloud
    };

    SceneKind parse_scene_kind(std::string_view name);
    const char *scene_kind_name(SceneKind kind);

    // Synthetic stand-ins for measured objects. All lengths in meters; the
    // radar looks along +z from the z = 0 plane.
    //
    // Surfaces are sampled on a square lateral lattice (`extent` wide,
    // `spacing` pitch) centered on (center_x, center_y). `edge_taper` is the
    // fraction of the half-extent over which reflectivity rolls off with a
    // raised cosine, which keeps edge diffraction out of the image.
    struct SceneSpec
    {
        SceneKind kind = SceneKind::plane;
        double center_x = 0.0, center_y = 0.0;
        double extent = 0.08;
        double spacing = 0.001;
        double edge_taper = 0.3;
        double amplitude = 1.0;
        bool random_phase = false; // diffuse surface: uniform random phase per target
        std::uint64_t seed = 0;

        // plane: z = depth + slope_x * (x - cx) + slope_y * (y - cy)
        double depth = 0.30;
        double slope_x = 0.0, slope_y = 0.0;

        // sphere cap: sphere of `radius` centered at (cx, cy, sphere_center_z),
        // front cap out to lateral radius cap_fraction * radius
        double radius = 0.05;
        double sphere_center_z = 0.35;
        double cap_fraction = 0.8;

        // step: z = level_low for x < cx + step_offset, else level_high
        double level_low = 0.28, level_high = 0.32;
        double step_offset = 0.0;

        // random cloud: `count` targets uniform in the box extent x extent x depth_span around depth
        std::size_t count = 64;
        double depth_span = 0.04;

        void validate() const;
    };

    Scene make_scene(const SceneSpec &spec);

    // Height of the analytic surface at (x, y); empty outside the footprint
    // and for random clouds (which have no surface).
    std::optional<double> surface_depth(const SceneSpec &spec, double x, double y);

    bool has_surface(const SceneSpec &spec);

    // Synthetic depth camera. Extrinsics map camera coordinates to radar
    // coordinates; the camera looks along its own +z axis.
    struct CameraRig
    {
        CameraIntrinsics intrinsics;
        Extrinsics extrinsics = default_extrinsics();
        std::size_t width = 160, height = 120;
        double near = 0.05, far = 1.5;  // ray search range along camera z, m
        double march_step = 0.0005;      // m
        double noise_sigma = 0.0;        // additive Gaussian depth noise, m
        double invalid_fraction = 0.0;   // share of pixels randomly dropped
        std::uint64_t seed = 0;

        static Extrinsics default_extrinsics();
        void validate() const;
    };

    // Casts one ray per pixel against the analytic surface (marching plus
    // bisection) and reports the hit depth along the camera axis. Pixels whose
    // ray misses the surface are invalid. Random clouds have no surface and
    // are rejected with a configuration error.
    OpticalDepthMap render_optical_depth(const SceneSpec &spec, const CameraRig &rig, const Execution &exec = {});

} // namespace mmfsk

#endif
