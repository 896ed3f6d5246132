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

#ifndef MMFSK_EXPERIMENT_HPP
#define MMFSK_EXPERIMENT_HPP

#include "mmfsk/depth_prior.hpp"
#include "mmfsk/metrics.hpp"
#include "mmfsk/reconstruct.hpp"
#include "mmfsk/simulate.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mmfsk
{
    enum class Method
    {
        fsk2,
        mm2fsk,
        fsk3,
        backprojection
    };

    // "2fsk", "mm2fsk", "3fsk", "bp"; anything else is a configuration error.
    Method parse_method(std::string_view name);
    const char *method_name(Method method);

    // Carrier sets by name: the frequency-pair rows ("d0.5" ... "d10.0"),
    // three-carrier combinations ("t0.5-10.0"), and evenly spaced sweeps over
    // 72-82 GHz ("fscw16").
    FrequencySet resolve_frequency_config(std::string_view name);

    struct ArraySpec
    {
        std::size_t tx = 16, rx = 16;
        double aperture = 0.2;
        std::vector<Vec3> tx_positions, rx_positions; // explicit layout when non-empty

        AntennaArray build() const;
    };

    // Named array layouts: "desk" (16 x 16 over 0.2 m) and "qar50" (94 x 94 over 0.3 m).
    ArraySpec array_profile(std::string_view name);

    enum class PriorMode
    {
        scalar,
        camera,
        file,
        truth
    };

    PriorMode parse_prior_mode(std::string_view name);
    const char *prior_mode_name(PriorMode mode);

    struct PriorSpec
    {
        PriorMode mode = PriorMode::camera;
        double scalar_depth = 0.40;     // used by 2FSK and 3FSK, and by the scalar mode
        std::string file;               // PFM on the radar grid (file mode)
        std::string calibration_file;   // optional JSON calibration (camera mode)
        CameraRig camera;
        double max_edge_length = 0.0;   // rasterizer triangle cull, m
        double noise_sigma = 0.0;       // truth mode: Gaussian error, m
        double uniform_halfwidth = 0.0; // truth mode: uniform error in [-h, h], m
    };

    struct ExperimentConfig
    {
        std::uint64_t seed = 0;
        SceneSpec scene;
        ArraySpec array;
        GridGeometry grid;
        std::vector<std::string> frequency_configs{"d10.0"};
        std::vector<Method> methods{Method::mm2fsk};
        PriorSpec prior;
        std::optional<double> snr_db;
        bool path_loss = false;
        double threshold_db = kDefaultThresholdDb;
        unsigned erosion = kDefaultErosion;
        VoxelGridSpec voxels;
        std::size_t sweep_seeds = 1;
        std::filesystem::path output_dir = "mmfsk_out";

        void validate() const;
    };

    // Parses a JSON experiment document. Relative file references (scene
    // file, prior file, calibration file) resolve against `base_dir`.
    // Structural mistakes are validation errors; unreadable files are I/O errors.
    ExperimentConfig parse_config(const std::string &text, const std::filesystem::path &base_dir = {});
    ExperimentConfig load_config(const std::filesystem::path &path);

    // A standalone scene description (the "scene" object of a configuration).
    SceneSpec parse_scene_spec(const std::string &text);

    // Applies "dotted.key=value" overrides (value parsed as JSON, else taken
    // as a string) to a JSON document and returns the new text.
    std::string apply_overrides(const std::string &text, const std::vector<std::string> &assignments);

    // Canonical JSON of every field that influences results. The output
    // directory and worker count are excluded so reruns elsewhere match.
    std::string resolved_config_json(const ExperimentConfig &config);

    std::uint64_t fnv1a64(std::string_view bytes);

    // ---------------------------------------------------------------- stages

    struct Simulation
    {
        AntennaArray array;
        FrequencySet carriers; // union of every configured carrier set
        BasebandTensor baseband;
    };

    Simulation run_simulation(const ExperimentConfig &config, const Execution &exec = {});

    // Per-pixel prior on the radar grid for the configured mode.
    CandidateGrid make_prior(const ExperimentConfig &config, const Execution &exec = {});

    struct MethodRun
    {
        Method method;
        std::string frequency_config;
        double delta_hz; // smallest carrier difference (BP: bandwidth)
        RadarImage raw;
        RadarImage filtered;

        std::string id() const;
    };

    // Every (method, frequency config) pair whose carrier count suits the
    // method: two for 2FSK and MM-2FSK, three for 3FSK, any for BP.
    std::vector<MethodRun> run_methods(const ExperimentConfig &config, const Simulation &simulation,
                                       const CandidateGrid &prior, const Execution &exec = {});

    struct EvalRecord
    {
        std::string id;
        Method method;
        std::string frequency_config;
        double delta_hz;
        EvalReport report;
    };

    std::string format_eval_json(const std::vector<EvalRecord> &records);
    std::string format_eval_table(const std::vector<EvalRecord> &records);

    double spearman(const std::vector<double> &x, const std::vector<double> &y);

    struct SweepEntry
    {
        Method method;
        std::string frequency_config;
        double delta_hz;
        std::vector<double> projective_eroded; // one per seed
        double median = 0.0;
    };

    struct SweepTrend
    {
        Method method;
        double spearman = 0.0; // error vs frequency difference
        bool non_increasing = true;
        std::string verdict; // "decreasing", "increasing", or "no trend"
    };

    struct SweepReport
    {
        std::vector<SweepEntry> entries;
        std::vector<SweepTrend> trends;
        std::string best; // id of the entry with the lowest median
    };

    SweepReport run_sweep(const ExperimentConfig &config, const Execution &exec = {});
    std::string format_sweep_json(const SweepReport &report);
    std::string format_sweep_table(const SweepReport &report);

    // ------------------------------------------------------------- commands

    struct CommandOutcome
    {
        std::vector<std::filesystem::path> files; // written, in order
        std::string summary;                      // human-readable text for stdout
    };

    // Runs one of simulate, prior, reconstruct, eval, sweep, report. Files go
    // to config.output_dir; each command also writes the resolved-config
    // snapshot and a deterministic run log there.
    CommandOutcome run_command(std::string_view command, const ExperimentConfig &config, const Execution &exec = {});

    inline constexpr const char *kVersion = MMFSK_VERSION;

} // namespace mmfsk

#endif
