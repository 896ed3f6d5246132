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

// Acceptance suite. Usage: mmfsk_acceptance <path to mmfsk CLI> [--full-bp]
// Prints one PASS or FAIL line per criterion and exits non-zero on any FAIL.

#include "mmfsk/experiment.hpp"
#include "mmfsk/io.hpp"
#include "geometry_oracles.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using namespace mmfsk;
using test_support::Rng;
namespace fs = std::filesystem;

namespace
{
    struct Outcome
    {
        bool pass = false;
        std::string detail;
    };

    using Clock = std::chrono::steady_clock;

    double seconds_since(Clock::time_point start)
    {
        return std::chrono::duration<double>(Clock::now() - start).count();
    }

    std::string fmt(const char *format, auto... args)
    {
        char buf[512];
        std::snprintf(buf, sizeof buf, format, args...);
        return buf;
    }

    const AntennaArray &desk_array()
    {
        static const AntennaArray array = AntennaArray::cross(16, 16, 0.2);
        return array;
    }

    GridGeometry desk_grid()
    {
        GridGeometry g;
        g.width = g.height = 64;
        return g;
    }

    // Largest |depth - surface| over valid pixels that lie on the surface.
    double max_surface_error(const RadarImage &img, const SceneSpec &spec)
    {
        double worst = 0.0;
        const GridGeometry &g = img.geometry;
        for (std::size_t i = 0; i < g.size(); ++i)
        {
            if (!img.valid[i])
                continue;
            const auto z = surface_depth(spec, g.x(i % g.width), g.y(i / g.width));
            if (z)
                worst = std::max(worst, std::abs(img.depth[i] - *z));
        }
        return worst;
    }

    // Smallest |depth - surface| over valid surface pixels.
    double min_surface_error(const RadarImage &img, const SceneSpec &spec)
    {
        double best = std::numeric_limits<double>::infinity();
        const GridGeometry &g = img.geometry;
        for (std::size_t i = 0; i < g.size(); ++i)
        {
            if (!img.valid[i])
                continue;
            const auto z = surface_depth(spec, g.x(i % g.width), g.y(i / g.width));
            if (z)
                best = std::min(best, std::abs(img.depth[i] - *z));
        }
        return best;
    }

    // ------------------------------------------------------------------ 1

    Outcome window_table()
    {
        const double published_cm[] = {13.60, 7.32, 3.66, 1.83, 0.93, 0.75};
        const auto &pairs = standard_frequency_pairs();
        if (pairs.size() != 6)
            return {false, "expected six frequency pairs"};
        double worst = 0.0;
        std::string values;
        for (std::size_t i = 0; i < 6; ++i)
        {
            const double cm = max_unambiguous_depth(pairs[i].delta_hz()) * 100.0;
            worst = std::max(worst, std::abs(cm - published_cm[i]));
            values += fmt("%s%s=%.3f", i ? " " : "", pairs[i].name.c_str(), cm);
        }
        return {worst <= 0.05, values + fmt(" cm; worst deviation %.4f cm", worst)};
    }

    // ------------------------------------------------------------------ 2

    Outcome closed_loop()
    {
        const auto start = Clock::now();
        const FrequencySet freqs = named_frequency_config("d10.0");
        const double window = max_unambiguous_depth(freqs.difference(0, 1));
        const GridGeometry g = desk_grid();
        Rng rng(2001);
        double worst = 0.0;
        std::size_t worst_scene = 0, scenes = 100;
        for (std::size_t n = 0; n < scenes; ++n)
        {
            SceneSpec spec;
            spec.depth = rng.uniform(0.25, 0.35);
            spec.slope_x = rng.uniform(-0.05, 0.05);
            spec.slope_y = rng.uniform(-0.05, 0.05);
            const BasebandTensor s = simulate_baseband(make_scene(spec), desk_array(), freqs);
            CandidateGrid prior = CandidateGrid::scalar(g, spec.depth);
            for (std::size_t i = 0; i < g.size(); ++i)
                prior.prior[i] = *surface_depth(spec, g.x(i % 64), g.y(i / 64)) + rng.uniform(-0.9, 0.9) * window;
            const RadarImage img = magnitude_filter(mm2fsk_reconstruct(s, prior, desk_array(), freqs));
            const double e = max_surface_error(img, spec);
            if (e > worst)
            {
                worst = e;
                worst_scene = n;
            }
        }
        const double elapsed = seconds_since(start);
        return {worst < 0.001 && elapsed < 120.0,
                fmt("%zu tilted planes, max error %.3f mm (scene %zu), %.1f s", scenes, worst * 1e3, worst_scene, elapsed)};
    }

    // ------------------------------------------------------------------ 3

    Outcome wrap_ordering()
    {
        SceneSpec spec;
        const GridGeometry g = desk_grid();
        const Scene scene = make_scene(spec);
        const CandidateGrid scalar = CandidateGrid::scalar(g, 0.40);

        const FrequencySet narrow = named_frequency_config("d0.5");
        const RadarImage a =
            magnitude_filter(fsk2_reconstruct(simulate_baseband(scene, desk_array(), narrow), scalar, desk_array(), narrow));
        const double err_narrow = max_surface_error(a, spec);

        const FrequencySet wide = named_frequency_config("d10.0");
        const BasebandTensor s_wide = simulate_baseband(scene, desk_array(), wide);
        const RadarImage b = magnitude_filter(fsk2_reconstruct(s_wide, scalar, desk_array(), wide));
        double max_from_prior = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (b.valid[i])
                max_from_prior = std::max(max_from_prior, std::abs(b.depth[i] - 0.40));
        const double closest_wide = min_surface_error(b, spec);

        Rng rng(3001);
        CandidateGrid per_pixel = scalar;
        for (std::size_t i = 0; i < g.size(); ++i)
            per_pixel.prior[i] = *surface_depth(spec, g.x(i % 64), g.y(i / 64)) + rng.uniform(-0.002, 0.002);
        const RadarImage c = magnitude_filter(mm2fsk_reconstruct(s_wide, per_pixel, desk_array(), wide));
        const double err_mm = max_surface_error(c, spec);

        const bool pass = err_narrow < 0.002 && max_from_prior <= 0.0075 && closest_wide > 0.002 && err_mm < 0.002;
        return {pass, fmt("2FSK d0.5 max error %.3f mm; 2FSK d10.0 within %.2f mm of the prior, >= %.1f mm from truth; "
                          "MM-2FSK d10.0 max error %.3f mm",
                          err_narrow * 1e3, max_from_prior * 1e3, closest_wide * 1e3, err_mm * 1e3)};
    }

    // ------------------------------------------------------------------ 4

    Outcome sweep_trend()
    {
        const auto start = Clock::now();
        ExperimentConfig c;
        c.seed = 4000;
        c.scene.seed = 4000;
        c.scene.slope_x = 0.03;
        c.frequency_configs.clear();
        for (const FrequencyPair &p : standard_frequency_pairs())
            c.frequency_configs.push_back(p.name);
        c.methods = {Method::mm2fsk};
        c.prior.mode = PriorMode::truth;
        c.prior.noise_sigma = 0.002;
        c.snr_db = 20.0;
        c.sweep_seeds = 20;
        const SweepReport rep = run_sweep(c);
        std::string medians;
        for (const SweepEntry &e : rep.entries)
            medians += fmt("%s%s=%.3f", medians.empty() ? "" : " ", e.frequency_config.c_str(), e.median * 1e3);
        const double rho = rep.trends.at(0).spearman;
        return {rho <= -0.8, fmt("medians [mm] %s; Spearman %.3f; non-increasing %s; %.1f s", medians.c_str(), rho,
                                 rep.trends[0].non_increasing ? "yes" : "no", seconds_since(start))};
    }

    // ------------------------------------------------------------------ 5

    Outcome three_carrier_contrast()
    {
        SceneSpec spec;
        const GridGeometry g = desk_grid();
        const Scene scene = make_scene(spec);
        const CandidateGrid prior = CandidateGrid::scalar(g, 0.40);

        const FrequencySet good = named_frequency_config("t0.5-10.0");
        const RadarImage a =
            magnitude_filter(fsk3_reconstruct(simulate_baseband(scene, desk_array(), good), prior, desk_array(), good));
        const double err_good = max_surface_error(a, spec);

        const FrequencySet bad = named_frequency_config("t1.0-10.0");
        const RadarImage b =
            magnitude_filter(fsk3_reconstruct(simulate_baseband(scene, desk_array(), bad), prior, desk_array(), bad));
        const double closest_bad = min_surface_error(b, spec);

        return {err_good < 0.001 && closest_bad > 0.01,
                fmt("t0.5-10.0 max error %.3f mm; t1.0-10.0 every pixel >= %.1f mm off", err_good * 1e3,
                    closest_bad * 1e3)};
    }

    // ------------------------------------------------------------------ 6

    Outcome backprojection_sanity()
    {
        const FrequencySet freqs = resolve_frequency_config("fscw16");
        const double bound = kSpeedOfLight / (2.0 * (freqs[freqs.size() - 1] - freqs[0]));
        VoxelGridSpec spec;
        spec.extents = {0.030, 0.030, 0.100};
        spec.resolution = {31, 31, 101};
        spec.center = {0.0, 0.0, 0.30};
        Rng rng(6001);
        double worst = 0.0;
        bool lateral_ok = true;
        const int trials = 5;
        for (int n = 0; n < trials; ++n)
        {
            const std::size_t u = 5 + rng.index(21), v = 5 + rng.index(21);
            const Vec3 target{spec.coordinate(0, u) + rng.uniform(-2e-4, 2e-4),
                              spec.coordinate(1, v) + rng.uniform(-2e-4, 2e-4), rng.uniform(0.27, 0.33)};
            const BasebandTensor s = simulate_baseband(test_support::point_scene(target), desk_array(), freqs);
            const RadarImage img = backproject(s, spec, desk_array(), freqs);
            std::size_t best = 0;
            for (std::size_t i = 0; i < img.geometry.size(); ++i)
                if (img.magnitude[i] > img.magnitude[best])
                    best = i;
            lateral_ok = lateral_ok && best == v * 31 + u;
            worst = std::max(worst, std::abs(img.depth[best] - target.z));
        }
        return {lateral_ok && worst < bound,
                fmt("%d targets, 1 mm voxels: lateral argmax %s, max depth error %.2f mm (bound %.1f mm)", trials,
                    lateral_ok ? "correct" : "WRONG", worst * 1e3, bound * 1e3)};
    }

    // ------------------------------------------------------------------ 7

    Outcome correlation_oracle()
    {
        Rng rng(7001);
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial)
        {
            const std::size_t T = 1 + rng.index(8), R = 1 + rng.index(8), F = 1 + rng.index(4);
            std::vector<Vec3> tx(T), rx(R);
            for (auto &p : tx)
                p = {rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-0.01, 0.01)};
            for (auto &p : rx)
                p = {rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(-0.01, 0.01)};
            const AntennaArray array(tx, rx);
            std::vector<double> hz;
            for (std::size_t k = 0; k < F; ++k)
                hz.push_back(72e9 + 2.5e9 * double(k) + rng.uniform(0, 1e9));
            const FrequencySet freqs(hz);
            GridGeometry g;
            g.width = 1 + rng.index(32);
            g.height = 1 + rng.index(32);
            g.pitch_x = g.pitch_y = 0.003;
            BasebandTensor s(T, R, F);
            for (Complex &z : s.data())
                z = {rng.normal(), rng.normal()};
            CandidateGrid grid = CandidateGrid::scalar(g, 0.3);
            for (std::size_t i = 0; i < g.size(); ++i)
            {
                grid.prior[i] = rng.uniform(0.2, 0.4);
                grid.valid[i] = i == 0 || rng.uniform() < 0.9;
            }
            const CorrelationField field = correlate_grid(s, grid, array, freqs, Execution{3});
            worst = std::max(worst, test_support::max_relative_difference(
                                        field.values, test_support::reference_correlate(s, grid, array, freqs)));
        }
        return {worst <= 1e-12, fmt("10 instances, worst relative difference %.2e", worst)};
    }

    // ------------------------------------------------------------------ 8

    Outcome geometry_oracles()
    {
        Rng rng(8001);
        std::string violation;
        for (int trial = 0; trial < 50 && violation.empty(); ++trial)
        {
            std::vector<Pixel> pts;
            const std::size_t n = 3 + rng.index(498);
            const std::int32_t span = trial % 5 == 0 ? 25 : 1000;
            for (std::size_t i = 0; i < n; ++i)
                pts.push_back({rng.integer(0, span), rng.integer(0, span)});
            pts.push_back({0, 0});
            pts.push_back({span, span});
            pts.push_back({0, span});
            violation = test_support::delaunay_violation(pts, delaunay_triangulate(pts));
        }

        // planar mesh from jittered samples of a tilted plane
        const double sx = 0.12, sy = -0.07, z0 = 0.31;
        auto plane = [&](double x, double y) { return z0 + sx * x + sy * y; };
        TriangleMesh mesh;
        for (int v = 0; v < 14; ++v)
            for (int u = 0; u < 14; ++u)
            {
                const double x = -0.039 + u * 0.006 + rng.uniform(-0.002, 0.002);
                const double y = -0.039 + v * 0.006 + rng.uniform(-0.002, 0.002);
                mesh.vertices.push_back({x, y, plane(x, y)});
                mesh.source_pixels.push_back({u, v});
            }
        const GridGeometry g = desk_grid();
        const CandidateGrid prior = rasterize_prior(triangulate(mesh), g);
        double raster_err = 0.0;
        std::size_t covered = 0;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (prior.valid[i])
            {
                ++covered;
                raster_err = std::max(raster_err, std::abs(prior.prior[i] - plane(g.x(i % 64), g.y(i / 64))));
            }

        double chamfer_err = 0.0;
        for (int trial = 0; trial < 10; ++trial)
        {
            std::vector<Vec3> a(1 + rng.index(2000)), b(1 + rng.index(2000));
            for (Vec3 &p : a)
                p = rng.point(-0.1, 0.1);
            for (Vec3 &p : b)
                p = rng.point(-0.1, 0.1);
            chamfer_err = std::max(chamfer_err, std::abs(chamfer_one_way(a, b) - test_support::brute_chamfer(a, b)));
        }

        const bool pass = violation.empty() && covered == g.size() && raster_err <= 1e-6 && chamfer_err <= 1e-12;
        return {pass, fmt("Delaunay 50 instances: %s; plane raster max error %.2e m over %zu pixels; "
                          "Chamfer max deviation %.2e m",
                          violation.empty() ? "all empty-circumcircle" : violation.c_str(), raster_err, covered,
                          chamfer_err)};
    }

    // ------------------------------------------------------------------ 9

    int run_cli(const std::string &cli, const std::string &args)
    {
        const std::string cmd = "\"" + cli + "\" " + args + " >/dev/null 2>&1";
        const int raw = std::system(cmd.c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    }

    Outcome cli_determinism(const std::string &cli)
    {
        const fs::path dir = test_support::scratch_dir("acceptance_cli");
        write_text_file(dir / "exp.json", R"({
  "seed": 9,
  "scene": {"kind": "step", "extent": 0.05},
  "array": {"tx": 12, "rx": 12, "aperture": 0.15},
  "grid": {"width": 32, "height": 32},
  "frequency_configs": ["d0.5", "d10.0", "t0.5-10.0", "fscw4"],
  "methods": ["2fsk", "mm2fsk", "3fsk", "bp"],
  "prior": {"mode": "camera", "camera": {"invalid_fraction": 0.1}},
  "noise": {"snr_db": 20},
  "backprojection": {"extents": [0.032, 0.032, 0.08], "resolution": [16, 16, 41], "center": [0, 0, 0.30]},
  "sweep": {"seeds": 2}
})");
        const char *commands[] = {"simulate", "prior", "reconstruct", "eval", "sweep", "report"};
        for (const char *run : {"w1", "w3"})
            for (const char *cmd : commands)
            {
                const std::string args = std::string(cmd) + " \"" + (dir / "exp.json").string() + "\" -o \"" +
                                         (dir / run).string() + "\" -j " + (run[1] == '1' ? "1" : "3");
                if (const int code = run_cli(cli, args); code != 0)
                    return {false, fmt("%s (%s) exited with %d", cmd, run, code)};
            }
        std::size_t files = 0;
        for (const auto &entry : fs::directory_iterator(dir / "w1"))
        {
            const fs::path other = dir / "w3" / entry.path().filename();
            if (!fs::exists(other))
                return {false, "missing " + other.string()};
            if (read_text_file(entry.path()) != read_text_file(other))
                return {false, entry.path().filename().string() + " differs between 1 and 3 workers"};
            ++files;
        }
        std::size_t other_files = 0;
        for ([[maybe_unused]] const auto &entry : fs::directory_iterator(dir / "w3"))
            ++other_files;
        return {files == other_files && files > 0,
                fmt("6 commands, 4 methods: %zu output files byte-identical for 1 and 3 workers", files)};
    }

    // ----------------------------------------------------------------- 10

    Outcome runtime_ordering(bool full_bp)
    {
        const AntennaArray array = array_profile("qar50").build();
        const FrequencySet freqs = named_frequency_config("d10.0");
        const BasebandTensor s = simulate_baseband(test_support::point_scene({0.0, 0.0, 0.30}), array, freqs);
        GridGeometry g;
        g.width = g.height = 301;
        const Execution exec{1};

        auto start = Clock::now();
        const RadarImage phase = mm2fsk_reconstruct(s, CandidateGrid::scalar(g, 0.30), array, freqs, exec);
        const double t_phase = seconds_since(start);

        // Backprojection cost is linear in the number of voxel columns. Unless
        // a full run is requested, time a band of rows of the full-size
        // volume and scale to 301 rows.
        VoxelGridSpec v;
        const std::size_t rows = full_bp ? 301 : 3;
        const double pitch_y = v.extents[1] / double(v.resolution[1] - 1);
        v.resolution[1] = rows;
        v.extents[1] = pitch_y * double(rows - 1);
        start = Clock::now();
        const RadarImage bp = backproject(s, v, array, freqs, exec);
        const double t_band = seconds_since(start);
        const double t_bp = t_band * 301.0 / double(rows);
        const double ratio = t_bp / t_phase;
        return {ratio >= 50.0 && phase.valid_count() == g.size() && bp.valid_count() == 301 * rows,
                fmt("MM-2FSK 301x301: %.2f s; BP 301x301x201: %.1f s (%s); ratio %.0fx", t_phase, t_bp,
                    full_bp ? "measured" : fmt("%zu-row band %.2f s, scaled", rows, t_band).c_str(), ratio)};
    }
} // namespace

int main(int argc, char **argv)
{
    if (argc < 2)
    {
        std::fprintf(stderr, "usage: %s <mmfsk CLI path> [--full-bp]\n", argv[0]);
        return 2;
    }
    const std::string cli = argv[1];
    const bool full_bp = argc > 2 && std::string(argv[2]) == "--full-bp";

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 window table", window_table},
        {"2 closed-loop recovery", closed_loop},
        {"3 wrap-failure ordering", wrap_ordering},
        {"4 frequency-difference trend", sweep_trend},
        {"5 three-carrier contrast", three_carrier_contrast},
        {"6 backprojection sanity", backprojection_sanity},
        {"7 correlation oracle", correlation_oracle},
        {"8 geometry oracles", geometry_oracles},
        {"9 CLI determinism", [&] { return cli_determinism(cli); }},
        {"10 runtime ordering", [&] { return runtime_ordering(full_bp); }},
    };

    int failures = 0;
    for (const auto &[name, check] : criteria)
    {
        Outcome o;
        try
        {
            o = check();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s  %-30s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
