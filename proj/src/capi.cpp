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

#include "mmfsk/mmfsk.h"

#include "mmfsk/depth_prior.hpp"
#include "mmfsk/experiment.hpp"
#include "mmfsk/io.hpp"
#include "mmfsk/reconstruct.hpp"
#include "mmfsk/simulate.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <string>

struct mmfsk_array
{
    mmfsk::AntennaArray value;
};
struct mmfsk_freqs
{
    mmfsk::FrequencySet value;
};
struct mmfsk_scene
{
    mmfsk::Scene value;
};
struct mmfsk_baseband
{
    mmfsk::BasebandTensor value;
};
struct mmfsk_grid
{
    mmfsk::CandidateGrid value;
};
struct mmfsk_image
{
    mmfsk::RadarImage value;
};

namespace
{
    thread_local std::string g_last_error;

    struct InvalidArgument
    {
        std::string what;
    };

    void require(bool ok, const char *what)
    {
        if (!ok)
            throw InvalidArgument{what};
    }

    mmfsk_status status_of(mmfsk::ErrorKind kind)
    {
        using K = mmfsk::ErrorKind;
        switch (kind)
        {
        case K::validation:
            return MMFSK_ERR_VALIDATION;
        case K::domain:
            return MMFSK_ERR_DOMAIN;
        case K::configuration:
            return MMFSK_ERR_CONFIGURATION;
        case K::structural:
            return MMFSK_ERR_STRUCTURAL;
        case K::insufficient_data:
            return MMFSK_ERR_INSUFFICIENT_DATA;
        case K::degenerate_geometry:
            return MMFSK_ERR_DEGENERATE_GEOMETRY;
        case K::empty_image:
            return MMFSK_ERR_EMPTY_IMAGE;
        case K::numerical:
            return MMFSK_ERR_NUMERICAL;
        case K::io:
            return MMFSK_ERR_IO;
        }
        return MMFSK_ERR_INTERNAL;
    }

    // Runs `body`, translating exceptions into a status and the thread's last error.
    template <class Body> mmfsk_status guarded(Body &&body) noexcept
    {
        try
        {
            body();
            g_last_error.clear();
            return MMFSK_OK;
        }
        catch (const mmfsk::Error &e)
        {
            g_last_error = e.what();
            return status_of(e.kind());
        }
        catch (const InvalidArgument &e)
        {
            g_last_error = e.what;
            return MMFSK_ERR_INVALID_ARGUMENT;
        }
        catch (const std::bad_alloc &)
        {
            g_last_error = "out of memory";
            return MMFSK_ERR_INTERNAL;
        }
        catch (const std::exception &e)
        {
            g_last_error = e.what();
            return MMFSK_ERR_INTERNAL;
        }
        catch (...)
        {
            g_last_error = "unknown failure";
            return MMFSK_ERR_INTERNAL;
        }
    }

    mmfsk::GridGeometry to_geometry(const mmfsk_geometry *g)
    {
        require(g != nullptr, "geometry must not be NULL");
        mmfsk::GridGeometry out;
        out.width = g->width;
        out.height = g->height;
        out.pitch_x = g->pitch_x;
        out.pitch_y = g->pitch_y;
        out.center_x = g->center_x;
        out.center_y = g->center_y;
        out.validate();
        return out;
    }

    void from_geometry(const mmfsk::GridGeometry &g, mmfsk_geometry *out)
    {
        out->width = g.width;
        out->height = g.height;
        out->pitch_x = g.pitch_x;
        out->pitch_y = g.pitch_y;
        out->center_x = g.center_x;
        out->center_y = g.center_y;
    }

    mmfsk::Execution exec_of(unsigned workers)
    {
        mmfsk::Execution e;
        e.workers = workers;
        return e;
    }

    void copy_plane(const std::vector<double> &src, const std::vector<std::uint8_t> &valid, double *dst,
                    std::size_t capacity)
    {
        require(dst != nullptr, "output buffer must not be NULL");
        require(capacity >= src.size(), "output buffer is too small");
        for (std::size_t i = 0; i < src.size(); ++i)
            dst[i] = valid[i] ? src[i] : std::numeric_limits<double>::quiet_NaN();
    }
} // namespace

extern "C" {

const char *mmfsk_version(void) { return MMFSK_VERSION; }

const char *mmfsk_last_error(void) { return g_last_error.c_str(); }

const char *mmfsk_status_name(mmfsk_status status)
{
    switch (status)
    {
    case MMFSK_OK:
        return "ok";
    case MMFSK_ERR_VALIDATION:
        return "validation";
    case MMFSK_ERR_DOMAIN:
        return "domain";
    case MMFSK_ERR_CONFIGURATION:
        return "configuration";
    case MMFSK_ERR_STRUCTURAL:
        return "structural";
    case MMFSK_ERR_INSUFFICIENT_DATA:
        return "insufficient-data";
    case MMFSK_ERR_DEGENERATE_GEOMETRY:
        return "degenerate-geometry";
    case MMFSK_ERR_EMPTY_IMAGE:
        return "empty-image";
    case MMFSK_ERR_NUMERICAL:
        return "numerical";
    case MMFSK_ERR_IO:
        return "io";
    case MMFSK_ERR_INVALID_ARGUMENT:
        return "invalid-argument";
    case MMFSK_ERR_INTERNAL:
        return "internal";
    }
    return "unknown";
}

int mmfsk_exit_code(mmfsk_status status)
{
    switch (status)
    {
    case MMFSK_OK:
        return 0;
    case MMFSK_ERR_IO:
        return 2;
    case MMFSK_ERR_EMPTY_IMAGE:
    case MMFSK_ERR_NUMERICAL:
    case MMFSK_ERR_INTERNAL:
        return 3;
    default:
        return 1;
    }
}

void mmfsk_default_geometry(mmfsk_geometry *out)
{
    if (out)
        from_geometry(mmfsk::GridGeometry{}, out);
}

void mmfsk_default_voxel_spec(mmfsk_voxel_spec *out)
{
    if (!out)
        return;
    const mmfsk::VoxelGridSpec v;
    for (int a = 0; a < 3; ++a)
    {
        out->extents[a] = v.extents[a];
        out->resolution[a] = v.resolution[a];
        out->center[a] = v.center[a];
    }
}

mmfsk_status mmfsk_max_unambiguous_depth(double delta_f_hz, double *out_m)
{
    return guarded([&] {
        require(out_m != nullptr, "output must not be NULL");
        *out_m = mmfsk::max_unambiguous_depth(delta_f_hz);
    });
}

mmfsk_status mmfsk_phase_to_depth_correction(double phase, double f_eff_hz, double *out_m)
{
    return guarded([&] {
        require(out_m != nullptr, "output must not be NULL");
        *out_m = mmfsk::phase_to_depth_correction(phase, f_eff_hz);
    });
}

mmfsk_status mmfsk_array_create_cross(size_t tx_count, size_t rx_count, double aperture, mmfsk_array **out)
{
    return guarded([&] {
        require(out != nullptr, "output handle must not be NULL");
        *out = new mmfsk_array{mmfsk::AntennaArray::cross(tx_count, rx_count, aperture)};
    });
}

mmfsk_status mmfsk_array_create(const double *tx_xyz, size_t tx_count, const double *rx_xyz, size_t rx_count,
                                mmfsk_array **out)
{
    return guarded([&] {
        require(out != nullptr, "output handle must not be NULL");
        require(tx_xyz != nullptr && rx_xyz != nullptr, "element positions must not be NULL");
        std::vector<mmfsk::Vec3> tx(tx_count), rx(rx_count);
        for (size_t i = 0; i < tx_count; ++i)
            tx[i] = {tx_xyz[3 * i], tx_xyz[3 * i + 1], tx_xyz[3 * i + 2]};
        for (size_t i = 0; i < rx_count; ++i)
            rx[i] = {rx_xyz[3 * i], rx_xyz[3 * i + 1], rx_xyz[3 * i + 2]};
        *out = new mmfsk_array{mmfsk::AntennaArray(std::move(tx), std::move(rx))};
    });
}

mmfsk_status mmfsk_array_counts(const mmfsk_array *array, size_t *tx_count, size_t *rx_count)
{
    return guarded([&] {
        require(array != nullptr, "array must not be NULL");
        if (tx_count)
            *tx_count = array->value.tx_count();
        if (rx_count)
            *rx_count = array->value.rx_count();
    });
}

void mmfsk_array_destroy(mmfsk_array *array) { delete array; }

mmfsk_status mmfsk_freqs_create(const double *hz, size_t count, mmfsk_freqs **out)
{
    return guarded([&] {
        require(out != nullptr, "output handle must not be NULL");
        require(hz != nullptr || count == 0, "frequencies must not be NULL");
        *out = new mmfsk_freqs{mmfsk::FrequencySet(std::vector<double>(hz, hz + count))};
    });
}

mmfsk_status mmfsk_freqs_create_named(const char *name, mmfsk_freqs **out)
{
    return guarded([&] {
        require(out != nullptr, "output handle must not be NULL");
        require(name != nullptr, "name must not be NULL");
        *out = new mmfsk_freqs{mmfsk::resolve_frequency_config(name)};
    });
}

mmfsk_status mmfsk_freqs_size(const mmfsk_freqs *freqs, size_t *count)
{
    return guarded([&] {
        require(freqs != nullptr && count != nullptr, "arguments must not be NULL");
        *count = freqs->value.size();
    });
}

mmfsk_status mmfsk_freqs_values(const mmfsk_freqs *freqs, double *hz, size_t capacity)
{
    return guarded([&] {
        require(freqs != nullptr && hz != nullptr, "arguments must not be NULL");
        require(capacity >= freqs->value.size(), "output buffer is too small");
        for (size_t k = 0; k < freqs->value.size(); ++k)
            hz[k] = freqs->value[k];
    });
}

void mmfsk_freqs_destroy(mmfsk_freqs *freqs) { delete freqs; }

mmfsk_status mmfsk_scene_create(const double *xyz, const double *reflectivity_re, const double *reflectivity_im,
                                size_t count, mmfsk_scene **out)
{
    return guarded([&] {
        require(out != nullptr, "output handle must not be NULL");
        require(xyz != nullptr || count == 0, "positions must not be NULL");
        mmfsk::Scene scene;
        for (size_t i = 0; i < count; ++i)
        {
            mmfsk::Target t;
            t.position = {xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]};
            t.reflectivity = mmfsk::Complex(reflectivity_re ? reflectivity_re[i] : 1.0,
                                            reflectivity_im ? reflectivity_im[i] : 0.0);
            scene.targets.push_back(t);
        }
        scene.validate();
        *out = new mmfsk_scene{std::move(scene)};
    });
}

mmfsk_status mmfsk_scene_create_from_json(const char *scene_json, mmfsk_scene **out)
{
    return guarded([&] {
        require(out != nullptr && scene_json != nullptr, "arguments must not be NULL");
        *out = new mmfsk_scene{mmfsk::make_scene(mmfsk::parse_scene_spec(scene_json))};
    });
}

mmfsk_status mmfsk_scene_size(const mmfsk_scene *scene, size_t *count)
{
    return guarded([&] {
        require(scene != nullptr && count != nullptr, "arguments must not be NULL");
        *count = scene->value.targets.size();
    });
}

void mmfsk_scene_destroy(mmfsk_scene *scene) { delete scene; }

mmfsk_status mmfsk_simulate(const mmfsk_scene *scene, const mmfsk_array *array, const mmfsk_freqs *freqs,
                            double snr_db, uint64_t seed, unsigned workers, mmfsk_baseband **out)
{
    return guarded([&] {
        require(scene && array && freqs && out, "arguments must not be NULL");
        mmfsk::NoiseSpec noise;
        if (!std::isnan(snr_db))
            noise.snr_db = snr_db;
        noise.seed = seed;
        mmfsk::SimulationOptions opts;
        opts.exec = exec_of(workers);
        *out = new mmfsk_baseband{mmfsk::simulate_baseband(scene->value, array->value, freqs->value, noise, opts)};
    });
}

mmfsk_status mmfsk_baseband_create(size_t tx, size_t rx, size_t freqs, const double *interleaved,
                                   mmfsk_baseband **out)
{
    return guarded([&] {
        require(out != nullptr && interleaved != nullptr, "arguments must not be NULL");
        mmfsk::BasebandTensor b(tx, rx, freqs);
        auto data = b.data();
        for (size_t i = 0; i < data.size(); ++i)
            data[i] = mmfsk::Complex(interleaved[2 * i], interleaved[2 * i + 1]);
        *out = new mmfsk_baseband{std::move(b)};
    });
}

mmfsk_status mmfsk_baseband_dims(const mmfsk_baseband *baseband, size_t *tx, size_t *rx, size_t *freqs)
{
    return guarded([&] {
        require(baseband != nullptr, "baseband must not be NULL");
        if (tx)
            *tx = baseband->value.tx_count();
        if (rx)
            *rx = baseband->value.rx_count();
        if (freqs)
            *freqs = baseband->value.freq_count();
    });
}

mmfsk_status mmfsk_baseband_copy(const mmfsk_baseband *baseband, double *interleaved, size_t capacity)
{
    return guarded([&] {
        require(baseband != nullptr && interleaved != nullptr, "arguments must not be NULL");
        const auto data = baseband->value.data();
        require(capacity >= 2 * data.size(), "output buffer is too small");
        for (size_t i = 0; i < data.size(); ++i)
        {
            interleaved[2 * i] = data[i].real();
            interleaved[2 * i + 1] = data[i].imag();
        }
    });
}

mmfsk_status mmfsk_baseband_read(const char *path, mmfsk_baseband **out)
{
    return guarded([&] {
        require(path != nullptr && out != nullptr, "arguments must not be NULL");
        *out = new mmfsk_baseband{mmfsk::read_fskt(path)};
    });
}

mmfsk_status mmfsk_baseband_write(const mmfsk_baseband *baseband, const char *path)
{
    return guarded([&] {
        require(baseband != nullptr && path != nullptr, "arguments must not be NULL");
        mmfsk::write_fskt(path, baseband->value);
    });
}

void mmfsk_baseband_destroy(mmfsk_baseband *baseband) { delete baseband; }

mmfsk_status mmfsk_grid_create_scalar(const mmfsk_geometry *geometry, double depth, mmfsk_grid **out)
{
    return guarded([&] {
        require(out != nullptr, "output handle must not be NULL");
        *out = new mmfsk_grid{mmfsk::CandidateGrid::scalar(to_geometry(geometry), depth)};
    });
}

mmfsk_status mmfsk_grid_create(const mmfsk_geometry *geometry, const double *prior, mmfsk_grid **out)
{
    return guarded([&] {
        require(out != nullptr && prior != nullptr, "arguments must not be NULL");
        mmfsk::CandidateGrid g;
        g.geometry = to_geometry(geometry);
        g.prior.assign(prior, prior + g.geometry.size());
        g.valid.resize(g.prior.size());
        for (size_t i = 0; i < g.prior.size(); ++i)
            g.valid[i] = std::isfinite(g.prior[i]) ? 1 : 0;
        g.validate();
        *out = new mmfsk_grid{std::move(g)};
    });
}

mmfsk_status mmfsk_grid_build_prior(const double *depth_map, size_t map_width, size_t map_height,
                                    const double intrinsics[4], const double rotation[9], const double translation[3],
                                    const mmfsk_geometry *geometry, double max_edge_length, unsigned workers,
                                    mmfsk_grid **out)
{
    return guarded([&] {
        require(depth_map && intrinsics && rotation && translation && out, "arguments must not be NULL");
        mmfsk::OpticalDepthMap map(map_width, map_height);
        for (size_t i = 0; i < map.depth.size(); ++i)
        {
            map.depth[i] = depth_map[i];
            map.valid[i] = std::isfinite(depth_map[i]) ? 1 : 0;
        }
        mmfsk::CameraIntrinsics K{intrinsics[0], intrinsics[1], intrinsics[2], intrinsics[3]};
        mmfsk::Extrinsics E;
        std::copy(rotation, rotation + 9, E.rotation.begin());
        E.translation = {translation[0], translation[1], translation[2]};
        mmfsk::RasterOptions ro;
        ro.max_edge_length = max_edge_length;
        ro.exec = exec_of(workers);
        *out = new mmfsk_grid{mmfsk::build_prior(map, K, E, to_geometry(geometry), ro)};
    });
}

mmfsk_status mmfsk_grid_copy(const mmfsk_grid *grid, double *prior, size_t capacity)
{
    return guarded([&] {
        require(grid != nullptr, "grid must not be NULL");
        copy_plane(grid->value.prior, grid->value.valid, prior, capacity);
    });
}

void mmfsk_grid_destroy(mmfsk_grid *grid) { delete grid; }

mmfsk_status mmfsk_reconstruct(mmfsk_method method, const mmfsk_baseband *baseband, const mmfsk_grid *grid,
                               const mmfsk_array *array, const mmfsk_freqs *freqs, const mmfsk_voxel_spec *voxels,
                               unsigned workers, mmfsk_image **out)
{
    return guarded([&] {
        require(baseband && array && freqs && out, "arguments must not be NULL");
        const mmfsk::Execution exec = exec_of(workers);
        mmfsk::RadarImage img;
        switch (method)
        {
        case MMFSK_METHOD_2FSK:
        case MMFSK_METHOD_MM2FSK:
        case MMFSK_METHOD_3FSK:
            require(grid != nullptr, "phase methods need a candidate grid");
            if (method == MMFSK_METHOD_2FSK)
                img = mmfsk::fsk2_reconstruct(baseband->value, grid->value, array->value, freqs->value, exec);
            else if (method == MMFSK_METHOD_MM2FSK)
                img = mmfsk::mm2fsk_reconstruct(baseband->value, grid->value, array->value, freqs->value, exec);
            else
                img = mmfsk::fsk3_reconstruct(baseband->value, grid->value, array->value, freqs->value, exec);
            break;
        case MMFSK_METHOD_BACKPROJECTION:
        {
            require(voxels != nullptr, "backprojection needs a voxel specification");
            mmfsk::VoxelGridSpec spec;
            for (int a = 0; a < 3; ++a)
            {
                spec.extents[a] = voxels->extents[a];
                spec.resolution[a] = voxels->resolution[a];
                spec.center[a] = voxels->center[a];
            }
            img = mmfsk::backproject(baseband->value, spec, array->value, freqs->value, exec);
            break;
        }
        default:
            throw InvalidArgument{"unknown method"};
        }
        *out = new mmfsk_image{std::move(img)};
    });
}

mmfsk_status mmfsk_image_filter(const mmfsk_image *image, double threshold_db, mmfsk_image **out)
{
    return guarded([&] {
        require(image != nullptr && out != nullptr, "arguments must not be NULL");
        *out = new mmfsk_image{mmfsk::magnitude_filter(image->value, threshold_db)};
    });
}

mmfsk_status mmfsk_image_geometry(const mmfsk_image *image, mmfsk_geometry *out)
{
    return guarded([&] {
        require(image != nullptr && out != nullptr, "arguments must not be NULL");
        from_geometry(image->value.geometry, out);
    });
}

mmfsk_status mmfsk_image_valid_count(const mmfsk_image *image, size_t *count)
{
    return guarded([&] {
        require(image != nullptr && count != nullptr, "arguments must not be NULL");
        *count = image->value.valid_count();
    });
}

mmfsk_status mmfsk_image_depth(const mmfsk_image *image, double *depth, size_t capacity)
{
    return guarded([&] {
        require(image != nullptr, "image must not be NULL");
        copy_plane(image->value.depth, image->value.valid, depth, capacity);
    });
}

mmfsk_status mmfsk_image_magnitude(const mmfsk_image *image, double *magnitude, size_t capacity)
{
    return guarded([&] {
        require(image != nullptr, "image must not be NULL");
        copy_plane(image->value.magnitude, image->value.valid, magnitude, capacity);
    });
}

mmfsk_status mmfsk_image_write_pfm(const mmfsk_image *image, const char *depth_path, const char *magnitude_path)
{
    return guarded([&] {
        require(image != nullptr, "image must not be NULL");
        const mmfsk::RadarImage &img = image->value;
        if (depth_path)
            mmfsk::write_pfm(depth_path, img.geometry.width, img.geometry.height, img.depth, img.valid);
        if (magnitude_path)
            mmfsk::write_pfm(magnitude_path, img.geometry.width, img.geometry.height, img.magnitude, img.valid);
    });
}

mmfsk_status mmfsk_image_write_ply(const mmfsk_image *image, const char *path)
{
    return guarded([&] {
        require(image != nullptr && path != nullptr, "arguments must not be NULL");
        const mmfsk::RadarImage &img = image->value;
        mmfsk::PointCloud cloud;
        cloud.points = mmfsk::image_points(img);
        for (size_t i = 0; i < img.geometry.size(); ++i)
            if (img.valid[i] && std::isfinite(img.depth[i]))
                cloud.scalar.push_back(img.magnitude[i]);
        mmfsk::write_ply(path, cloud);
    });
}

void mmfsk_image_destroy(mmfsk_image *image) { delete image; }

mmfsk_status mmfsk_run_command(const char *command, const char *config_path, const char *const *overrides,
                               size_t override_count, const char *output_dir, unsigned workers, char **summary)
{
    return guarded([&] {
        require(command != nullptr && config_path != nullptr, "command and configuration path must not be NULL");
        require(overrides != nullptr || override_count == 0, "overrides must not be NULL");
        const std::filesystem::path path(config_path);
        std::string text = mmfsk::read_text_file(path);
        if (override_count > 0)
            text = mmfsk::apply_overrides(text, std::vector<std::string>(overrides, overrides + override_count));
        mmfsk::ExperimentConfig config = mmfsk::parse_config(text, path.parent_path());
        if (output_dir != nullptr && *output_dir != '\0')
            config.output_dir = output_dir;
        const mmfsk::CommandOutcome outcome = mmfsk::run_command(command, config, exec_of(workers));
        if (summary)
        {
            char *buf = static_cast<char *>(std::malloc(outcome.summary.size() + 1));
            if (!buf)
                throw std::bad_alloc();
            std::memcpy(buf, outcome.summary.c_str(), outcome.summary.size() + 1);
            *summary = buf;
        }
    });
}

void mmfsk_string_free(char *text) { std::free(text); }

} // extern "C"
