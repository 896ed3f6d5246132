/* SPDX-License-Identifier: Apache-2.0
 *
 * mmfsk - multimodal frequency-shift-keying MIMO radar depth imaging
 * Copyright (C) 2026 The mmfsk Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 * ------------------------------------------------------------------------ */

#ifndef MMFSK_H
#define MMFSK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(MMFSK_BUILDING_LIBRARY)
#define MMFSK_API __declspec(dllexport)
#else
#define MMFSK_API __declspec(dllimport)
#endif
#else
#define MMFSK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every function returns a status; details of the most recent failure on the
 * calling thread are available from mmfsk_last_error(). Output handles are
 * only written on success. Lengths in meters, frequencies in Hz. */
typedef enum mmfsk_status
{
    MMFSK_OK = 0,
    MMFSK_ERR_VALIDATION = 1,
    MMFSK_ERR_DOMAIN = 2,
    MMFSK_ERR_CONFIGURATION = 3,
    MMFSK_ERR_STRUCTURAL = 4,
    MMFSK_ERR_INSUFFICIENT_DATA = 5,
    MMFSK_ERR_DEGENERATE_GEOMETRY = 6,
    MMFSK_ERR_EMPTY_IMAGE = 7,
    MMFSK_ERR_NUMERICAL = 8,
    MMFSK_ERR_IO = 9,
    MMFSK_ERR_INVALID_ARGUMENT = 10,
    MMFSK_ERR_INTERNAL = 11
} mmfsk_status;

typedef enum mmfsk_method
{
    MMFSK_METHOD_2FSK = 0,
    MMFSK_METHOD_MM2FSK = 1,
    MMFSK_METHOD_3FSK = 2,
    MMFSK_METHOD_BACKPROJECTION = 3
} mmfsk_method;

typedef struct mmfsk_array mmfsk_array;
typedef struct mmfsk_freqs mmfsk_freqs;
typedef struct mmfsk_scene mmfsk_scene;
typedef struct mmfsk_baseband mmfsk_baseband;
typedef struct mmfsk_grid mmfsk_grid;
typedef struct mmfsk_image mmfsk_image;

/* Regular lateral pixel grid; pixel (u, v) sits at
 * center + (index - (count - 1) / 2) * pitch on each axis. */
typedef struct mmfsk_geometry
{
    size_t width, height;
    double pitch_x, pitch_y;
    double center_x, center_y;
} mmfsk_geometry;

typedef struct mmfsk_voxel_spec
{
    double extents[3];
    size_t resolution[3];
    double center[3];
} mmfsk_voxel_spec;

/* ---- library ------------------------------------------------------------ */

MMFSK_API const char *mmfsk_version(void);
MMFSK_API const char *mmfsk_last_error(void);
MMFSK_API const char *mmfsk_status_name(mmfsk_status status);

/* Process exit code for a status: 0 success, 1 invalid input or
 * configuration, 2 I/O, 3 numerical failure (including empty images). */
MMFSK_API int mmfsk_exit_code(mmfsk_status status);

MMFSK_API void mmfsk_default_geometry(mmfsk_geometry *out);
MMFSK_API void mmfsk_default_voxel_spec(mmfsk_voxel_spec *out);

/* ---- closed-form helpers ------------------------------------------------ */

MMFSK_API mmfsk_status mmfsk_max_unambiguous_depth(double delta_f_hz, double *out_m);
MMFSK_API mmfsk_status mmfsk_phase_to_depth_correction(double phase, double f_eff_hz, double *out_m);

/* ---- antenna arrays ----------------------------------------------------- */

MMFSK_API mmfsk_status mmfsk_array_create_cross(size_t tx_count, size_t rx_count, double aperture,
                                                mmfsk_array **out);
/* tx_xyz holds 3 * tx_count doubles, rx_xyz 3 * rx_count. */
MMFSK_API mmfsk_status mmfsk_array_create(const double *tx_xyz, size_t tx_count, const double *rx_xyz,
                                          size_t rx_count, mmfsk_array **out);
MMFSK_API mmfsk_status mmfsk_array_counts(const mmfsk_array *array, size_t *tx_count, size_t *rx_count);
MMFSK_API void mmfsk_array_destroy(mmfsk_array *array);

/* ---- carrier sets ------------------------------------------------------- */

MMFSK_API mmfsk_status mmfsk_freqs_create(const double *hz, size_t count, mmfsk_freqs **out);
/* Names: "d0.5" ... "d10.0", "t0.5-10.0" style triples, "fscw<N>" sweeps. */
MMFSK_API mmfsk_status mmfsk_freqs_create_named(const char *name, mmfsk_freqs **out);
MMFSK_API mmfsk_status mmfsk_freqs_size(const mmfsk_freqs *freqs, size_t *count);
MMFSK_API mmfsk_status mmfsk_freqs_values(const mmfsk_freqs *freqs, double *hz, size_t capacity);
MMFSK_API void mmfsk_freqs_destroy(mmfsk_freqs *freqs);

/* ---- scenes ------------------------------------------------------------- */

/* Point targets; reflectivity arrays may be NULL (defaults 1 + 0j). */
MMFSK_API mmfsk_status mmfsk_scene_create(const double *xyz, const double *reflectivity_re,
                                          const double *reflectivity_im, size_t count, mmfsk_scene **out);
/* Synthetic surface from a JSON scene description (same keys as the
 * "scene" object of an experiment configuration). */
MMFSK_API mmfsk_status mmfsk_scene_create_from_json(const char *scene_json, mmfsk_scene **out);
MMFSK_API mmfsk_status mmfsk_scene_size(const mmfsk_scene *scene, size_t *count);
MMFSK_API void mmfsk_scene_destroy(mmfsk_scene *scene);

/* ---- baseband tensors --------------------------------------------------- */

/* snr_db: pass NaN for a noise-free tensor. */
MMFSK_API mmfsk_status mmfsk_simulate(const mmfsk_scene *scene, const mmfsk_array *array, const mmfsk_freqs *freqs,
                                      double snr_db, uint64_t seed, unsigned workers, mmfsk_baseband **out);
/* interleaved holds 2 * T * R * F doubles (re, im) in (t, r, k) order. */
MMFSK_API mmfsk_status mmfsk_baseband_create(size_t tx, size_t rx, size_t freqs, const double *interleaved,
                                             mmfsk_baseband **out);
MMFSK_API mmfsk_status mmfsk_baseband_dims(const mmfsk_baseband *baseband, size_t *tx, size_t *rx, size_t *freqs);
MMFSK_API mmfsk_status mmfsk_baseband_copy(const mmfsk_baseband *baseband, double *interleaved, size_t capacity);
MMFSK_API mmfsk_status mmfsk_baseband_read(const char *path, mmfsk_baseband **out);
MMFSK_API mmfsk_status mmfsk_baseband_write(const mmfsk_baseband *baseband, const char *path);
MMFSK_API void mmfsk_baseband_destroy(mmfsk_baseband *baseband);

/* ---- candidate grids (depth priors) ------------------------------------- */

MMFSK_API mmfsk_status mmfsk_grid_create_scalar(const mmfsk_geometry *geometry, double depth, mmfsk_grid **out);
/* prior holds width * height depths, row-major; NaN marks invalid pixels. */
MMFSK_API mmfsk_status mmfsk_grid_create(const mmfsk_geometry *geometry, const double *prior, mmfsk_grid **out);
/* Optical depth map (NaN = no measurement) through back-projection,
 * triangulation, the camera-to-radar transform p_r = R p_c + t and
 * rasterization. intrinsics = {fu, fv, cu, cv}; rotation row-major. */
MMFSK_API mmfsk_status mmfsk_grid_build_prior(const double *depth_map, size_t map_width, size_t map_height,
                                              const double intrinsics[4], const double rotation[9],
                                              const double translation[3], const mmfsk_geometry *geometry,
                                              double max_edge_length, unsigned workers, mmfsk_grid **out);
MMFSK_API mmfsk_status mmfsk_grid_copy(const mmfsk_grid *grid, double *prior, size_t capacity);
MMFSK_API void mmfsk_grid_destroy(mmfsk_grid *grid);

/* ---- reconstruction ----------------------------------------------------- */

/* grid is required for the phase methods and ignored for backprojection;
 * voxels is required for backprojection and ignored otherwise. */
MMFSK_API mmfsk_status mmfsk_reconstruct(mmfsk_method method, const mmfsk_baseband *baseband,
                                         const mmfsk_grid *grid, const mmfsk_array *array,
                                         const mmfsk_freqs *freqs, const mmfsk_voxel_spec *voxels,
                                         unsigned workers, mmfsk_image **out);
MMFSK_API mmfsk_status mmfsk_image_filter(const mmfsk_image *image, double threshold_db, mmfsk_image **out);
MMFSK_API mmfsk_status mmfsk_image_geometry(const mmfsk_image *image, mmfsk_geometry *out);
MMFSK_API mmfsk_status mmfsk_image_valid_count(const mmfsk_image *image, size_t *count);
/* Each copies width * height doubles; invalid depths read as NaN. */
MMFSK_API mmfsk_status mmfsk_image_depth(const mmfsk_image *image, double *depth, size_t capacity);
MMFSK_API mmfsk_status mmfsk_image_magnitude(const mmfsk_image *image, double *magnitude, size_t capacity);
MMFSK_API mmfsk_status mmfsk_image_write_pfm(const mmfsk_image *image, const char *depth_path,
                                             const char *magnitude_path);
MMFSK_API mmfsk_status mmfsk_image_write_ply(const mmfsk_image *image, const char *path);
MMFSK_API void mmfsk_image_destroy(mmfsk_image *image);

/* ---- experiment commands ------------------------------------------------ */

/* Runs simulate, prior, reconstruct, eval, sweep or report for a JSON
 * experiment configuration read from config_path. overrides holds
 * "dotted.key=value" assignments applied before parsing. output_dir, when
 * not NULL, replaces the configured output directory. workers = 0 picks a
 * default. On success *summary (if not NULL) receives a heap string to be
 * released with mmfsk_string_free. */
MMFSK_API mmfsk_status mmfsk_run_command(const char *command, const char *config_path,
                                         const char *const *overrides, size_t override_count,
                                         const char *output_dir, unsigned workers, char **summary);
MMFSK_API void mmfsk_string_free(char *text);

#ifdef __cplusplus
}
#endif

#endif
