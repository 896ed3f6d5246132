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

#ifndef MMFSK_RECONSTRUCT_HPP
#define MMFSK_RECONSTRUCT_HPP

#include "mmfsk/correlate.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace mmfsk
{
    // Per-pixel depth map with two magnitude planes:
    //   magnitude        mean over frequencies of |C_k|
    //   joint_magnitude  |mean over frequencies of C_k|  (what the dB filter uses)
    struct RadarImage
    {
        GridGeometry geometry;
        std::vector<double> depth;
        std::vector<double> magnitude;
        std::vector<double> joint_magnitude;
        std::vector<std::uint8_t> valid;

        explicit RadarImage(const GridGeometry &g = {});
        std::size_t valid_count() const noexcept;
    };

    struct VoxelGridSpec
    {
        std::array<double, 3> extents{0.30, 0.30, 0.20};
        std::array<std::size_t, 3> resolution{301, 301, 201};
        std::array<double, 3> center{0.0, 0.0, 0.30};

        void validate() const;
        double coordinate(int axis, std::size_t i) const;
        GridGeometry lateral_geometry() const;
    };

    // Two-carrier correction: d = prior + c * phi / (4 pi delta_f), where phi
    // is the residual phase of the differential phasor C_2 * conj(C_1).
    // Requires exactly two frequencies. Scalar and per-pixel priors take the
    // same path; the grid decides which one it is.
    RadarImage fsk2_reconstruct(const BasebandTensor &baseband, const CandidateGrid &grid,
                                const AntennaArray &array, const FrequencySet &freqs, const Execution &exec = {});

    // fsk2_reconstruct driven by a per-pixel prior from the depth-prior pipeline.
    RadarImage mm2fsk_reconstruct(const BasebandTensor &baseband, const CandidateGrid &prior_grid,
                                  const AntennaArray &array, const FrequencySet &freqs, const Execution &exec = {});

    // Frequency-pair roles for the three-carrier method: the smallest
    // difference drives the coarse stage, the remaining two the fine stage.
    struct ThreeCarrierPlan
    {
        std::array<std::size_t, 2> coarse;
        std::array<std::array<std::size_t, 2>, 2> fine;
        double coarse_delta_hz;
        double fine_delta_hz; // mean of the two fine differences
    };

    ThreeCarrierPlan plan_three_carrier(const FrequencySet &freqs);

    // Coherent average of the two fine-stage differential phasors.
    Complex combine_fine_differentials(Complex first, Complex second);

    // Coarse correction of the given prior with the low difference, then a
    // per-pixel re-correlation at the corrected depth and a fine correction
    // from the two high differences.
    RadarImage fsk3_reconstruct(const BasebandTensor &baseband, const CandidateGrid &grid,
                                const AntennaArray &array, const FrequencySet &freqs, const Execution &exec = {});

    // |1/(T R F) sum_k sum_{t,r} s * conj(w)| at one voxel.
    double voxel_magnitude(const PreparedBaseband &prepared, const Vec3 &p, CorrelationWorkspace &ws,
                           std::vector<Complex> &scratch);

    // Voxel backprojection followed by a maximum-intensity projection along z.
    // Ties keep the smallest z. Columns are processed in parallel.
    RadarImage backproject(const BasebandTensor &baseband, const VoxelGridSpec &spec, const AntennaArray &array,
                           const FrequencySet &freqs, const Execution &exec = {});

    inline constexpr double kDefaultThresholdDb = -14.0;

    // Invalidates pixels whose joint magnitude is more than |threshold_db|
    // below the image maximum. Throws empty_image when nothing is valid.
    RadarImage magnitude_filter(const RadarImage &image, double threshold_db = kDefaultThresholdDb);

} // namespace mmfsk

#endif
