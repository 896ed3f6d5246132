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

#ifndef MMFSK_CORRELATE_HPP
#define MMFSK_CORRELATE_HPP

#include "mmfsk/signal.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mmfsk
{
    // Regular lateral pixel grid in the radar frame. Pixel (u, v) sits at
    // x = center_x + (u - (width - 1) / 2) * pitch_x, likewise for y.
    // Storage everywhere is row-major: index = v * width + u.
    struct GridGeometry
    {
        std::size_t width = 64, height = 64;
        double pitch_x = 0.001, pitch_y = 0.001;
        double center_x = 0.0, center_y = 0.0;

        std::size_t size() const noexcept { return width * height; }
        double x(std::size_t u) const noexcept { return center_x + (double(u) - double(width - 1) / 2.0) * pitch_x; }
        double y(std::size_t v) const noexcept { return center_y + (double(v) - double(height - 1) / 2.0) * pitch_y; }
        // continuous pixel coordinates of a lateral position
        double u_of(double xm) const noexcept { return (xm - center_x) / pitch_x + double(width - 1) / 2.0; }
        double v_of(double ym) const noexcept { return (ym - center_y) / pitch_y + double(height - 1) / 2.0; }

        void validate() const;
        bool operator==(const GridGeometry &) const = default;
    };

    // Candidate points (x(u), y(v), prior depth) with a validity flag per pixel.
    struct CandidateGrid
    {
        GridGeometry geometry;
        std::vector<double> prior;
        std::vector<std::uint8_t> valid;

        static CandidateGrid scalar(const GridGeometry &geometry, double depth);

        std::size_t valid_count() const noexcept;
        Vec3 point(std::size_t index) const;
        void validate() const;
    };

    // Mean residual phasor per pixel and frequency (pixel-major, frequency
    // fastest). Invalid pixels hold NaN in every frequency slot.
    struct CorrelationField
    {
        GridGeometry geometry;
        std::size_t freq_count = 0;
        std::vector<Complex> values;
        std::vector<std::uint8_t> valid;

        Complex at(std::size_t pixel, std::size_t k) const { return values[pixel * freq_count + k]; }
    };

    struct DistanceTables
    {
        std::vector<double> tx; // |r_TX,t - p|
        std::vector<double> rx; // |p - r_RX,r|
    };

    // One-way distances from p to every element; rho(t, r) = tx[t] + rx[r].
    DistanceTables precompute_distance_tables(const Vec3 &p, const AntennaArray &array);

    // The baseband re-laid out per frequency as split real/imaginary planes so
    // the pair loop runs over contiguous memory.
    class PreparedBaseband
    {
    public:
        PreparedBaseband(const BasebandTensor &baseband, const AntennaArray &array, const FrequencySet &freqs);

        std::size_t tx_count() const noexcept { return t_; }
        std::size_t rx_count() const noexcept { return r_; }
        std::size_t freq_count() const noexcept { return f_; }
        const AntennaArray &array() const noexcept { return *array_; }
        double wavenumber(std::size_t k) const noexcept { return wavenumber_[k]; }
        const double *re(std::size_t k) const noexcept { return re_.data() + k * t_ * r_; }
        const double *im(std::size_t k) const noexcept { return im_.data() + k * t_ * r_; }

    private:
        std::size_t t_, r_, f_;
        const AntennaArray *array_;
        std::vector<double> wavenumber_, re_, im_;
    };

    // Per-thread scratch for correlate_point.
    struct CorrelationWorkspace
    {
        DistanceTables dist;
        std::vector<double> tx_re, tx_im, rx_re, rx_im;
    };

    // C_k(p) = 1/(T R) * sum_{t,r} s[t,r,k] * conj(w(rho(t,r,p), f_k)) for every k.
    //
    // The conjugated hypothesis factors into exp(j k d_tx) * exp(j k d_rx), so
    // each point needs O(T + R) transcendental evaluations and T * R complex
    // multiply-adds. Fixed accumulation order: for each t (ascending) the
    // r-sum is formed in four interleaved lanes combined as (l0 + l1) + (l2 + l3),
    // then added to the running t-sum. The order depends only on T and R.
    void correlate_point(const PreparedBaseband &prepared, const Vec3 &p, CorrelationWorkspace &ws,
                         std::span<Complex> out);

    // Correlates every valid pixel; pixels are split into contiguous ranges
    // across workers and never shared, so the output is bit-identical for any
    // worker count.
    CorrelationField correlate_grid(const BasebandTensor &baseband, const CandidateGrid &grid,
                                    const AntennaArray &array, const FrequencySet &freqs, const Execution &exec = {});

    // Same kernel on the calling thread only.
    CorrelationField correlate_grid_serial(const BasebandTensor &baseband, const CandidateGrid &grid,
                                           const AntennaArray &array, const FrequencySet &freqs);

} // namespace mmfsk

#endif
