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

#ifndef MMFSK_SIGNAL_HPP
#define MMFSK_SIGNAL_HPP

#include "mmfsk/common.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mmfsk
{
    // Ordered carrier frequencies in Hz; strictly increasing, all positive.
    class FrequencySet
    {
    public:
        FrequencySet() = default;
        explicit FrequencySet(std::vector<double> hz);

        std::size_t size() const noexcept { return hz_.size(); }
        double operator[](std::size_t k) const { return hz_[k]; }
        const std::vector<double> &values() const noexcept { return hz_; }

        // f[j] - f[i]; positive for i < j.
        double difference(std::size_t i, std::size_t j) const { return hz_.at(j) - hz_.at(i); }

        // Index of the carrier equal to `hz` within `tolerance_hz`, or size() if absent.
        std::size_t find(double hz, double tolerance_hz = 1.0) const noexcept;

        bool operator==(const FrequencySet &) const = default;

    private:
        std::vector<double> hz_;
    };

    // Evenly spaced FSCW sweep from f_start to f_stop (inclusive), `count` steps.
    FrequencySet fscw_sweep(double f_start_hz, double f_stop_hz, std::size_t count);

    // Named two-carrier configurations used throughout the evaluation
    // (f2 fixed at 82 GHz, f1 lowered to widen the difference).
    struct FrequencyPair
    {
        std::string name; // "d0.5", "d1.0", ...
        double f1_hz;
        double f2_hz;
        double delta_hz() const { return f2_hz - f1_hz; }
    };

    const std::vector<FrequencyPair> &standard_frequency_pairs();

    // Resolves "d0.5".."d10.0" to two carriers and "t0.5-10.0" style names
    // (three carriers: the f1 of both rows plus the shared 82 GHz) to three.
    FrequencySet named_frequency_config(std::string_view name);

    // MIMO aperture: T transmit and R receive element positions in meters.
    class AntennaArray
    {
    public:
        AntennaArray() = default;
        AntennaArray(std::vector<Vec3> tx, std::vector<Vec3> rx);

        // TX elements along x (y = 0), RX elements along y (x = 0), both spanning
        // `aperture` meters in the z = 0 plane. The pair midpoints form a regular
        // T x R grid of virtual phase centers.
        static AntennaArray cross(std::size_t tx_count, std::size_t rx_count, double aperture);

        std::size_t tx_count() const noexcept { return tx_.size(); }
        std::size_t rx_count() const noexcept { return rx_.size(); }
        std::size_t pair_count() const noexcept { return tx_.size() * rx_.size(); }
        const std::vector<Vec3> &tx() const noexcept { return tx_; }
        const std::vector<Vec3> &rx() const noexcept { return rx_; }

    private:
        std::vector<Vec3> tx_, rx_;
    };

    struct Target
    {
        Vec3 position;
        Complex reflectivity{1.0, 0.0};
        double phase_offset = 0.0; // constant phase term, radians
    };

    struct Scene
    {
        std::vector<Target> targets;

        // Throws validation error on empty scenes, zero reflectivity or non-finite values.
        void validate() const;
    };

    // Complex baseband measurements indexed (t, r, k), row-major with k fastest.
    class BasebandTensor
    {
    public:
        BasebandTensor() = default;
        BasebandTensor(std::size_t tx, std::size_t rx, std::size_t freqs);

        std::size_t tx_count() const noexcept { return t_; }
        std::size_t rx_count() const noexcept { return r_; }
        std::size_t freq_count() const noexcept { return f_; }

        Complex &at(std::size_t t, std::size_t r, std::size_t k) { return data_[(t * r_ + r) * f_ + k]; }
        const Complex &at(std::size_t t, std::size_t r, std::size_t k) const { return data_[(t * r_ + r) * f_ + k]; }

        std::span<Complex> data() noexcept { return data_; }
        std::span<const Complex> data() const noexcept { return data_; }

        // Copy keeping only the listed frequency indices, in the given order.
        BasebandTensor select(std::span<const std::size_t> freq_indices) const;

        bool all_finite() const noexcept;

        // Throws structural error unless dims agree with the array and frequency set.
        void check_dims(const AntennaArray &array, const FrequencySet &freqs) const;

    private:
        std::size_t t_ = 0, r_ = 0, f_ = 0;
        std::vector<Complex> data_;
    };

    // Picks the carriers of `wanted` out of a measurement taken at `available`.
    // Throws configuration error if a wanted carrier was not measured.
    BasebandTensor select_frequencies(const BasebandTensor &baseband, const FrequencySet &available,
                                      const FrequencySet &wanted);

    // ---- closed-form signal quantities --------------------------------------------------------

    // rho = |tx - p| + |rx - p|
    double round_trip_distance(const Vec3 &tx, const Vec3 &rx, const Vec3 &p);

    // Expected phasor exp(-j 2 pi f rho / c) of a point at round-trip distance rho.
    Complex hypothesis(double rho, double f_hz);

    // Half-width of the unambiguous correction window, c / (4 delta_f).
    double max_unambiguous_depth(double delta_f_hz);

    // Depth correction c * phase / (4 pi f_eff) for a residual phase in (-pi, pi].
    double phase_to_depth_correction(double phase, double f_eff_hz);

    // c2 * conj(c1): behaves like a phasor at the difference frequency.
    Complex differential_phasor(Complex c1, Complex c2);

    // Principal argument in (-pi, pi]; -pi is folded onto +pi.
    double principal_arg(Complex z);

    // Residual phase carried by a correlation result c = s * conj(w):
    // path excess maps to a positive phase, so this is principal_arg(conj(c)).
    inline double residual_phase(Complex c) { return principal_arg(std::conj(c)); }

} // namespace mmfsk

#endif
