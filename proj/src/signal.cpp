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

#include "mmfsk/signal.hpp"

#include <algorithm>
#include <cmath>

namespace mmfsk
{
    FrequencySet::FrequencySet(std::vector<double> hz) : hz_(std::move(hz))
    {
        if (hz_.empty())
            fail(ErrorKind::validation, "frequency set is empty");
        for (std::size_t k = 0; k < hz_.size(); ++k)
        {
            if (!std::isfinite(hz_[k]) || hz_[k] <= 0.0)
                fail(ErrorKind::validation, "frequencies must be finite and positive");
            if (k > 0 && !(hz_[k] > hz_[k - 1]))
                fail(ErrorKind::validation, "frequencies must be strictly increasing");
        }
    }

    std::size_t FrequencySet::find(double hz, double tolerance_hz) const noexcept
    {
        for (std::size_t k = 0; k < hz_.size(); ++k)
            if (std::abs(hz_[k] - hz) <= tolerance_hz)
                return k;
        return hz_.size();
    }

    FrequencySet fscw_sweep(double f_start_hz, double f_stop_hz, std::size_t count)
    {
        if (count == 0)
            fail(ErrorKind::validation, "sweep needs at least one step");
        if (count == 1)
            return FrequencySet({f_start_hz});
        std::vector<double> hz(count);
        const double step = (f_stop_hz - f_start_hz) / double(count - 1);
        for (std::size_t k = 0; k < count; ++k)
            hz[k] = f_start_hz + step * double(k);
        hz.back() = f_stop_hz;
        return FrequencySet(std::move(hz));
    }

    const std::vector<FrequencyPair> &standard_frequency_pairs()
    {
        static const std::vector<FrequencyPair> pairs = {
            {"d0.5", 81.45e9, 82.00e9},
            {"d1.0", 80.98e9, 82.00e9},
            {"d2.0", 79.95e9, 82.00e9},
            {"d4.0", 77.91e9, 82.00e9},
            {"d8.0", 73.97e9, 82.00e9},
            {"d10.0", 72.00e9, 82.00e9},
        };
        return pairs;
    }

    namespace
    {
        const FrequencyPair *find_pair(std::string_view name)
        {
            for (const auto &p : standard_frequency_pairs())
                if (p.name == name)
                    return &p;
            return nullptr;
        }
    } // namespace

    FrequencySet named_frequency_config(std::string_view name)
    {
        if (const FrequencyPair *p = find_pair(name))
            return FrequencySet({p->f1_hz, p->f2_hz});

        // "t<low>-<high>", e.g. "t0.5-10.0"
        if (name.size() > 1 && name.front() == 't')
        {
            const auto dash = name.find('-');
            if (dash != std::string_view::npos)
            {
                const std::string low = "d" + std::string(name.substr(1, dash - 1));
                const std::string high = "d" + std::string(name.substr(dash + 1));
                const FrequencyPair *a = find_pair(low);
                const FrequencyPair *b = find_pair(high);
                if (a && b && a != b)
                {
                    std::vector<double> hz = {a->f1_hz, b->f1_hz, a->f2_hz};
                    std::sort(hz.begin(), hz.end());
                    return FrequencySet(std::move(hz));
                }
            }
        }
        fail(ErrorKind::configuration, "unknown frequency configuration '" + std::string(name) + "'");
    }

    AntennaArray::AntennaArray(std::vector<Vec3> tx, std::vector<Vec3> rx) : tx_(std::move(tx)), rx_(std::move(rx))
    {
        if (tx_.empty() || rx_.empty())
            fail(ErrorKind::validation, "antenna array needs at least one TX and one RX element");
        for (const auto &p : tx_)
            if (!p.finite())
                fail(ErrorKind::validation, "non-finite TX position");
        for (const auto &p : rx_)
            if (!p.finite())
                fail(ErrorKind::validation, "non-finite RX position");
    }

    AntennaArray AntennaArray::cross(std::size_t tx_count, std::size_t rx_count, double aperture)
    {
        if (tx_count == 0 || rx_count == 0)
            fail(ErrorKind::validation, "antenna array needs at least one TX and one RX element");
        if (!(aperture > 0.0) || !std::isfinite(aperture))
            fail(ErrorKind::validation, "aperture must be positive");
        auto line = [aperture](std::size_t n, std::size_t i)
        { return n == 1 ? 0.0 : -aperture / 2 + aperture * double(i) / double(n - 1); };

        std::vector<Vec3> tx(tx_count), rx(rx_count);
        for (std::size_t i = 0; i < tx_count; ++i)
            tx[i] = {line(tx_count, i), 0.0, 0.0};
        for (std::size_t i = 0; i < rx_count; ++i)
            rx[i] = {0.0, line(rx_count, i), 0.0};
        return AntennaArray(std::move(tx), std::move(rx));
    }

    void Scene::validate() const
    {
        if (targets.empty())
            fail(ErrorKind::validation, "scene has no targets");
        for (const auto &t : targets)
        {
            if (!t.position.finite() || !std::isfinite(t.reflectivity.real()) ||
                !std::isfinite(t.reflectivity.imag()) || !std::isfinite(t.phase_offset))
                fail(ErrorKind::validation, "scene target has non-finite values");
            if (!(std::abs(t.reflectivity) > 0.0))
                fail(ErrorKind::validation, "scene target reflectivity must be non-zero");
        }
    }

    BasebandTensor::BasebandTensor(std::size_t tx, std::size_t rx, std::size_t freqs)
        : t_(tx), r_(rx), f_(freqs), data_(tx * rx * freqs)
    {
    }

    BasebandTensor BasebandTensor::select(std::span<const std::size_t> freq_indices) const
    {
        BasebandTensor out(t_, r_, freq_indices.size());
        for (std::size_t k : freq_indices)
            if (k >= f_)
                fail(ErrorKind::structural, "frequency index out of range");
        for (std::size_t t = 0; t < t_; ++t)
            for (std::size_t r = 0; r < r_; ++r)
                for (std::size_t j = 0; j < freq_indices.size(); ++j)
                    out.at(t, r, j) = at(t, r, freq_indices[j]);
        return out;
    }

    bool BasebandTensor::all_finite() const noexcept
    {
        return std::all_of(data_.begin(), data_.end(), [](const Complex &c)
                           { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
    }

    void BasebandTensor::check_dims(const AntennaArray &array, const FrequencySet &freqs) const
    {
        if (t_ != array.tx_count() || r_ != array.rx_count() || f_ != freqs.size())
            fail(ErrorKind::structural, "baseband dims (" + std::to_string(t_) + "x" + std::to_string(r_) + "x" +
                                            std::to_string(f_) + ") do not match array (" +
                                            std::to_string(array.tx_count()) + "x" +
                                            std::to_string(array.rx_count()) + ") and " +
                                            std::to_string(freqs.size()) + " frequencies");
    }

    BasebandTensor select_frequencies(const BasebandTensor &baseband, const FrequencySet &available,
                                      const FrequencySet &wanted)
    {
        if (baseband.freq_count() != available.size())
            fail(ErrorKind::structural, "baseband frequency count does not match its frequency set");
        std::vector<std::size_t> idx;
        for (double f : wanted.values())
        {
            const std::size_t k = available.find(f);
            if (k == available.size())
                fail(ErrorKind::configuration, "carrier " + std::to_string(f) + " Hz was not measured");
            idx.push_back(k);
        }
        return baseband.select(idx);
    }

    double round_trip_distance(const Vec3 &tx, const Vec3 &rx, const Vec3 &p)
    {
        return distance(tx, p) + distance(rx, p);
    }

    Complex hypothesis(double rho, double f_hz)
    {
        return std::polar(1.0, -2.0 * kPi * f_hz * rho / kSpeedOfLight);
    }

    double max_unambiguous_depth(double delta_f_hz)
    {
        if (!(delta_f_hz > 0.0))
            fail(ErrorKind::domain, "frequency difference must be positive");
        return kSpeedOfLight / (4.0 * delta_f_hz);
    }

    double phase_to_depth_correction(double phase, double f_eff_hz)
    {
        if (!(f_eff_hz > 0.0))
            fail(ErrorKind::domain, "effective frequency must be positive");
        return kSpeedOfLight * phase / (4.0 * kPi * f_eff_hz);
    }

    Complex differential_phasor(Complex c1, Complex c2) { return c2 * std::conj(c1); }

    double principal_arg(Complex z)
    {
        const double a = std::arg(z);
        return a <= -kPi ? kPi : a;
    }

} // namespace mmfsk
