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

#include "mmfsk/correlate.hpp"
#include "mmfsk/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mmfsk
{
    void GridGeometry::validate() const
    {
        if (width == 0 || height == 0)
            fail(ErrorKind::validation, "grid must have at least one pixel");
        if (!(pitch_x > 0.0) || !(pitch_y > 0.0) || !std::isfinite(pitch_x) || !std::isfinite(pitch_y))
            fail(ErrorKind::validation, "grid pitch must be positive");
        if (!std::isfinite(center_x) || !std::isfinite(center_y))
            fail(ErrorKind::validation, "grid center must be finite");
    }

    CandidateGrid CandidateGrid::scalar(const GridGeometry &geometry, double depth)
    {
        geometry.validate();
        if (!std::isfinite(depth))
            fail(ErrorKind::validation, "scalar prior must be finite");
        CandidateGrid grid;
        grid.geometry = geometry;
        grid.prior.assign(geometry.size(), depth);
        grid.valid.assign(geometry.size(), 1);
        return grid;
    }

    std::size_t CandidateGrid::valid_count() const noexcept
    {
        return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
    }

    Vec3 CandidateGrid::point(std::size_t index) const
    {
        const std::size_t u = index % geometry.width, v = index / geometry.width;
        return {geometry.x(u), geometry.y(v), prior[index]};
    }

    void CandidateGrid::validate() const
    {
        geometry.validate();
        if (prior.size() != geometry.size() || valid.size() != geometry.size())
            fail(ErrorKind::structural, "candidate grid buffers do not match its geometry");
        for (std::size_t i = 0; i < prior.size(); ++i)
            if (valid[i] && !std::isfinite(prior[i]))
                fail(ErrorKind::validation, "valid candidate has a non-finite prior");
    }

    DistanceTables precompute_distance_tables(const Vec3 &p, const AntennaArray &array)
    {
        DistanceTables d;
        d.tx.resize(array.tx_count());
        d.rx.resize(array.rx_count());
        for (std::size_t t = 0; t < array.tx_count(); ++t)
            d.tx[t] = distance(array.tx()[t], p);
        for (std::size_t r = 0; r < array.rx_count(); ++r)
            d.rx[r] = distance(p, array.rx()[r]);
        return d;
    }

    PreparedBaseband::PreparedBaseband(const BasebandTensor &baseband, const AntennaArray &array,
                                       const FrequencySet &freqs)
        : t_(array.tx_count()), r_(array.rx_count()), f_(freqs.size()), array_(&array)
    {
        baseband.check_dims(array, freqs);
        wavenumber_.resize(f_);
        for (std::size_t k = 0; k < f_; ++k)
            wavenumber_[k] = 2.0 * kPi * freqs[k] / kSpeedOfLight;
        re_.resize(f_ * t_ * r_);
        im_.resize(f_ * t_ * r_);
        for (std::size_t t = 0; t < t_; ++t)
            for (std::size_t r = 0; r < r_; ++r)
                for (std::size_t k = 0; k < f_; ++k)
                {
                    const Complex s = baseband.at(t, r, k);
                    re_[k * t_ * r_ + t * r_ + r] = s.real();
                    im_[k * t_ * r_ + t * r_ + r] = s.imag();
                }
    }

    void correlate_point(const PreparedBaseband &prepared, const Vec3 &p, CorrelationWorkspace &ws,
                         std::span<Complex> out)
    {
        const std::size_t T = prepared.tx_count(), R = prepared.rx_count(), F = prepared.freq_count();
        const AntennaArray &array = prepared.array();

        ws.dist.tx.resize(T);
        ws.dist.rx.resize(R);
        for (std::size_t t = 0; t < T; ++t)
            ws.dist.tx[t] = distance(array.tx()[t], p);
        for (std::size_t r = 0; r < R; ++r)
            ws.dist.rx[r] = distance(p, array.rx()[r]);
        ws.tx_re.resize(T);
        ws.tx_im.resize(T);
        ws.rx_re.resize(R);
        ws.rx_im.resize(R);

        const double norm = 1.0 / double(T * R);
        for (std::size_t k = 0; k < F; ++k)
        {
            const double wk = prepared.wavenumber(k);
            for (std::size_t t = 0; t < T; ++t)
            {
                const double ph = wk * ws.dist.tx[t];
                ws.tx_re[t] = std::cos(ph);
                ws.tx_im[t] = std::sin(ph);
            }
            for (std::size_t r = 0; r < R; ++r)
            {
                const double ph = wk * ws.dist.rx[r];
                ws.rx_re[r] = std::cos(ph);
                ws.rx_im[r] = std::sin(ph);
            }

            const double *sre = prepared.re(k);
            const double *sim = prepared.im(k);
            const double *hre = ws.rx_re.data();
            const double *him = ws.rx_im.data();
            double acc_re = 0.0, acc_im = 0.0;
            for (std::size_t t = 0; t < T; ++t)
            {
                const double *row_re = sre + t * R;
                const double *row_im = sim + t * R;
                double lr[4] = {0.0, 0.0, 0.0, 0.0}, li[4] = {0.0, 0.0, 0.0, 0.0};
                std::size_t r = 0;
                for (; r + 4 <= R; r += 4)
                    for (std::size_t l = 0; l < 4; ++l)
                    {
                        lr[l] += row_re[r + l] * hre[r + l] - row_im[r + l] * him[r + l];
                        li[l] += row_re[r + l] * him[r + l] + row_im[r + l] * hre[r + l];
                    }
                for (std::size_t l = 0; r < R; ++r, ++l)
                {
                    lr[l] += row_re[r] * hre[r] - row_im[r] * him[r];
                    li[l] += row_re[r] * him[r] + row_im[r] * hre[r];
                }
                const double in_re = (lr[0] + lr[1]) + (lr[2] + lr[3]);
                const double in_im = (li[0] + li[1]) + (li[2] + li[3]);
                acc_re += ws.tx_re[t] * in_re - ws.tx_im[t] * in_im;
                acc_im += ws.tx_re[t] * in_im + ws.tx_im[t] * in_re;
            }
            out[k] = Complex(acc_re * norm, acc_im * norm);
        }
    }

    namespace
    {
        CorrelationField correlate_impl(const BasebandTensor &baseband, const CandidateGrid &grid,
                                        const AntennaArray &array, const FrequencySet &freqs, unsigned workers)
        {
            grid.validate();
            const PreparedBaseband prepared(baseband, array, freqs);
            if (grid.valid_count() == 0)
                fail(ErrorKind::validation, "candidate grid has no valid pixel");

            const std::size_t F = freqs.size();
            CorrelationField field;
            field.geometry = grid.geometry;
            field.freq_count = F;
            field.valid = grid.valid;
            const double nan = std::numeric_limits<double>::quiet_NaN();
            field.values.assign(grid.geometry.size() * F, Complex(nan, nan));

            parallel_ranges(grid.geometry.size(), workers, [&](std::size_t begin, std::size_t end)
            {
                CorrelationWorkspace ws;
                for (std::size_t i = begin; i < end; ++i)
                {
                    if (!grid.valid[i])
                        continue;
                    correlate_point(prepared, grid.point(i), ws,
                                    std::span<Complex>(field.values.data() + i * F, F));
                }
            });
            return field;
        }
    } // namespace

    CorrelationField correlate_grid(const BasebandTensor &baseband, const CandidateGrid &grid,
                                    const AntennaArray &array, const FrequencySet &freqs, const Execution &exec)
    {
        return correlate_impl(baseband, grid, array, freqs, resolve_workers(exec));
    }

    CorrelationField correlate_grid_serial(const BasebandTensor &baseband, const CandidateGrid &grid,
                                           const AntennaArray &array, const FrequencySet &freqs)
    {
        return correlate_impl(baseband, grid, array, freqs, 1);
    }

} // namespace mmfsk
