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

#include "mmfsk/reconstruct.hpp"
#include "mmfsk/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mmfsk
{
    namespace
    {
        constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

        void require_freq_count(const FrequencySet &freqs, std::size_t n, const char *method)
        {
            if (freqs.size() != n)
                fail(ErrorKind::configuration, std::string(method) + " needs exactly " + std::to_string(n) +
                                                   " frequencies, got " + std::to_string(freqs.size()));
        }

        void fill_magnitudes(RadarImage &img, const CorrelationField &field, std::size_t i)
        {
            const std::size_t F = field.freq_count;
            double mean_abs = 0.0;
            Complex mean{};
            for (std::size_t k = 0; k < F; ++k)
            {
                mean_abs += std::abs(field.at(i, k));
                mean += field.at(i, k);
            }
            img.magnitude[i] = mean_abs / double(F);
            img.joint_magnitude[i] = std::abs(mean) / double(F);
        }
    } // namespace

    RadarImage::RadarImage(const GridGeometry &g)
        : geometry(g), depth(g.size(), kNaN), magnitude(g.size(), 0.0), joint_magnitude(g.size(), 0.0),
          valid(g.size(), 0)
    {
    }

    std::size_t RadarImage::valid_count() const noexcept
    {
        return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
    }

    void VoxelGridSpec::validate() const
    {
        for (int a = 0; a < 3; ++a)
        {
            if (resolution[a] < 1)
                fail(ErrorKind::validation, "voxel grid resolution must be >= 1");
            if (!(extents[a] > 0.0) || !std::isfinite(extents[a]) || !std::isfinite(center[a]))
                fail(ErrorKind::validation, "voxel grid extents must be positive");
        }
    }

    double VoxelGridSpec::coordinate(int axis, std::size_t i) const
    {
        const std::size_t n = resolution[axis];
        if (n == 1)
            return center[axis];
        return center[axis] + (double(i) - double(n - 1) / 2.0) * extents[axis] / double(n - 1);
    }

    GridGeometry VoxelGridSpec::lateral_geometry() const
    {
        GridGeometry g;
        g.width = resolution[0];
        g.height = resolution[1];
        g.pitch_x = resolution[0] > 1 ? extents[0] / double(resolution[0] - 1) : extents[0];
        g.pitch_y = resolution[1] > 1 ? extents[1] / double(resolution[1] - 1) : extents[1];
        g.center_x = center[0];
        g.center_y = center[1];
        return g;
    }

    RadarImage fsk2_reconstruct(const BasebandTensor &baseband, const CandidateGrid &grid,
                                const AntennaArray &array, const FrequencySet &freqs, const Execution &exec)
    {
        require_freq_count(freqs, 2, "2FSK");
        const CorrelationField field = correlate_grid(baseband, grid, array, freqs, exec);
        const double delta_f = freqs.difference(0, 1);

        RadarImage img(grid.geometry);
        for (std::size_t i = 0; i < grid.geometry.size(); ++i)
        {
            if (!grid.valid[i])
                continue;
            const Complex diff = differential_phasor(field.at(i, 0), field.at(i, 1));
            img.depth[i] = grid.prior[i] + phase_to_depth_correction(residual_phase(diff), delta_f);
            fill_magnitudes(img, field, i);
            img.valid[i] = 1;
        }
        return img;
    }

    RadarImage mm2fsk_reconstruct(const BasebandTensor &baseband, const CandidateGrid &prior_grid,
                                  const AntennaArray &array, const FrequencySet &freqs, const Execution &exec)
    {
        return fsk2_reconstruct(baseband, prior_grid, array, freqs, exec);
    }

    ThreeCarrierPlan plan_three_carrier(const FrequencySet &freqs)
    {
        require_freq_count(freqs, 3, "3FSK");
        const std::array<std::array<std::size_t, 2>, 3> pairs{{{1, 2}, {0, 1}, {0, 2}}};
        std::size_t low = 0;
        for (std::size_t p = 1; p < 3; ++p)
            if (freqs.difference(pairs[p][0], pairs[p][1]) < freqs.difference(pairs[low][0], pairs[low][1]))
                low = p;

        ThreeCarrierPlan plan{};
        plan.coarse = pairs[low];
        plan.coarse_delta_hz = freqs.difference(plan.coarse[0], plan.coarse[1]);
        std::size_t n = 0;
        double sum = 0.0;
        for (std::size_t p = 0; p < 3; ++p)
        {
            if (p == low)
                continue;
            plan.fine[n++] = pairs[p];
            sum += freqs.difference(pairs[p][0], pairs[p][1]);
        }
        plan.fine_delta_hz = sum / 2.0;
        return plan;
    }

    Complex combine_fine_differentials(Complex first, Complex second) { return 0.5 * (first + second); }

    RadarImage fsk3_reconstruct(const BasebandTensor &baseband, const CandidateGrid &grid,
                                const AntennaArray &array, const FrequencySet &freqs, const Execution &exec)
    {
        const ThreeCarrierPlan plan = plan_three_carrier(freqs);

        const CorrelationField coarse_field = correlate_grid(baseband, grid, array, freqs, exec);
        CandidateGrid refined = grid;
        for (std::size_t i = 0; i < grid.geometry.size(); ++i)
        {
            if (!grid.valid[i])
                continue;
            const Complex diff =
                differential_phasor(coarse_field.at(i, plan.coarse[0]), coarse_field.at(i, plan.coarse[1]));
            refined.prior[i] = grid.prior[i] + phase_to_depth_correction(residual_phase(diff), plan.coarse_delta_hz);
        }

        const CorrelationField fine_field = correlate_grid(baseband, refined, array, freqs, exec);
        RadarImage img(grid.geometry);
        for (std::size_t i = 0; i < grid.geometry.size(); ++i)
        {
            if (!grid.valid[i])
                continue;
            const Complex a = differential_phasor(fine_field.at(i, plan.fine[0][0]), fine_field.at(i, plan.fine[0][1]));
            const Complex b = differential_phasor(fine_field.at(i, plan.fine[1][0]), fine_field.at(i, plan.fine[1][1]));
            const Complex combined = combine_fine_differentials(a, b);
            img.depth[i] = refined.prior[i] + phase_to_depth_correction(residual_phase(combined), plan.fine_delta_hz);
            fill_magnitudes(img, fine_field, i);
            img.valid[i] = 1;
        }
        return img;
    }

    double voxel_magnitude(const PreparedBaseband &prepared, const Vec3 &p, CorrelationWorkspace &ws,
                           std::vector<Complex> &scratch)
    {
        const std::size_t F = prepared.freq_count();
        scratch.resize(F);
        correlate_point(prepared, p, ws, scratch);
        Complex sum{};
        for (std::size_t k = 0; k < F; ++k)
            sum += scratch[k];
        return std::abs(sum) / double(F);
    }

    RadarImage backproject(const BasebandTensor &baseband, const VoxelGridSpec &spec, const AntennaArray &array,
                           const FrequencySet &freqs, const Execution &exec)
    {
        spec.validate();
        const PreparedBaseband prepared(baseband, array, freqs);
        const GridGeometry geometry = spec.lateral_geometry();
        RadarImage img(geometry);

        std::vector<double> zs(spec.resolution[2]);
        for (std::size_t iz = 0; iz < zs.size(); ++iz)
            zs[iz] = spec.coordinate(2, iz);

        parallel_ranges(geometry.size(), resolve_workers(exec), [&](std::size_t begin, std::size_t end)
        {
            CorrelationWorkspace ws;
            std::vector<Complex> scratch;
            for (std::size_t i = begin; i < end; ++i)
            {
                const double x = spec.coordinate(0, i % geometry.width);
                const double y = spec.coordinate(1, i / geometry.width);
                double best = -1.0;
                double best_z = zs.front();
                for (double z : zs)
                {
                    const double m = voxel_magnitude(prepared, {x, y, z}, ws, scratch);
                    if (m > best)
                    {
                        best = m;
                        best_z = z;
                    }
                }
                img.depth[i] = best_z;
                img.magnitude[i] = best;
                img.joint_magnitude[i] = best;
                img.valid[i] = 1;
            }
        });
        return img;
    }

    RadarImage magnitude_filter(const RadarImage &image, double threshold_db)
    {
        double peak = 0.0;
        bool any = false;
        for (std::size_t i = 0; i < image.valid.size(); ++i)
            if (image.valid[i])
            {
                any = true;
                peak = std::max(peak, image.joint_magnitude[i]);
            }
        if (!any)
            fail(ErrorKind::empty_image, "magnitude filter received an image without valid pixels");

        RadarImage out = image;
        for (std::size_t i = 0; i < out.valid.size(); ++i)
        {
            if (!out.valid[i])
                continue;
            const double rel_db = peak > 0.0 ? 20.0 * std::log10(out.joint_magnitude[i] / peak)
                                             : -std::numeric_limits<double>::infinity();
            if (!(rel_db >= threshold_db))
                out.valid[i] = 0;
        }
        return out;
    }

} // namespace mmfsk
