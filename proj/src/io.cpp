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

#include "mmfsk/io.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace mmfsk
{
    namespace
    {
        static_assert(std::endian::native == std::endian::little, "binary containers assume a little-endian host");

        constexpr std::uint32_t kContainerVersion = 1;

        [[noreturn]] void io_fail(const std::filesystem::path &path, const std::string &what)
        {
            fail(ErrorKind::io, path.string() + ": " + what);
        }

        std::ofstream open_out(const std::filesystem::path &path, bool binary)
        {
            std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
            if (!out)
                io_fail(path, "cannot open for writing");
            return out;
        }

        std::ifstream open_in(const std::filesystem::path &path, bool binary)
        {
            std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
            if (!in)
                io_fail(path, "cannot open for reading");
            return in;
        }

        void put_u32(std::ostream &out, std::uint32_t v) { out.write(reinterpret_cast<const char *>(&v), 4); }

        std::uint32_t get_u32(std::istream &in, const std::filesystem::path &path)
        {
            std::uint32_t v = 0;
            if (!in.read(reinterpret_cast<char *>(&v), 4))
                io_fail(path, "truncated header");
            return v;
        }

        std::uint32_t checked_u32(std::size_t v)
        {
            if (v > std::numeric_limits<std::uint32_t>::max())
                fail(ErrorKind::validation, "dimension does not fit the container header");
            return std::uint32_t(v);
        }

        void write_complex64(std::ostream &out, std::span<const Complex> values)
        {
            std::vector<float> buf(2 * values.size());
            for (std::size_t i = 0; i < values.size(); ++i)
            {
                buf[2 * i] = float(values[i].real());
                buf[2 * i + 1] = float(values[i].imag());
            }
            out.write(reinterpret_cast<const char *>(buf.data()), std::streamsize(buf.size() * sizeof(float)));
        }

        void read_complex64(std::istream &in, std::span<Complex> values, const std::filesystem::path &path)
        {
            std::vector<float> buf(2 * values.size());
            if (!in.read(reinterpret_cast<char *>(buf.data()), std::streamsize(buf.size() * sizeof(float))))
                io_fail(path, "truncated payload");
            for (std::size_t i = 0; i < values.size(); ++i)
                values[i] = Complex(buf[2 * i], buf[2 * i + 1]);
            if (in.peek() != std::char_traits<char>::eof())
                io_fail(path, "trailing bytes after payload");
        }

        void write_header(std::ostream &out, const char magic[4], std::uint32_t a, std::uint32_t b, std::uint32_t c)
        {
            out.write(magic, 4);
            put_u32(out, kContainerVersion);
            put_u32(out, a);
            put_u32(out, b);
            put_u32(out, c);
        }

        std::array<std::uint32_t, 3> read_header(std::istream &in, const char magic[4],
                                                 const std::filesystem::path &path)
        {
            char m[4];
            if (!in.read(m, 4))
                io_fail(path, "truncated header");
            if (std::memcmp(m, magic, 4) != 0)
                io_fail(path, std::string("bad magic, expected ") + std::string(magic, 4));
            const std::uint32_t version = get_u32(in, path);
            if (version != kContainerVersion)
                io_fail(path, "unsupported container version " + std::to_string(version));
            std::array<std::uint32_t, 3> dims{get_u32(in, path), get_u32(in, path), get_u32(in, path)};
            const double total = double(dims[0]) * double(dims[1]) * double(dims[2]);
            if (dims[0] == 0 || dims[1] == 0 || dims[2] == 0 || total > 1e10)
                io_fail(path, "invalid dimensions in header");
            return dims;
        }
    } // namespace

    void write_fskt(const std::filesystem::path &path, const BasebandTensor &baseband)
    {
        auto out = open_out(path, true);
        write_header(out, "FSKT", checked_u32(baseband.tx_count()), checked_u32(baseband.rx_count()),
                     checked_u32(baseband.freq_count()));
        write_complex64(out, baseband.data());
        if (!out)
            io_fail(path, "write failed");
    }

    BasebandTensor read_fskt(const std::filesystem::path &path)
    {
        auto in = open_in(path, true);
        const auto d = read_header(in, "FSKT", path);
        BasebandTensor b(d[0], d[1], d[2]);
        read_complex64(in, b.data(), path);
        return b;
    }

    void write_fskc(const std::filesystem::path &path, const CorrelationField &field)
    {
        const std::size_t W = field.geometry.width, H = field.geometry.height, F = field.freq_count;
        if (field.values.size() != W * H * F || field.valid.size() != W * H)
            fail(ErrorKind::structural, "correlation field buffers do not match its geometry");
        auto out = open_out(path, true);
        write_header(out, "FSKC", checked_u32(H), checked_u32(W), checked_u32(F));
        std::vector<Complex> vals = field.values;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t i = 0; i < W * H; ++i)
            if (!field.valid[i])
                for (std::size_t k = 0; k < F; ++k)
                    vals[i * F + k] = Complex(nan, nan);
        write_complex64(out, vals);
        if (!out)
            io_fail(path, "write failed");
    }

    CorrelationField read_fskc(const std::filesystem::path &path)
    {
        auto in = open_in(path, true);
        const auto d = read_header(in, "FSKC", path);
        CorrelationField f;
        f.geometry.height = d[0];
        f.geometry.width = d[1];
        f.freq_count = d[2];
        f.values.resize(std::size_t(d[0]) * d[1] * d[2]);
        read_complex64(in, f.values, path);
        f.valid.assign(std::size_t(d[0]) * d[1], 1);
        for (std::size_t i = 0; i < f.valid.size(); ++i)
            for (std::size_t k = 0; k < f.freq_count; ++k)
            {
                const Complex c = f.values[i * f.freq_count + k];
                if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
                    f.valid[i] = 0;
            }
        return f;
    }

    std::vector<std::uint8_t> FloatImage::finite_mask() const
    {
        std::vector<std::uint8_t> m(values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            m[i] = std::isfinite(values[i]) ? 1 : 0;
        return m;
    }

    void write_pfm(const std::filesystem::path &path, std::size_t width, std::size_t height,
                   std::span<const double> values, std::span<const std::uint8_t> valid)
    {
        if (width == 0 || height == 0 || values.size() != width * height ||
            (!valid.empty() && valid.size() != width * height))
            fail(ErrorKind::structural, "image buffers do not match its dimensions");
        auto out = open_out(path, true);
        out << "Pf\n" << width << ' ' << height << "\n-1.0\n";
        std::vector<float> row(width);
        for (std::size_t rr = 0; rr < height; ++rr)
        {
            const std::size_t v = height - 1 - rr;
            for (std::size_t u = 0; u < width; ++u)
            {
                const std::size_t i = v * width + u;
                const bool ok = valid.empty() || valid[i];
                row[u] = ok ? float(values[i]) : std::numeric_limits<float>::quiet_NaN();
            }
            out.write(reinterpret_cast<const char *>(row.data()), std::streamsize(width * sizeof(float)));
        }
        if (!out)
            io_fail(path, "write failed");
    }

    FloatImage read_pfm(const std::filesystem::path &path)
    {
        auto in = open_in(path, true);
        std::string magic;
        long long w = 0, h = 0;
        double scale = 0.0;
        if (!(in >> magic >> w >> h >> scale))
            io_fail(path, "malformed PFM header");
        if (magic != "Pf")
            io_fail(path, "only single-channel PFM (Pf) is supported");
        if (w <= 0 || h <= 0 || double(w) * double(h) > 1e9 || scale == 0.0 || !std::isfinite(scale))
            io_fail(path, "invalid PFM dimensions or scale");
        in.get(); // single whitespace before the raster
        FloatImage img;
        img.width = std::size_t(w);
        img.height = std::size_t(h);
        img.values.resize(img.width * img.height);
        std::vector<std::uint32_t> row(img.width);
        const bool big_endian = scale > 0.0;
        for (std::size_t rr = 0; rr < img.height; ++rr)
        {
            if (!in.read(reinterpret_cast<char *>(row.data()), std::streamsize(img.width * 4)))
                io_fail(path, "truncated PFM raster");
            const std::size_t v = img.height - 1 - rr;
            for (std::size_t u = 0; u < img.width; ++u)
            {
                std::uint32_t bits = row[u];
                if (big_endian)
                    bits = ((bits & 0xFFu) << 24) | ((bits & 0xFF00u) << 8) | ((bits >> 8) & 0xFF00u) | (bits >> 24);
                img.values[v * img.width + u] = double(std::bit_cast<float>(bits));
            }
        }
        return img;
    }

    void write_ply(const std::filesystem::path &path, const PointCloud &cloud)
    {
        if (!cloud.scalar.empty() && cloud.scalar.size() != cloud.points.size())
            fail(ErrorKind::structural, "point cloud scalar count does not match point count");
        std::ostringstream s;
        s << "ply\nformat ascii 1.0\nelement vertex " << cloud.points.size() << "\n"
          << "property float x\nproperty float y\nproperty float z\n";
        if (!cloud.scalar.empty())
            s << "property float " << cloud.scalar_name << "\n";
        s << "end_header\n";
        s << std::setprecision(9);
        for (std::size_t i = 0; i < cloud.points.size(); ++i)
        {
            const Vec3 &p = cloud.points[i];
            s << float(p.x) << ' ' << float(p.y) << ' ' << float(p.z);
            if (!cloud.scalar.empty())
                s << ' ' << float(cloud.scalar[i]);
            s << '\n';
        }
        write_text_file(path, s.str());
    }

    PointCloud read_ply(const std::filesystem::path &path)
    {
        std::istringstream in(read_text_file(path));
        std::string line;
        if (!std::getline(in, line) || line != "ply")
            io_fail(path, "not a PLY file");
        std::size_t count = 0;
        std::vector<std::string> props;
        bool ascii = false;
        while (std::getline(in, line) && line != "end_header")
        {
            std::istringstream ls(line);
            std::string word;
            ls >> word;
            if (word == "format")
            {
                std::string fmt;
                ls >> fmt;
                ascii = fmt == "ascii";
            }
            else if (word == "element")
            {
                std::string name;
                ls >> name >> count;
                if (name != "vertex")
                    io_fail(path, "only vertex elements are supported");
            }
            else if (word == "property")
            {
                std::string type, name;
                ls >> type >> name;
                props.push_back(name);
            }
        }
        if (line != "end_header" || !ascii)
            io_fail(path, "unsupported PLY header");
        if (props.size() < 3 || props[0] != "x" || props[1] != "y" || props[2] != "z" || props.size() > 4)
            io_fail(path, "expected properties x, y, z and at most one scalar");

        PointCloud cloud;
        if (props.size() == 4)
            cloud.scalar_name = props[3];
        cloud.points.reserve(count);
        for (std::size_t i = 0; i < count; ++i)
        {
            Vec3 p;
            if (!(in >> p.x >> p.y >> p.z))
                io_fail(path, "truncated PLY body");
            cloud.points.push_back(p);
            if (props.size() == 4)
            {
                double s = 0.0;
                if (!(in >> s))
                    io_fail(path, "truncated PLY body");
                cloud.scalar.push_back(s);
            }
        }
        return cloud;
    }

    Calibration parse_calibration(const std::string &text)
    {
        nlohmann::json j;
        try
        {
            j = nlohmann::json::parse(text);
        }
        catch (const nlohmann::json::exception &e)
        {
            fail(ErrorKind::validation, std::string("calibration is not valid JSON: ") + e.what());
        }
        Calibration c;
        try
        {
            const auto &in = j.at("intrinsics");
            c.intrinsics.fu = in.at("fu").get<double>();
            c.intrinsics.fv = in.at("fv").get<double>();
            c.intrinsics.cu = in.at("cu").get<double>();
            c.intrinsics.cv = in.at("cv").get<double>();
            const auto &ex = j.at("extrinsics");
            const auto R = ex.at("R").get<std::vector<double>>();
            const auto t = ex.at("t").get<std::vector<double>>();
            if (R.size() != 9 || t.size() != 3)
                fail(ErrorKind::validation, "calibration needs a 9-element R and a 3-element t");
            std::copy(R.begin(), R.end(), c.extrinsics.rotation.begin());
            c.extrinsics.translation = {t[0], t[1], t[2]};
        }
        catch (const nlohmann::json::exception &e)
        {
            fail(ErrorKind::validation, std::string("malformed calibration: ") + e.what());
        }
        c.intrinsics.validate();
        c.extrinsics.validate();
        return c;
    }

    std::string format_calibration(const Calibration &c)
    {
        nlohmann::ordered_json j;
        j["intrinsics"] = {{"fu", c.intrinsics.fu}, {"fv", c.intrinsics.fv}, {"cu", c.intrinsics.cu},
                           {"cv", c.intrinsics.cv}};
        j["extrinsics"]["R"] = std::vector<double>(c.extrinsics.rotation.begin(), c.extrinsics.rotation.end());
        j["extrinsics"]["t"] = {c.extrinsics.translation.x, c.extrinsics.translation.y, c.extrinsics.translation.z};
        return j.dump(2) + "\n";
    }

    Calibration read_calibration(const std::filesystem::path &path) { return parse_calibration(read_text_file(path)); }

    void write_calibration(const std::filesystem::path &path, const Calibration &calibration)
    {
        write_text_file(path, format_calibration(calibration));
    }

    std::string read_text_file(const std::filesystem::path &path)
    {
        auto in = open_in(path, true);
        std::ostringstream s;
        s << in.rdbuf();
        if (in.bad())
            io_fail(path, "read failed");
        return s.str();
    }

    void write_text_file(const std::filesystem::path &path, const std::string &text)
    {
        auto out = open_out(path, true);
        out << text;
        if (!out)
            io_fail(path, "write failed");
    }

} // namespace mmfsk
