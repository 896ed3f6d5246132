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

#include "mmfsk/experiment.hpp"
#include "mmfsk/io.hpp"
#include "mmfsk/random.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

namespace mmfsk
{
    using json = nlohmann::json;
    using ordered_json = nlohmann::ordered_json;

    namespace
    {
        constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

        // Reads typed fields from one JSON object and rejects unknown keys.
        class Fields
        {
          public:
            Fields(const json &j, std::string where) : j_(j), where_(std::move(where))
            {
                if (!j_.is_object())
                    fail(ErrorKind::validation, where_ + " must be a JSON object");
            }

            const json *find(const char *key)
            {
                seen_.insert(key);
                const auto it = j_.find(key);
                return it == j_.end() ? nullptr : &*it;
            }

            void number(const char *key, double &out)
            {
                if (const json *v = find(key))
                {
                    if (!v->is_number())
                        fail(ErrorKind::validation, name(key) + " must be a number");
                    out = v->get<double>();
                    if (!std::isfinite(out))
                        fail(ErrorKind::validation, name(key) + " must be finite");
                }
            }

            template <class Int> void count(const char *key, Int &out)
            {
                if (const json *v = find(key))
                {
                    if (!v->is_number_integer() || v->get<long long>() < 0)
                        fail(ErrorKind::validation, name(key) + " must be a non-negative integer");
                    out = Int(v->get<unsigned long long>());
                }
            }

            void boolean(const char *key, bool &out)
            {
                if (const json *v = find(key))
                {
                    if (!v->is_boolean())
                        fail(ErrorKind::validation, name(key) + " must be true or false");
                    out = v->get<bool>();
                }
            }

            void text(const char *key, std::string &out)
            {
                if (const json *v = find(key))
                {
                    if (!v->is_string())
                        fail(ErrorKind::validation, name(key) + " must be a string");
                    out = v->get<std::string>();
                }
            }

            std::vector<double> numbers(const char *key, std::size_t expected)
            {
                std::vector<double> out;
                if (const json *v = find(key))
                {
                    if (!v->is_array() || v->size() != expected)
                        fail(ErrorKind::validation, name(key) + " must be an array of " + std::to_string(expected) +
                                                        " numbers");
                    for (const json &x : *v)
                    {
                        if (!x.is_number() || !std::isfinite(x.get<double>()))
                            fail(ErrorKind::validation, name(key) + " must contain finite numbers");
                        out.push_back(x.get<double>());
                    }
                }
                return out;
            }

            std::vector<Vec3> points(const char *key)
            {
                std::vector<Vec3> out;
                if (const json *v = find(key))
                {
                    if (!v->is_array())
                        fail(ErrorKind::validation, name(key) + " must be an array of [x, y, z] triples");
                    for (const json &p : *v)
                    {
                        if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() ||
                            !p[2].is_number())
                            fail(ErrorKind::validation, name(key) + " must be an array of [x, y, z] triples");
                        out.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
                    }
                }
                return out;
            }

            std::vector<std::string> strings(const char *key)
            {
                std::vector<std::string> out;
                if (const json *v = find(key))
                {
                    if (!v->is_array())
                        fail(ErrorKind::validation, name(key) + " must be an array of strings");
                    for (const json &s : *v)
                    {
                        if (!s.is_string())
                            fail(ErrorKind::validation, name(key) + " must be an array of strings");
                        out.push_back(s.get<std::string>());
                    }
                }
                return out;
            }

            void finish() const
            {
                for (const auto &item : j_.items())
                    if (!seen_.count(item.key()))
                        fail(ErrorKind::validation, "unknown key " + name(item.key().c_str()));
            }

            std::string name(const char *key) const { return where_.empty() ? key : where_ + "." + key; }

          private:
            const json &j_;
            std::string where_;
            std::set<std::string> seen_;
        };

        json parse_json(const std::string &text, const std::string &what)
        {
            try
            {
                return json::parse(text);
            }
            catch (const json::exception &e)
            {
                fail(ErrorKind::validation, what + " is not valid JSON: " + e.what());
            }
        }

        std::filesystem::path resolve_path(const std::filesystem::path &base, const std::string &p)
        {
            const std::filesystem::path path(p);
            if (path.is_absolute() || base.empty())
                return path;
            return base / path;
        }

        void read_scene(const json &j, SceneSpec &s, bool &seed_given)
        {
            Fields f(j, "scene");
            std::string kind = scene_kind_name(s.kind);
            f.text("kind", kind);
            s.kind = parse_scene_kind(kind);
            f.number("center_x", s.center_x);
            f.number("center_y", s.center_y);
            f.number("extent", s.extent);
            f.number("spacing", s.spacing);
            f.number("edge_taper", s.edge_taper);
            f.number("amplitude", s.amplitude);
            f.boolean("random_phase", s.random_phase);
            if (f.find("seed"))
            {
                f.count("seed", s.seed);
                seed_given = true;
            }
            f.number("depth", s.depth);
            f.number("slope_x", s.slope_x);
            f.number("slope_y", s.slope_y);
            f.number("radius", s.radius);
            f.number("sphere_center_z", s.sphere_center_z);
            f.number("cap_fraction", s.cap_fraction);
            f.number("level_low", s.level_low);
            f.number("level_high", s.level_high);
            f.number("step_offset", s.step_offset);
            f.count("count", s.count);
            f.number("depth_span", s.depth_span);
            f.finish();
        }

        void read_array(const json &j, ArraySpec &a)
        {
            if (j.is_string())
            {
                a = array_profile(j.get<std::string>());
                return;
            }
            Fields f(j, "array");
            if (const json *p = f.find("profile"))
            {
                if (!p->is_string())
                    fail(ErrorKind::validation, "array.profile must be a string");
                a = array_profile(p->get<std::string>());
            }
            f.count("tx", a.tx);
            f.count("rx", a.rx);
            f.number("aperture", a.aperture);
            a.tx_positions = f.points("tx_positions");
            a.rx_positions = f.points("rx_positions");
            f.finish();
        }

        void read_grid(const json &j, GridGeometry &g)
        {
            Fields f(j, "grid");
            f.count("width", g.width);
            f.count("height", g.height);
            f.number("pitch_x", g.pitch_x);
            f.number("pitch_y", g.pitch_y);
            f.number("center_x", g.center_x);
            f.number("center_y", g.center_y);
            f.finish();
        }

        void read_camera(const json &j, CameraRig &rig)
        {
            Fields f(j, "prior.camera");
            f.count("width", rig.width);
            f.count("height", rig.height);
            f.number("fu", rig.intrinsics.fu);
            f.number("fv", rig.intrinsics.fv);
            f.number("cu", rig.intrinsics.cu);
            f.number("cv", rig.intrinsics.cv);
            const auto R = f.numbers("rotation", 9);
            if (!R.empty())
                std::copy(R.begin(), R.end(), rig.extrinsics.rotation.begin());
            const auto t = f.numbers("translation", 3);
            if (!t.empty())
                rig.extrinsics.translation = {t[0], t[1], t[2]};
            f.number("near", rig.near);
            f.number("far", rig.far);
            f.number("march_step", rig.march_step);
            f.number("noise_sigma", rig.noise_sigma);
            f.number("invalid_fraction", rig.invalid_fraction);
            f.finish();
        }

        void read_prior(const json &j, PriorSpec &p, const std::filesystem::path &base)
        {
            Fields f(j, "prior");
            std::string mode = prior_mode_name(p.mode);
            f.text("mode", mode);
            p.mode = parse_prior_mode(mode);
            f.number("scalar_depth", p.scalar_depth);
            std::string file, calib;
            f.text("file", file);
            if (!file.empty())
                p.file = resolve_path(base, file).string();
            f.text("calibration_file", calib);
            if (!calib.empty())
                p.calibration_file = resolve_path(base, calib).string();
            if (const json *cam = f.find("camera"))
                read_camera(*cam, p.camera);
            f.number("max_edge_length", p.max_edge_length);
            f.number("noise_sigma", p.noise_sigma);
            f.number("uniform_halfwidth", p.uniform_halfwidth);
            f.finish();
        }

        void read_voxels(const json &j, VoxelGridSpec &v)
        {
            Fields f(j, "backprojection");
            const auto e = f.numbers("extents", 3);
            if (!e.empty())
                std::copy(e.begin(), e.end(), v.extents.begin());
            const auto c = f.numbers("center", 3);
            if (!c.empty())
                std::copy(c.begin(), c.end(), v.center.begin());
            const auto r = f.numbers("resolution", 3);
            for (std::size_t a = 0; a < r.size(); ++a)
            {
                if (r[a] < 1.0 || r[a] != std::floor(r[a]) || r[a] > 1e6)
                    fail(ErrorKind::validation, "backprojection.resolution must hold positive integers");
                v.resolution[a] = std::size_t(r[a]);
            }
            f.finish();
        }

        ordered_json vec3_json(const Vec3 &p) { return ordered_json::array({p.x, p.y, p.z}); }

        std::string hex64(std::uint64_t v)
        {
            char buf[17];
            std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
            return buf;
        }

        double smallest_difference(const FrequencySet &f)
        {
            if (f.size() < 2)
                return 0.0;
            double d = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k + 1 < f.size(); ++k)
                d = std::min(d, f.difference(k, k + 1));
            return d;
        }

        bool method_accepts(Method m, std::size_t carriers)
        {
            switch (m)
            {
            case Method::fsk2:
            case Method::mm2fsk:
                return carriers == 2;
            case Method::fsk3:
                return carriers == 3;
            case Method::backprojection:
                return carriers >= 1;
            }
            return false;
        }

        struct PlannedRun
        {
            Method method;
            std::string config;
            FrequencySet carriers;
            double delta_hz;

            std::string id() const { return std::string(method_name(method)) + "_" + config; }
        };

        std::vector<PlannedRun> plan_runs(const ExperimentConfig &config)
        {
            std::vector<PlannedRun> runs;
            for (Method m : config.methods)
                for (const std::string &name : config.frequency_configs)
                {
                    const FrequencySet fs = resolve_frequency_config(name);
                    if (!method_accepts(m, fs.size()))
                        continue;
                    const double delta = m == Method::backprojection ? fs[fs.size() - 1] - fs[0] : smallest_difference(fs);
                    runs.push_back({m, name, fs, delta});
                }
            if (runs.empty())
                fail(ErrorKind::configuration, "no configured method accepts any configured frequency set");
            return runs;
        }

        GridGeometry run_geometry(const ExperimentConfig &config, Method m)
        {
            return m == Method::backprojection ? config.voxels.lateral_geometry() : config.grid;
        }

        FrequencySet carrier_union(const ExperimentConfig &config)
        {
            std::vector<double> all;
            for (const std::string &name : config.frequency_configs)
            {
                const FrequencySet fs = resolve_frequency_config(name);
                all.insert(all.end(), fs.values().begin(), fs.values().end());
            }
            std::sort(all.begin(), all.end());
            std::vector<double> unique;
            for (double f : all)
                if (unique.empty() || f - unique.back() > 1.0)
                    unique.push_back(f);
            return FrequencySet(std::move(unique));
        }

        double median_of(std::vector<double> v)
        {
            v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return !std::isfinite(x); }), v.end());
            if (v.empty())
                return kNaN;
            std::sort(v.begin(), v.end());
            const std::size_t n = v.size();
            return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
        }

        std::vector<double> average_ranks(const std::vector<double> &x)
        {
            std::vector<std::size_t> idx(x.size());
            for (std::size_t i = 0; i < idx.size(); ++i)
                idx[i] = i;
            std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
            std::vector<double> rank(x.size());
            for (std::size_t i = 0; i < idx.size();)
            {
                std::size_t j = i;
                while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]])
                    ++j;
                const double r = 0.5 * double(i + j) + 1.0;
                for (std::size_t k = i; k <= j; ++k)
                    rank[idx[k]] = r;
                i = j + 1;
            }
            return rank;
        }

        std::string fixed(double v, int decimals)
        {
            if (!std::isfinite(v))
                return "nan";
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
            return buf;
        }

        // Plain-text table with right-aligned numeric columns.
        std::string align_table(const std::vector<std::vector<std::string>> &rows)
        {
            if (rows.empty())
                return {};
            std::vector<std::size_t> width(rows[0].size(), 0);
            for (const auto &r : rows)
                for (std::size_t c = 0; c < r.size(); ++c)
                    width[c] = std::max(width[c], r[c].size());
            std::ostringstream s;
            for (std::size_t i = 0; i < rows.size(); ++i)
            {
                for (std::size_t c = 0; c < rows[i].size(); ++c)
                {
                    const std::string &cell = rows[i][c];
                    const std::string pad(width[c] - cell.size(), ' ');
                    if (c == 0)
                        s << cell << pad;
                    else
                        s << "  " << pad << cell;
                }
                s << '\n';
                if (i == 0)
                {
                    std::size_t total = 0;
                    for (std::size_t c = 0; c < width.size(); ++c)
                        total += width[c] + (c ? 2 : 0);
                    s << std::string(total, '-') << '\n';
                }
            }
            return s.str();
        }

        std::string method_label(Method m)
        {
            switch (m)
            {
            case Method::fsk2:
                return "2FSK";
            case Method::mm2fsk:
                return "MM-2FSK";
            case Method::fsk3:
                return "3FSK";
            case Method::backprojection:
                return "BP";
            }
            return "?";
        }

        double json_number(const json &v) { return v.is_number() ? v.get<double>() : kNaN; }
    } // namespace

    // ---------------------------------------------------------- names

    Method parse_method(std::string_view name)
    {
        if (name == "2fsk")
            return Method::fsk2;
        if (name == "mm2fsk")
            return Method::mm2fsk;
        if (name == "3fsk")
            return Method::fsk3;
        if (name == "bp")
            return Method::backprojection;
        fail(ErrorKind::configuration, "unknown method '" + std::string(name) + "' (expected 2fsk, mm2fsk, 3fsk or bp)");
    }

    const char *method_name(Method method)
    {
        switch (method)
        {
        case Method::fsk2:
            return "2fsk";
        case Method::mm2fsk:
            return "mm2fsk";
        case Method::fsk3:
            return "3fsk";
        case Method::backprojection:
            return "bp";
        }
        return "?";
    }

    FrequencySet resolve_frequency_config(std::string_view name)
    {
        if (name.size() > 4 && name.substr(0, 4) == "fscw")
        {
            const std::string digits(name.substr(4));
            if (digits.find_first_not_of("0123456789") == std::string::npos && digits.size() <= 6)
            {
                const std::size_t n = std::stoul(digits);
                if (n >= 1)
                    return n == 1 ? FrequencySet({82e9}) : fscw_sweep(72e9, 82e9, n);
            }
        }
        return named_frequency_config(name);
    }

    AntennaArray ArraySpec::build() const
    {
        if (!tx_positions.empty() || !rx_positions.empty())
            return AntennaArray(tx_positions, rx_positions);
        return AntennaArray::cross(tx, rx, aperture);
    }

    ArraySpec array_profile(std::string_view name)
    {
        ArraySpec a;
        if (name == "desk")
            return a;
        if (name == "qar50")
        {
            a.tx = 94;
            a.rx = 94;
            a.aperture = 0.3;
            return a;
        }
        fail(ErrorKind::configuration, "unknown array profile '" + std::string(name) + "' (expected desk or qar50)");
    }

    PriorMode parse_prior_mode(std::string_view name)
    {
        if (name == "scalar")
            return PriorMode::scalar;
        if (name == "camera")
            return PriorMode::camera;
        if (name == "file")
            return PriorMode::file;
        if (name == "truth")
            return PriorMode::truth;
        fail(ErrorKind::configuration, "unknown prior mode '" + std::string(name) + "'");
    }

    const char *prior_mode_name(PriorMode mode)
    {
        switch (mode)
        {
        case PriorMode::scalar:
            return "scalar";
        case PriorMode::camera:
            return "camera";
        case PriorMode::file:
            return "file";
        case PriorMode::truth:
            return "truth";
        }
        return "?";
    }

    // ---------------------------------------------------------- config

    void ExperimentConfig::validate() const
    {
        scene.validate();
        grid.validate();
        voxels.validate();
        (void)array.build();
        if (frequency_configs.empty())
            fail(ErrorKind::validation, "at least one frequency configuration is required");
        if (methods.empty())
            fail(ErrorKind::validation, "at least one method is required");
        for (const std::string &name : frequency_configs)
            (void)resolve_frequency_config(name);
        if (snr_db && !std::isfinite(*snr_db))
            fail(ErrorKind::validation, "noise.snr_db must be finite");
        if (!std::isfinite(threshold_db) || threshold_db > 0.0)
            fail(ErrorKind::validation, "threshold_db must be a finite value <= 0");
        if (!std::isfinite(prior.scalar_depth) || !(prior.scalar_depth > 0.0))
            fail(ErrorKind::validation, "prior.scalar_depth must be positive");
        if (prior.noise_sigma < 0.0 || prior.uniform_halfwidth < 0.0 || prior.max_edge_length < 0.0)
            fail(ErrorKind::validation, "prior noise and edge limits must be non-negative");
        if (prior.mode == PriorMode::file && prior.file.empty())
            fail(ErrorKind::validation, "prior.file is required in file mode");
        if (prior.mode == PriorMode::camera)
        {
            if (!has_surface(scene))
                fail(ErrorKind::configuration, "camera priors need a scene with a surface");
            prior.camera.validate();
        }
        if (sweep_seeds == 0)
            fail(ErrorKind::validation, "sweep.seeds must be at least 1");
        (void)plan_runs(*this);
    }

    ExperimentConfig parse_config(const std::string &text, const std::filesystem::path &base_dir)
    {
        const json root = parse_json(text, "experiment configuration");
        ExperimentConfig c;
        Fields f(root, "");
        f.count("seed", c.seed);

        bool scene_seed = false;
        if (const json *s = f.find("scene"))
        {
            if (s->is_string())
            {
                const std::filesystem::path p = resolve_path(base_dir, s->get<std::string>());
                read_scene(parse_json(read_text_file(p), "scene file " + p.string()), c.scene, scene_seed);
            }
            else
                read_scene(*s, c.scene, scene_seed);
        }
        if (!scene_seed)
            c.scene.seed = c.seed;
        if (const json *a = f.find("array"))
            read_array(*a, c.array);
        if (const json *g = f.find("grid"))
            read_grid(*g, c.grid);
        if (f.find("frequency_configs"))
            c.frequency_configs = f.strings("frequency_configs");
        if (f.find("methods"))
        {
            c.methods.clear();
            for (const std::string &m : f.strings("methods"))
                c.methods.push_back(parse_method(m));
        }
        if (const json *p = f.find("prior"))
            read_prior(*p, c.prior, base_dir);
        if (const json *n = f.find("noise"))
        {
            Fields nf(*n, "noise");
            if (const json *snr = nf.find("snr_db"))
            {
                if (snr->is_null())
                    c.snr_db.reset();
                else if (snr->is_number())
                    c.snr_db = snr->get<double>();
                else
                    fail(ErrorKind::validation, "noise.snr_db must be a number or null");
            }
            nf.boolean("path_loss", c.path_loss);
            nf.finish();
        }
        f.number("threshold_db", c.threshold_db);
        f.count("erosion", c.erosion);
        if (const json *v = f.find("backprojection"))
            read_voxels(*v, c.voxels);
        if (const json *s = f.find("sweep"))
        {
            Fields sf(*s, "sweep");
            sf.count("seeds", c.sweep_seeds);
            sf.finish();
        }
        std::string out;
        f.text("output_dir", out);
        if (!out.empty())
            c.output_dir = resolve_path(base_dir, out);
        f.finish();

        c.prior.camera.seed = c.seed;
        if (c.prior.mode == PriorMode::camera && !c.prior.calibration_file.empty())
        {
            const Calibration cal = read_calibration(c.prior.calibration_file);
            c.prior.camera.intrinsics = cal.intrinsics;
            c.prior.camera.extrinsics = cal.extrinsics;
        }
        c.validate();
        return c;
    }

    ExperimentConfig load_config(const std::filesystem::path &path)
    {
        return parse_config(read_text_file(path), path.parent_path());
    }

    SceneSpec parse_scene_spec(const std::string &text)
    {
        SceneSpec spec;
        bool seed_given = false;
        read_scene(parse_json(text, "scene description"), spec, seed_given);
        spec.validate();
        return spec;
    }

    std::string apply_overrides(const std::string &text, const std::vector<std::string> &assignments)
    {
        json root = parse_json(text, "experiment configuration");
        if (!root.is_object())
            fail(ErrorKind::validation, "experiment configuration must be a JSON object");
        for (const std::string &a : assignments)
        {
            const auto eq = a.find('=');
            if (eq == std::string::npos || eq == 0)
                fail(ErrorKind::validation, "override '" + a + "' must look like key=value");
            const std::string key = a.substr(0, eq), value = a.substr(eq + 1);
            json parsed;
            try
            {
                parsed = json::parse(value);
            }
            catch (const json::exception &)
            {
                parsed = value;
            }
            json *node = &root;
            std::size_t start = 0;
            while (true)
            {
                const auto dot = key.find('.', start);
                const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
                if (part.empty())
                    fail(ErrorKind::validation, "override key '" + key + "' is malformed");
                if (dot == std::string::npos)
                {
                    (*node)[part] = parsed;
                    break;
                }
                json &next = (*node)[part];
                if (next.is_null())
                    next = json::object();
                if (!next.is_object())
                    fail(ErrorKind::validation, "override key '" + key + "' descends into a non-object");
                node = &next;
                start = dot + 1;
            }
        }
        return root.dump(2);
    }

    std::string resolved_config_json(const ExperimentConfig &c)
    {
        ordered_json j;
        j["seed"] = c.seed;
        const SceneSpec &s = c.scene;
        j["scene"] = {{"kind", scene_kind_name(s.kind)},
                      {"center_x", s.center_x},
                      {"center_y", s.center_y},
                      {"extent", s.extent},
                      {"spacing", s.spacing},
                      {"edge_taper", s.edge_taper},
                      {"amplitude", s.amplitude},
                      {"random_phase", s.random_phase},
                      {"seed", s.seed},
                      {"depth", s.depth},
                      {"slope_x", s.slope_x},
                      {"slope_y", s.slope_y},
                      {"radius", s.radius},
                      {"sphere_center_z", s.sphere_center_z},
                      {"cap_fraction", s.cap_fraction},
                      {"level_low", s.level_low},
                      {"level_high", s.level_high},
                      {"step_offset", s.step_offset},
                      {"count", s.count},
                      {"depth_span", s.depth_span}};
        ordered_json arr;
        if (!c.array.tx_positions.empty() || !c.array.rx_positions.empty())
        {
            arr["tx_positions"] = ordered_json::array();
            for (const Vec3 &p : c.array.tx_positions)
                arr["tx_positions"].push_back(vec3_json(p));
            arr["rx_positions"] = ordered_json::array();
            for (const Vec3 &p : c.array.rx_positions)
                arr["rx_positions"].push_back(vec3_json(p));
        }
        else
        {
            arr["tx"] = c.array.tx;
            arr["rx"] = c.array.rx;
            arr["aperture"] = c.array.aperture;
        }
        j["array"] = arr;
        j["grid"] = {{"width", c.grid.width},       {"height", c.grid.height},     {"pitch_x", c.grid.pitch_x},
                     {"pitch_y", c.grid.pitch_y},   {"center_x", c.grid.center_x}, {"center_y", c.grid.center_y}};
        j["frequency_configs"] = c.frequency_configs;
        ordered_json carriers = ordered_json::object();
        for (const std::string &name : c.frequency_configs)
            carriers[name] = resolve_frequency_config(name).values();
        j["carriers_hz"] = carriers;
        j["methods"] = ordered_json::array();
        for (Method m : c.methods)
            j["methods"].push_back(method_name(m));
        const PriorSpec &p = c.prior;
        ordered_json prior = {{"mode", prior_mode_name(p.mode)}, {"scalar_depth", p.scalar_depth}};
        if (p.mode == PriorMode::file)
            prior["file"] = p.file;
        if (p.mode == PriorMode::camera)
        {
            const CameraRig &r = p.camera;
            prior["camera"] = {{"width", r.width},
                               {"height", r.height},
                               {"fu", r.intrinsics.fu},
                               {"fv", r.intrinsics.fv},
                               {"cu", r.intrinsics.cu},
                               {"cv", r.intrinsics.cv},
                               {"rotation", r.extrinsics.rotation},
                               {"translation", vec3_json(r.extrinsics.translation)},
                               {"near", r.near},
                               {"far", r.far},
                               {"march_step", r.march_step},
                               {"noise_sigma", r.noise_sigma},
                               {"invalid_fraction", r.invalid_fraction}};
            prior["max_edge_length"] = p.max_edge_length;
        }
        if (p.mode == PriorMode::truth)
        {
            prior["noise_sigma"] = p.noise_sigma;
            prior["uniform_halfwidth"] = p.uniform_halfwidth;
        }
        j["prior"] = prior;
        j["noise"] = {{"snr_db", c.snr_db ? ordered_json(*c.snr_db) : ordered_json(nullptr)},
                      {"path_loss", c.path_loss}};
        j["threshold_db"] = c.threshold_db;
        j["erosion"] = c.erosion;
        j["backprojection"] = {{"extents", c.voxels.extents},
                               {"resolution", c.voxels.resolution},
                               {"center", c.voxels.center}};
        j["sweep"] = {{"seeds", c.sweep_seeds}};
        j["random"] = kRandomAlgorithm;
        return j.dump(2) + "\n";
    }

    std::uint64_t fnv1a64(std::string_view bytes)
    {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (unsigned char ch : bytes)
        {
            h ^= ch;
            h *= 0x100000001b3ull;
        }
        return h;
    }

    // ---------------------------------------------------------- stages

    Simulation run_simulation(const ExperimentConfig &config, const Execution &exec)
    {
        Simulation sim;
        sim.array = config.array.build();
        sim.carriers = carrier_union(config);
        NoiseSpec noise;
        noise.snr_db = config.snr_db;
        noise.seed = config.seed;
        SimulationOptions opts;
        opts.path_loss = config.path_loss;
        opts.exec = exec;
        sim.baseband = simulate_baseband(make_scene(config.scene), sim.array, sim.carriers, noise, opts);
        return sim;
    }

    CandidateGrid make_prior(const ExperimentConfig &config, const Execution &exec)
    {
        const PriorSpec &p = config.prior;
        switch (p.mode)
        {
        case PriorMode::scalar:
            return CandidateGrid::scalar(config.grid, p.scalar_depth);
        case PriorMode::camera:
        {
            const OpticalDepthMap map = render_optical_depth(config.scene, p.camera, exec);
            RasterOptions ro;
            ro.max_edge_length = p.max_edge_length;
            ro.exec = exec;
            return build_prior(map, p.camera.intrinsics, p.camera.extrinsics, config.grid, ro);
        }
        case PriorMode::file:
        {
            const FloatImage img = read_pfm(p.file);
            if (img.width != config.grid.width || img.height != config.grid.height)
                fail(ErrorKind::structural, p.file + ": prior is " + std::to_string(img.width) + "x" +
                                                std::to_string(img.height) + " but the grid is " +
                                                std::to_string(config.grid.width) + "x" +
                                                std::to_string(config.grid.height));
            CandidateGrid g;
            g.geometry = config.grid;
            g.prior = img.values;
            g.valid = img.finite_mask();
            return g;
        }
        case PriorMode::truth:
        {
            const GroundTruth gt = resample_ground_truth(config.scene, config.grid);
            CandidateGrid g;
            g.geometry = config.grid;
            g.prior = gt.depth;
            g.valid = gt.valid;
            for (std::size_t i = 0; i < g.prior.size(); ++i)
            {
                if (!g.valid[i])
                    continue;
                if (p.noise_sigma > 0.0)
                    g.prior[i] += p.noise_sigma * normal_pair(config.seed, rng_stream::prior, i).first;
                if (p.uniform_halfwidth > 0.0)
                    g.prior[i] +=
                        p.uniform_halfwidth * (2.0 * uniform_open(config.seed, rng_stream::experiment, i) - 1.0);
            }
            return g;
        }
        }
        fail(ErrorKind::configuration, "unsupported prior mode");
    }

    std::string MethodRun::id() const { return std::string(method_name(method)) + "_" + frequency_config; }

    std::vector<MethodRun> run_methods(const ExperimentConfig &config, const Simulation &sim,
                                       const CandidateGrid &prior, const Execution &exec)
    {
        std::vector<MethodRun> out;
        for (const PlannedRun &plan : plan_runs(config))
        {
            const BasebandTensor sub = select_frequencies(sim.baseband, sim.carriers, plan.carriers);
            MethodRun run{plan.method, plan.config, plan.delta_hz, RadarImage{}, RadarImage{}};
            switch (plan.method)
            {
            case Method::fsk2:
                run.raw = fsk2_reconstruct(sub, CandidateGrid::scalar(config.grid, config.prior.scalar_depth),
                                           sim.array, plan.carriers, exec);
                break;
            case Method::mm2fsk:
                run.raw = mm2fsk_reconstruct(sub, prior, sim.array, plan.carriers, exec);
                break;
            case Method::fsk3:
                run.raw = fsk3_reconstruct(sub, CandidateGrid::scalar(config.grid, config.prior.scalar_depth),
                                           sim.array, plan.carriers, exec);
                break;
            case Method::backprojection:
                run.raw = backproject(sub, config.voxels, sim.array, plan.carriers, exec);
                break;
            }
            run.filtered = magnitude_filter(run.raw, config.threshold_db);
            out.push_back(std::move(run));
        }
        return out;
    }

    // ---------------------------------------------------------- reports

    std::string format_eval_json(const std::vector<EvalRecord> &records)
    {
        ordered_json arr = ordered_json::array();
        for (const EvalRecord &r : records)
        {
            const EvalReport &e = r.report;
            arr.push_back({{"id", r.id},
                           {"method", method_name(r.method)},
                           {"frequency_config", r.frequency_config},
                           {"delta_f_hz", r.delta_hz},
                           {"chamfer_gt_to_radar_m", e.chamfer_gt_to_radar},
                           {"chamfer_radar_to_gt_m", e.chamfer_radar_to_gt},
                           {"projective_masked_m", e.projective_masked},
                           {"projective_eroded_m",
                            std::isfinite(e.projective_eroded) ? ordered_json(e.projective_eroded) : ordered_json(nullptr)},
                           {"radar_points", e.radar_points},
                           {"gt_points", e.gt_points},
                           {"masked_pixels", e.masked_pixels},
                           {"eroded_pixels", e.eroded_pixels}});
        }
        return ordered_json{{"records", arr}}.dump(2) + "\n";
    }

    std::string format_eval_table(const std::vector<EvalRecord> &records)
    {
        std::vector<std::vector<std::string>> rows{
            {"Method", "df [GHz]", "C(GT->R) [cm]", "C(R->GT) [cm]", "P [cm]", "P eroded [cm]", "pixels"}};
        for (const EvalRecord &r : records)
        {
            const EvalReport &e = r.report;
            rows.push_back({method_label(r.method) + " " + r.frequency_config, fixed(r.delta_hz / 1e9, 2),
                            fixed(e.chamfer_gt_to_radar * 100.0, 3), fixed(e.chamfer_radar_to_gt * 100.0, 3),
                            fixed(e.projective_masked * 100.0, 3), fixed(e.projective_eroded * 100.0, 3),
                            std::to_string(e.radar_points)});
        }
        return align_table(rows);
    }

    double spearman(const std::vector<double> &x, const std::vector<double> &y)
    {
        if (x.size() != y.size())
            fail(ErrorKind::validation, "Spearman correlation needs equally long samples");
        const std::size_t n = x.size();
        if (n < 2)
            return 0.0;
        const std::vector<double> rx = average_ranks(x), ry = average_ranks(y);
        const double mean = (double(n) + 1.0) / 2.0;
        double sxy = 0.0, sxx = 0.0, syy = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            sxy += (rx[i] - mean) * (ry[i] - mean);
            sxx += (rx[i] - mean) * (rx[i] - mean);
            syy += (ry[i] - mean) * (ry[i] - mean);
        }
        if (sxx == 0.0 || syy == 0.0)
            return 0.0;
        return sxy / std::sqrt(sxx * syy);
    }

    SweepReport run_sweep(const ExperimentConfig &config, const Execution &exec)
    {
        const std::vector<PlannedRun> plans = plan_runs(config);
        SweepReport rep;
        for (const PlannedRun &p : plans)
            rep.entries.push_back({p.method, p.config, p.delta_hz, {}, 0.0});

        for (std::size_t s = 0; s < config.sweep_seeds; ++s)
        {
            ExperimentConfig c = config;
            c.seed = config.seed + s;
            c.scene.seed = config.scene.seed + s;
            c.prior.camera.seed = c.seed;
            const Simulation sim = run_simulation(c, exec);
            const bool needs_prior =
                std::find(c.methods.begin(), c.methods.end(), Method::mm2fsk) != c.methods.end();
            const CandidateGrid prior = needs_prior ? make_prior(c, exec) : CandidateGrid::scalar(c.grid, 1.0);
            const std::vector<MethodRun> runs = run_methods(c, sim, prior, exec);
            for (std::size_t i = 0; i < runs.size(); ++i)
            {
                const GroundTruth gt = resample_ground_truth(c.scene, runs[i].filtered.geometry);
                rep.entries[i].projective_eroded.push_back(evaluate(runs[i].filtered, gt, c.erosion).projective_eroded);
            }
        }

        double best = std::numeric_limits<double>::infinity();
        for (SweepEntry &e : rep.entries)
        {
            e.median = median_of(e.projective_eroded);
            if (e.median < best)
            {
                best = e.median;
                rep.best = std::string(method_name(e.method)) + "_" + e.frequency_config;
            }
        }

        for (Method m : config.methods)
        {
            std::vector<const SweepEntry *> es;
            for (const SweepEntry &e : rep.entries)
                if (e.method == m)
                    es.push_back(&e);
            if (es.empty())
                continue;
            std::stable_sort(es.begin(), es.end(),
                             [](const SweepEntry *a, const SweepEntry *b) { return a->delta_hz < b->delta_hz; });
            SweepTrend t{m, 0.0, true, "no trend"};
            std::vector<double> x, y;
            for (std::size_t i = 0; i < es.size(); ++i)
            {
                x.push_back(es[i]->delta_hz);
                y.push_back(es[i]->median);
                if (i > 0 && !(es[i]->median <= es[i - 1]->median))
                    t.non_increasing = false;
            }
            if (es.size() >= 2)
            {
                t.spearman = spearman(x, y);
                if (t.spearman <= -0.8)
                    t.verdict = "decreasing";
                else if (t.spearman >= 0.8)
                    t.verdict = "increasing";
            }
            rep.trends.push_back(t);
        }
        return rep;
    }

    std::string format_sweep_json(const SweepReport &r)
    {
        ordered_json entries = ordered_json::array();
        for (const SweepEntry &e : r.entries)
        {
            ordered_json per_seed = ordered_json::array();
            for (double v : e.projective_eroded)
                per_seed.push_back(std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr));
            entries.push_back({{"id", std::string(method_name(e.method)) + "_" + e.frequency_config},
                               {"method", method_name(e.method)},
                               {"frequency_config", e.frequency_config},
                               {"delta_f_hz", e.delta_hz},
                               {"median_projective_eroded_m",
                                std::isfinite(e.median) ? ordered_json(e.median) : ordered_json(nullptr)},
                               {"projective_eroded_m", per_seed}});
        }
        ordered_json trends = ordered_json::array();
        for (const SweepTrend &t : r.trends)
            trends.push_back({{"method", method_name(t.method)},
                              {"spearman", t.spearman},
                              {"non_increasing", t.non_increasing},
                              {"verdict", t.verdict}});
        return ordered_json{{"entries", entries}, {"trends", trends}, {"best", r.best}}.dump(2) + "\n";
    }

    std::string format_sweep_table(const SweepReport &r)
    {
        std::vector<std::vector<std::string>> rows{{"Method", "df [GHz]", "median P eroded [cm]", "seeds"}};
        for (const SweepEntry &e : r.entries)
            rows.push_back({method_label(e.method) + " " + e.frequency_config, fixed(e.delta_hz / 1e9, 2),
                            fixed(e.median * 100.0, 3), std::to_string(e.projective_eroded.size())});
        std::string out = align_table(rows);
        for (const SweepTrend &t : r.trends)
            out += std::string("trend ") + method_name(t.method) + ": " + t.verdict + " (spearman " +
                   fixed(t.spearman, 3) + (t.non_increasing ? ", non-increasing" : "") + ")\n";
        out += "best: " + r.best + "\n";
        return out;
    }

    // ---------------------------------------------------------- commands

    namespace
    {
        class OutputSet
        {
          public:
            explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir))
            {
                std::error_code ec;
                std::filesystem::create_directories(dir_, ec);
                if (ec || !std::filesystem::is_directory(dir_))
                    fail(ErrorKind::io, dir_.string() + ": cannot create output directory");
            }

            std::filesystem::path path(const std::string &name) const { return dir_ / name; }

            void record(const std::string &name) { names_.push_back(name); }

            void text(const std::string &name, const std::string &body)
            {
                write_text_file(path(name), body);
                record(name);
            }

            // Run log: tool version, command, seed, config hash and a content
            // hash of every file written. Nothing time- or host-dependent.
            void finish(std::string_view command, const ExperimentConfig &config, const std::string &resolved,
                        CommandOutcome &outcome)
            {
                text("config.resolved.json", resolved);
                std::ostringstream log;
                log << "tool mmfsk " << kVersion << '\n'
                    << "command " << command << '\n'
                    << "seed " << config.seed << '\n'
                    << "config_hash fnv1a64:" << hex64(fnv1a64(resolved)) << '\n'
                    << "random " << kRandomAlgorithm << '\n';
                for (const std::string &n : names_)
                {
                    const std::string body = read_text_file(path(n));
                    log << "output " << n << ' ' << body.size() << " fnv1a64:" << hex64(fnv1a64(body)) << '\n';
                }
                const std::string log_name = std::string(command) + ".log";
                write_text_file(path(log_name), log.str());
                names_.push_back(log_name);
                for (const std::string &n : names_)
                    outcome.files.push_back(path(n));
            }

          private:
            std::filesystem::path dir_;
            std::vector<std::string> names_;
        };

        void write_image(OutputSet &out, const std::string &id, const MethodRun &run)
        {
            const RadarImage &f = run.filtered;
            const GridGeometry &g = f.geometry;
            write_pfm(out.path(id + "_depth.pfm"), g.width, g.height, f.depth, f.valid);
            out.record(id + "_depth.pfm");
            write_pfm(out.path(id + "_magnitude.pfm"), g.width, g.height, run.raw.magnitude, run.raw.valid);
            out.record(id + "_magnitude.pfm");
            PointCloud cloud;
            for (std::size_t i = 0; i < g.size(); ++i)
                if (f.valid[i])
                {
                    cloud.points.push_back({g.x(i % g.width), g.y(i / g.width), f.depth[i]});
                    cloud.scalar.push_back(f.magnitude[i]);
                }
            write_ply(out.path(id + ".ply"), cloud);
            out.record(id + ".ply");
        }

        std::vector<EvalRecord> parse_eval_records(const std::string &text, const std::string &where)
        {
            const json j = parse_json(text, where);
            std::vector<EvalRecord> out;
            try
            {
                for (const json &r : j.at("records"))
                {
                    EvalRecord e;
                    e.id = r.at("id").get<std::string>();
                    e.method = parse_method(r.at("method").get<std::string>());
                    e.frequency_config = r.at("frequency_config").get<std::string>();
                    e.delta_hz = r.at("delta_f_hz").get<double>();
                    e.report.chamfer_gt_to_radar = json_number(r.at("chamfer_gt_to_radar_m"));
                    e.report.chamfer_radar_to_gt = json_number(r.at("chamfer_radar_to_gt_m"));
                    e.report.projective_masked = json_number(r.at("projective_masked_m"));
                    e.report.projective_eroded = json_number(r.at("projective_eroded_m"));
                    e.report.radar_points = r.at("radar_points").get<std::size_t>();
                    e.report.gt_points = r.at("gt_points").get<std::size_t>();
                    e.report.masked_pixels = r.at("masked_pixels").get<std::size_t>();
                    e.report.eroded_pixels = r.at("eroded_pixels").get<std::size_t>();
                    out.push_back(e);
                }
            }
            catch (const json::exception &e)
            {
                fail(ErrorKind::validation, where + " is malformed: " + e.what());
            }
            return out;
        }

        SweepReport parse_sweep_report(const std::string &text, const std::string &where)
        {
            const json j = parse_json(text, where);
            SweepReport r;
            try
            {
                for (const json &e : j.at("entries"))
                {
                    SweepEntry s;
                    s.method = parse_method(e.at("method").get<std::string>());
                    s.frequency_config = e.at("frequency_config").get<std::string>();
                    s.delta_hz = e.at("delta_f_hz").get<double>();
                    s.median = json_number(e.at("median_projective_eroded_m"));
                    for (const json &v : e.at("projective_eroded_m"))
                        s.projective_eroded.push_back(json_number(v));
                    r.entries.push_back(s);
                }
                for (const json &t : j.at("trends"))
                    r.trends.push_back({parse_method(t.at("method").get<std::string>()), t.at("spearman").get<double>(),
                                        t.at("non_increasing").get<bool>(), t.at("verdict").get<std::string>()});
                r.best = j.at("best").get<std::string>();
            }
            catch (const json::exception &e)
            {
                fail(ErrorKind::validation, where + " is malformed: " + e.what());
            }
            return r;
        }
    } // namespace

    CommandOutcome run_command(std::string_view command, const ExperimentConfig &config, const Execution &exec)
    {
        config.validate();
        const std::string resolved = resolved_config_json(config);
        CommandOutcome outcome;
        std::ostringstream summary;

        if (command == "simulate")
        {
            OutputSet out(config.output_dir);
            const Simulation sim = run_simulation(config, exec);
            write_fskt(out.path("baseband.fskt"), sim.baseband);
            out.record("baseband.fskt");
            const GroundTruth gt = resample_ground_truth(config.scene, config.grid);
            write_pfm(out.path("ground_truth_depth.pfm"), config.grid.width, config.grid.height, gt.depth, gt.valid);
            out.record("ground_truth_depth.pfm");
            write_ply(out.path("ground_truth.ply"), PointCloud{gt.points, {}, "magnitude"});
            out.record("ground_truth.ply");
            summary << "baseband " << sim.baseband.tx_count() << "x" << sim.baseband.rx_count() << "x"
                    << sim.baseband.freq_count() << " written\n";
            out.finish(command, config, resolved, outcome);
        }
        else if (command == "prior")
        {
            OutputSet out(config.output_dir);
            if (config.prior.mode == PriorMode::camera)
            {
                const OpticalDepthMap map = render_optical_depth(config.scene, config.prior.camera, exec);
                write_pfm(out.path("camera_depth.pfm"), map.width, map.height, map.depth, map.valid);
                out.record("camera_depth.pfm");
                out.text("calibration.json",
                         format_calibration({config.prior.camera.intrinsics, config.prior.camera.extrinsics}));
            }
            const CandidateGrid prior = make_prior(config, exec);
            write_pfm(out.path("prior.pfm"), config.grid.width, config.grid.height, prior.prior, prior.valid);
            out.record("prior.pfm");
            summary << "prior (" << prior_mode_name(config.prior.mode) << ") covers " << prior.valid_count() << " of "
                    << config.grid.size() << " pixels\n";
            out.finish(command, config, resolved, outcome);
        }
        else if (command == "reconstruct")
        {
            OutputSet out(config.output_dir);
            Simulation sim;
            sim.array = config.array.build();
            sim.carriers = carrier_union(config);
            sim.baseband = read_fskt(out.path("baseband.fskt"));
            sim.baseband.check_dims(sim.array, sim.carriers);
            CandidateGrid prior;
            const bool needs_prior =
                std::find(config.methods.begin(), config.methods.end(), Method::mm2fsk) != config.methods.end();
            if (needs_prior)
            {
                const FloatImage img = read_pfm(out.path("prior.pfm"));
                if (img.width != config.grid.width || img.height != config.grid.height)
                    fail(ErrorKind::structural, out.path("prior.pfm").string() + ": prior does not match the grid");
                prior.geometry = config.grid;
                prior.prior = img.values;
                prior.valid = img.finite_mask();
            }
            else
                prior = CandidateGrid::scalar(config.grid, config.prior.scalar_depth);
            for (const MethodRun &run : run_methods(config, sim, prior, exec))
            {
                write_image(out, run.id(), run);
                summary << run.id() << ": " << run.filtered.valid_count() << " valid pixels\n";
            }
            out.finish(command, config, resolved, outcome);
        }
        else if (command == "eval")
        {
            OutputSet out(config.output_dir);
            std::vector<EvalRecord> records;
            for (const PlannedRun &plan : plan_runs(config))
            {
                const GridGeometry g = run_geometry(config, plan.method);
                const std::filesystem::path p = out.path(plan.id() + "_depth.pfm");
                const FloatImage img = read_pfm(p);
                if (img.width != g.width || img.height != g.height)
                    fail(ErrorKind::structural, p.string() + ": image is " + std::to_string(img.width) + "x" +
                                                    std::to_string(img.height) + " but the configured grid is " +
                                                    std::to_string(g.width) + "x" + std::to_string(g.height));
                RadarImage image(g);
                image.depth = img.values;
                image.valid = img.finite_mask();
                const GroundTruth gt = resample_ground_truth(config.scene, g);
                records.push_back({plan.id(), plan.method, plan.config, plan.delta_hz,
                                   evaluate(image, gt, config.erosion)});
            }
            out.text("eval.json", format_eval_json(records));
            const std::string table = format_eval_table(records);
            out.text("eval.txt", table);
            summary << table;
            out.finish(command, config, resolved, outcome);
        }
        else if (command == "sweep")
        {
            OutputSet out(config.output_dir);
            const SweepReport rep = run_sweep(config, exec);
            out.text("sweep.json", format_sweep_json(rep));
            const std::string table = format_sweep_table(rep);
            out.text("sweep.txt", table);
            summary << table;
            out.finish(command, config, resolved, outcome);
        }
        else if (command == "report")
        {
            OutputSet out(config.output_dir);
            std::string body;
            bool any = false;
            if (std::filesystem::exists(out.path("eval.json")))
            {
                const std::string p = out.path("eval.json").string();
                body += "Evaluation\n\n" + format_eval_table(parse_eval_records(read_text_file(p), p)) + "\n";
                any = true;
            }
            if (std::filesystem::exists(out.path("sweep.json")))
            {
                const std::string p = out.path("sweep.json").string();
                body += "Frequency-difference sweep\n\n" + format_sweep_table(parse_sweep_report(read_text_file(p), p));
                any = true;
            }
            if (!any)
                fail(ErrorKind::io, config.output_dir.string() + ": neither eval.json nor sweep.json found");
            out.text("report.txt", body);
            summary << body;
            out.finish(command, config, resolved, outcome);
        }
        else
        {
            fail(ErrorKind::configuration, "unknown command '" + std::string(command) +
                                               "' (expected simulate, prior, reconstruct, eval, sweep or report)");
        }
        outcome.summary = summary.str();
        return outcome;
    }

} // namespace mmfsk
