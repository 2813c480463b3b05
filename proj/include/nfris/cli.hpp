// SPDX-License-Identifier: Apache-2.0
//
// nfris: capacity and RIS design for near-field RIS-aided MIMO links
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

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "channel.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "geometry.hpp"
#include "ris.hpp"
#include "selftest.hpp"
#include "spectrum.hpp"

namespace nfris {

inline constexpr const char *code_version = "0.1.0";

// Exit codes of the command-line front end.
enum ExitCode : int {
    exit_ok = 0,
    exit_config = 1,
    exit_numerical = 2,
    exit_selftest = 3,
};

struct RunRequest
{
    std::string subcommand;
    std::optional<std::string> config_path;
    std::uint64_t seed = 0;
    std::optional<double> scale;
    std::size_t workers = 0;
    std::optional<std::string> out_dir;
    std::optional<std::string> schemes;
    int max_iters = 50;
    double rel_tol = 1e-6;
    double guard = 0.25;
    bool dump_channels = false;
    // Axis overrides by name: "d", "theta", "d_B", "d_F", "psi_B", "delta".
    std::map<std::string, std::string> axes;
    std::optional<std::string> grid;      // "x0:x1:nx,y0:y1:ny"
    std::optional<std::string> tx_center; // "x,y,z"
};

inline const std::vector<std::string> &subcommands()
{
    static const std::vector<std::string> names{"paraxial",   "rate-map",        "er-map",       "angle-sweep",
                                                "dist-sweep", "rot-focus-sweep", "single-point", "selftest"};
    return names;
}

// Axis text: "a,b,c" for explicit values or "lo:hi:n" for n evenly spaced
// values including both ends.
inline std::vector<double> parse_axis(const std::string &name, const std::string &text)
{
    auto number = [&](const std::string &t) {
        try
        {
            std::size_t used = 0;
            const double v = std::stod(t, &used);
            if (used != t.size())
                throw std::invalid_argument(t);
            return v;
        }
        catch (const std::exception &)
        {
            throw Error(ErrorKind::config, "axis '" + name + "': bad number '" + t + "'");
        }
    };
    std::vector<double> out;
    if (text.find(':') != std::string::npos)
    {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string p;
        while (std::getline(ss, p, ':'))
            parts.push_back(p);
        if (parts.size() != 3)
            throw Error(ErrorKind::config, "axis '" + name + "': expected lo:hi:n");
        const double lo = number(parts[0]), hi = number(parts[1]), n = number(parts[2]);
        if (n < 1 || n != std::floor(n))
            throw Error(ErrorKind::config, "axis '" + name + "': point count must be a positive integer");
        for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i)
            out.push_back(GridSpec::at(lo, hi, static_cast<std::size_t>(n), i));
        if (n == 1)
            out[0] = lo;
        return out;
    }
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ','))
        if (!p.empty())
            out.push_back(number(p));
    if (out.empty())
        throw Error(ErrorKind::config, "axis '" + name + "': no values");
    return out;
}

inline std::vector<double> linspace_open(double lo, double hi, std::size_t n)
{
    std::vector<double> v;
    for (std::size_t i = 0; i < n; ++i)
        v.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n));
    return v;
}

namespace cli_detail {

inline std::string hex64(std::uint64_t v)
{
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string resolve_out_dir(const RunRequest &req)
{
    if (req.out_dir)
        return *req.out_dir;
    if (const char *env = std::getenv("NFRIS_OUT_DIR"); env && *env)
        return env;
    return "nfris_out";
}

inline void write_file(const std::filesystem::path &p, const std::string &text)
{
    std::ofstream f(p, std::ios::binary);
    if (!f)
        throw Error(ErrorKind::config, "cannot write '" + p.string() + "'");
    f << text;
}

inline nlohmann::json config_json(const ScenarioConfig &c)
{
    nlohmann::json j;
    std::istringstream in(serialize_config(c));
    std::string line;
    while (std::getline(in, line))
    {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos)
            j[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return j;
}

inline std::string axis_or(const RunRequest &req, const std::string &name, const std::string &fallback)
{
    const auto it = req.axes.find(name);
    return it == req.axes.end() ? fallback : it->second;
}

inline Point3 parse_point(const std::string &what, const std::string &text)
{
    const std::vector<double> v = parse_axis(what, text);
    if (v.size() != 3)
        throw Error(ErrorKind::config, what + ": expected x,y,z");
    return {v[0], v[1], v[2]};
}

inline GridSpec parse_grid(const std::string &text)
{
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw Error(ErrorKind::config, "grid: expected x0:x1:nx,y0:y1:ny");
    auto one = [](const std::string &t, double &lo, double &hi, std::size_t &n) {
        std::vector<std::string> parts;
        std::stringstream ss(t);
        std::string p;
        while (std::getline(ss, p, ':'))
            parts.push_back(p);
        if (parts.size() != 3)
            throw Error(ErrorKind::config, "grid: expected lo:hi:n per axis");
        const std::vector<double> a = parse_axis("grid", parts[0] + "," + parts[1] + "," + parts[2]);
        if (a[2] < 1 || a[2] != std::floor(a[2]))
            throw Error(ErrorKind::config, "out of range: grid resolution >= 1");
        lo = a[0];
        hi = a[1];
        n = static_cast<std::size_t>(a[2]);
    };
    GridSpec g;
    one(text.substr(0, comma), g.x0, g.x1, g.nx);
    one(text.substr(comma + 1), g.y0, g.y1, g.ny);
    return g;
}

inline void print_optional(std::ostream &out, const char *key, const std::optional<double> &v)
{
    if (v)
        out << key << " = " << format_number(*v) << "\n";
}

} // namespace cli_detail

inline int run(const RunRequest &req, std::ostream &out, std::ostream &err)
{
    using namespace cli_detail;
    const auto started = std::chrono::steady_clock::now();
    auto error_record = [&](int code, const std::string &kind, const std::string &msg) {
        nlohmann::json j;
        j["error"] = {{"code", code}, {"kind", kind}, {"message", msg}, {"subcommand", req.subcommand}};
        err << j.dump() << "\n";
        return code;
    };

    try
    {
        const auto &names = subcommands();
        if (std::find(names.begin(), names.end(), req.subcommand) == names.end())
            throw Error(ErrorKind::config, "unknown subcommand '" + req.subcommand + "'");

        if (req.subcommand == "selftest")
        {
            const auto checks = run_selftest(req.seed);
            bool all = true;
            for (const auto &c : checks)
            {
                out << (c.passed ? "PASS " : "FAIL ") << c.name << " " << c.detail << "\n";
                all = all && c.passed;
            }
            out << (all ? "selftest passed" : "selftest FAILED") << " (seed " << req.seed << ")\n";
            return all ? exit_ok : exit_selftest;
        }

        ScenarioConfig base = req.config_path ? parse_config_file(*req.config_path) : parse_config("");
        const bool is_sweep = req.subcommand != "single-point";
        const double scale = req.scale.value_or(is_sweep ? 0.25 : 1.0);
        const ScenarioConfig cfg = scaled(base, scale);

        SweepOptions opts;
        opts.workers = req.workers;
        opts.seed = req.seed;
        opts.guard_radius = req.guard;
        opts.num.max_iters = req.max_iters;
        opts.num.rel_tol = req.rel_tol;
        const bool dense = req.subcommand == "rate-map" || req.subcommand == "er-map";
        opts.schemes = req.schemes ? SchemeSet::parse(*req.schemes) : SchemeSet{true, true, !dense};

        const std::filesystem::path dir = resolve_out_dir(req);
        std::filesystem::create_directories(dir);
        std::vector<std::string> outputs;
        nlohmann::json manifest;
        manifest["subcommand"] = req.subcommand;
        manifest["seed"] = req.seed;
        manifest["scale"] = scale;
        manifest["workers"] = req.workers;
        manifest["code_version"] = code_version;
        manifest["config_hash"] = hex64(config_hash(cfg));
        manifest["config"] = config_json(cfg);
        manifest["schemes"] = {{"nd", opts.schemes.nd}, {"foc", opts.schemes.foc}, {"num", opts.schemes.num}};

        SweepResult result;
        if (req.subcommand == "single-point")
        {
            const Topology topo = place_topology(cfg);
            const ChannelPair ch = make_channel_pair(topo, cfg);
            PointRecord rec;
            rec.x = topo.rx.mid_point.x();
            rec.y = topo.rx.mid_point.y();
            rec.d_F = cfg.d_F;
            rec.d_B = cfg.d_B;
            rec.theta_F = cfg.theta_F;
            rec.theta_B = cfg.theta_B;
            rec.psi_F = cfg.psi_F;
            rec.psi_B = cfg.psi_B;

            out << "N = " << ch.H_F.cols() << "\nK = " << ch.H_F.rows() << "\nM = " << ch.H_B.rows() << "\n";
            std::optional<RisConfiguration> nd;
            if (opts.schemes.nd)
            {
                const Prop1Result p = capacity_prop1(ch.H_F, ch.H_B, cfg.tx_power, cfg.noise_power);
                nd = RisConfiguration::full(p.Phi);
                rec.rate_nd = p.spectrum.capacity_bits;
                std::vector<double> sv;
                for (double g : p.spectrum.gains)
                    sv.push_back(std::sqrt(g));
                rec.er_nd = sv.empty() ? 0.0 : effective_rank(sv);
                print_optional(out, "rate_nd", rec.rate_nd);
                print_optional(out, "er_nd", rec.er_nd);
                out << "mu_nd = " << format_number(p.spectrum.mu) << "\n";
                out << "active_modes_nd = " << p.spectrum.active_modes() << "\n";
            }
            const RisConfiguration foc =
                d_ris_focusing(topo.ris, cfg.focus_tx.value_or(topo.tx.mid_point),
                               cfg.focus_rx.value_or(topo.rx.mid_point), ch.kappa);
            if (opts.schemes.foc)
            {
                const CMatrix H = cascade(ch.H_F, ch.H_B, foc);
                const ModeSpectrum ms = water_filled_spectrum(H, cfg.tx_power, cfg.noise_power);
                rec.rate_dfoc = ms.capacity_bits;
                rec.er_dfoc = effective_rank(singular_values(H));
                print_optional(out, "rate_dfoc", rec.rate_dfoc);
                print_optional(out, "er_dfoc", rec.er_dfoc);
                out << "mu_dfoc = " << format_number(ms.mu) << "\n";
                out << "active_modes_dfoc = " << ms.active_modes() << "\n";
                out << "residual_dfoc = " << format_number(diagonalization_residual(ch.H_F, ch.H_B, foc)) << "\n";
            }
            if (opts.schemes.num)
            {
                const NumericalResult num =
                    d_ris_numerical(ch.H_F, ch.H_B, cfg.tx_power, cfg.noise_power, foc, opts.num);
                rec.rate_dnum = num.rate;
                print_optional(out, "rate_dnum", rec.rate_dnum);
                out << "iterations_dnum = " << num.iterations << "\n";
                out << "converged_dnum = " << (num.converged ? "true" : "false") << "\n";
            }
            if (rec.rate_nd && rec.rate_dfoc && *rec.rate_nd > 0.0)
                rec.ratio = *rec.rate_dfoc / *rec.rate_nd;
            print_optional(out, "ratio", rec.ratio);
            result = {"rx_x", "rx_y", {rec}};

            if (req.dump_channels)
            {
                auto dump = [&](const std::string &name, const CMatrix &m) {
                    std::ostringstream os;
                    write_matrix_csv(os, m);
                    write_file(dir / name, os.str());
                    outputs.push_back((dir / name).string());
                };
                dump("H_F.csv", ch.H_F);
                dump("H_B.csv", ch.H_B);
                write_file(dir / "ris_foc.txt", to_text(foc));
                outputs.push_back((dir / "ris_foc.txt").string());
                if (nd)
                {
                    write_file(dir / "ris_nd.txt", to_text(*nd));
                    outputs.push_back((dir / "ris_nd.txt").string());
                }
            }
        }
        else if (req.subcommand == "paraxial")
        {
            result = paraxial_sweep(cfg, parse_axis("d", axis_or(req, "d", "2:10:9")), opts);
        }
        else if (dense)
        {
            const Point3 tx = parse_point("tx-center", req.tx_center.value_or("2,13,0"));
            const GridSpec grid = req.grid ? parse_grid(*req.grid) : GridSpec{};
            result = req.subcommand == "rate-map" ? rate_map(cfg, tx, grid, opts)
                                                  : effective_rank_map(cfg, tx, grid, opts);
            manifest["tx_center"] = {tx.x(), tx.y(), tx.z()};
            manifest["grid"] = {{"x0", grid.x0}, {"x1", grid.x1}, {"nx", grid.nx},
                                {"y0", grid.y0}, {"y1", grid.y1}, {"ny", grid.ny}};

            std::vector<double> a, b;
            for (const auto &r : result.records)
            {
                if (r.skipped)
                    continue;
                const auto &va = req.subcommand == "rate-map" ? r.rate_nd : r.er_nd;
                const auto &vb = req.subcommand == "rate-map" ? r.rate_dfoc : r.er_dfoc;
                if (va)
                    a.push_back(*va);
                if (vb)
                    b.push_back(*vb);
            }
            std::ostringstream os;
            write_ccdf_csv(os, ccdf({a, b}), {"ccdf_nd", "ccdf_dfoc"});
            const auto path = dir / (req.subcommand + "_ccdf.csv");
            write_file(path, os.str());
            outputs.push_back(path.string());
        }
        else if (req.subcommand == "angle-sweep")
        {
            const std::string thetas =
                axis_or(req, "theta", [] {
                    std::string s;
                    for (double v : linspace_open(0.0, std::numbers::pi / 2.0, 16))
                        s += (s.empty() ? "" : ",") + format_number(v);
                    return s;
                }());
            result = angle_sweep(cfg, parse_axis("theta", thetas), parse_axis("d", axis_or(req, "d", "4,7")), opts);
        }
        else if (req.subcommand == "dist-sweep")
        {
            result = distance_sweep(cfg, parse_axis("d_B", axis_or(req, "d_B", "1:10:10")),
                                    parse_axis("d_F", axis_or(req, "d_F", "4,8")), opts);
        }
        else if (req.subcommand == "rot-focus-sweep")
        {
            const std::string psi = format_number(-std::numbers::pi / 8.0) + "," + format_number(std::numbers::pi / 4.0) +
                                    "," + format_number(std::numbers::pi / 8.0);
            result = rotation_focus_sweep(cfg, parse_axis("psi_B", axis_or(req, "psi_B", psi)),
                                          parse_axis("delta", axis_or(req, "delta", "0:1:11")), opts);
        }

        std::ostringstream csv;
        write_sweep_csv(csv, result);
        const auto csv_path = dir / (req.subcommand + ".csv");
        write_file(csv_path, csv.str());
        outputs.insert(outputs.begin(), csv_path.string());

        const auto manifest_path = dir / (req.subcommand + ".json");
        outputs.push_back(manifest_path.string());
        manifest["axes"] = {{"x", result.x_label}, {"y", result.y_label}};
        manifest["records"] = result.records.size();
        manifest["skipped"] = result.skipped_count();
        manifest["outputs"] = outputs;
        manifest["wall_clock_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        write_file(manifest_path, manifest.dump(2) + "\n");

        if (is_sweep)
            out << "wrote " << result.records.size() << " records (" << result.skipped_count() << " skipped) to "
                << csv_path.string() << "\n";
        return exit_ok;
    }
    catch (const Error &e)
    {
        const int code = e.kind() == ErrorKind::config ? exit_config : exit_numerical;
        return error_record(code, to_string(e.kind()), e.what());
    }
    catch (const std::filesystem::filesystem_error &e)
    {
        return error_record(exit_config, "io", e.what());
    }
    catch (const std::exception &e)
    {
        return error_record(exit_numerical, "internal", e.what());
    }
}

} // namespace nfris
