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
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "types.hpp"

namespace nfris {

// Scenario files are flat "key = value" text. '#' starts a comment, blank
// lines are ignored and keys may carry one dotted section prefix:
//
//   carrier_freq     = 28e9          # Hz
//   tx_power_dbm     = 0             # or tx_power_mw
//   noise_dbm        = -97           # or noise_mw
//   amplitude        = inverse_distance | friis
//   spacing          = 0.005         # m; default half a wavelength
//   tx.rows / tx.cols, ris.rows / ris.cols, rx.rows / rx.cols
//   topology.d_F, topology.d_B                     # m
//   topology.theta_F, theta_B, psi_F, psi_B        # rad, or with a _deg suffix
//   focus.tx = x, y, z  /  focus.rx = x, y, z      # m; default mid-points
namespace config_detail {

inline std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double to_double(const std::string &key, const std::string &v)
{
    std::size_t used = 0;
    double out = 0.0;
    try
    {
        out = std::stod(v, &used);
    }
    catch (const std::exception &)
    {
        used = 0;
    }
    if (used == 0 || trim(v.substr(used)) != "" || !std::isfinite(out))
        throw Error(ErrorKind::config, "key '" + key + "': expected a number, got '" + v + "'");
    return out;
}

inline std::size_t to_count(const std::string &key, const std::string &v)
{
    const double d = to_double(key, v);
    if (d < 1.0 || d != std::floor(d) || d > 1e7)
        throw Error(ErrorKind::config, "out of range: " + key + " must be an integer >= 1, got '" + v + "'");
    return static_cast<std::size_t>(d);
}

inline Point3 to_point(const std::string &key, const std::string &v)
{
    std::vector<double> c;
    std::stringstream ss(v);
    std::string part;
    while (std::getline(ss, part, ','))
        c.push_back(to_double(key, trim(part)));
    if (c.size() != 3)
        throw Error(ErrorKind::config, "key '" + key + "': expected 'x, y, z', got '" + v + "'");
    return {c[0], c[1], c[2]};
}

} // namespace config_detail

inline ScenarioConfig parse_config(const std::string &text)
{
    using namespace config_detail;
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::config, "line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw Error(ErrorKind::config, "line " + std::to_string(line_no) + ": empty key or value");
        if (std::count(key.begin(), key.end(), '.') > 1)
            throw Error(ErrorKind::config, "line " + std::to_string(line_no) + ": at most one section level");
        if (!kv.emplace(key, value).second)
            throw Error(ErrorKind::config, "duplicate key '" + key + "'");
    }

    ScenarioConfig cfg;
    std::map<std::string, bool> used;
    auto take = [&](const std::string &key) -> const std::string * {
        const auto it = kv.find(key);
        if (it == kv.end())
            return nullptr;
        used[key] = true;
        return &it->second;
    };
    auto exclusive = [&](const std::string &a, const std::string &b) {
        if (kv.count(a) && kv.count(b))
            throw Error(ErrorKind::config, "keys '" + a + "' and '" + b + "' are mutually exclusive");
    };

    if (auto v = take("carrier_freq"))
        cfg.carrier_freq = to_double("carrier_freq", *v);

    exclusive("tx_power_dbm", "tx_power_mw");
    if (auto v = take("tx_power_dbm"))
        cfg.tx_power = dbm_to_mw(to_double("tx_power_dbm", *v));
    if (auto v = take("tx_power_mw"))
        cfg.tx_power = to_double("tx_power_mw", *v);

    exclusive("noise_dbm", "noise_mw");
    if (auto v = take("noise_dbm"))
        cfg.noise_power = dbm_to_mw(to_double("noise_dbm", *v));
    if (auto v = take("noise_mw"))
        cfg.noise_power = to_double("noise_mw", *v);

    if (auto v = take("amplitude"))
    {
        if (*v == "inverse_distance")
            cfg.amplitude = AmplitudeLaw::inverse_distance;
        else if (*v == "friis")
            cfg.amplitude = AmplitudeLaw::friis;
        else
            throw Error(ErrorKind::config, "key 'amplitude': expected inverse_distance or friis, got '" + *v + "'");
    }
    if (auto v = take("spacing"))
        cfg.spacing = to_double("spacing", *v);

    auto dims = [&](const std::string &panel, PanelDims &d) {
        if (auto v = take(panel + ".rows"))
            d.rows = to_count(panel + ".rows", *v);
        if (auto v = take(panel + ".cols"))
            d.cols = to_count(panel + ".cols", *v);
    };
    dims("tx", cfg.tx_dims);
    dims("ris", cfg.ris_dims);
    dims("rx", cfg.rx_dims);

    if (auto v = take("topology.d_F"))
        cfg.d_F = to_double("topology.d_F", *v);
    if (auto v = take("topology.d_B"))
        cfg.d_B = to_double("topology.d_B", *v);

    auto angle = [&](const std::string &name, double &out) {
        const std::string rad = "topology." + name;
        const std::string deg = rad + "_deg";
        exclusive(rad, deg);
        if (auto v = take(rad))
            out = to_double(rad, *v);
        if (auto v = take(deg))
            out = to_double(deg, *v) * std::numbers::pi / 180.0;
    };
    angle("theta_F", cfg.theta_F);
    angle("theta_B", cfg.theta_B);
    angle("psi_F", cfg.psi_F);
    angle("psi_B", cfg.psi_B);

    if (auto v = take("focus.tx"))
        cfg.focus_tx = to_point("focus.tx", *v);
    if (auto v = take("focus.rx"))
        cfg.focus_rx = to_point("focus.rx", *v);

    std::string unknown;
    for (const auto &[k, v] : kv)
        if (!used.count(k))
            unknown += (unknown.empty() ? "" : ", ") + k;
    if (!unknown.empty())
        throw Error(ErrorKind::config, "unknown keys: " + unknown);

    cfg.validate();
    return cfg;
}

inline ScenarioConfig parse_config_file(const std::string &path)
{
    std::ifstream f(path);
    if (!f)
        throw Error(ErrorKind::config, "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

// Canonical text form; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const ScenarioConfig &c)
{
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    std::ostringstream os;
    os << "carrier_freq = " << num(c.carrier_freq) << "\n";
    os << "tx_power_mw = " << num(c.tx_power) << "\n";
    os << "noise_mw = " << num(c.noise_power) << "\n";
    os << "amplitude = " << (c.amplitude == AmplitudeLaw::friis ? "friis" : "inverse_distance") << "\n";
    if (c.spacing)
        os << "spacing = " << num(*c.spacing) << "\n";
    os << "tx.rows = " << c.tx_dims.rows << "\n" << "tx.cols = " << c.tx_dims.cols << "\n";
    os << "ris.rows = " << c.ris_dims.rows << "\n" << "ris.cols = " << c.ris_dims.cols << "\n";
    os << "rx.rows = " << c.rx_dims.rows << "\n" << "rx.cols = " << c.rx_dims.cols << "\n";
    os << "topology.d_F = " << num(c.d_F) << "\n";
    os << "topology.d_B = " << num(c.d_B) << "\n";
    os << "topology.theta_F = " << num(c.theta_F) << "\n";
    os << "topology.theta_B = " << num(c.theta_B) << "\n";
    os << "topology.psi_F = " << num(c.psi_F) << "\n";
    os << "topology.psi_B = " << num(c.psi_B) << "\n";
    auto point = [&](const char *key, const Point3 &p) {
        os << key << " = " << num(p.x()) << ", " << num(p.y()) << ", " << num(p.z()) << "\n";
    };
    if (c.focus_tx)
        point("focus.tx", *c.focus_tx);
    if (c.focus_rx)
        point("focus.rx", *c.focus_rx);
    return os.str();
}

// 64-bit FNV-1a over the canonical serialisation.
inline std::uint64_t config_hash(const ScenarioConfig &c)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : serialize_config(c))
    {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace nfris
