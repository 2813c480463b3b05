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

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>

#include "errors.hpp"
#include "types.hpp"

namespace nfris {

// Panel size: rows along the local z-axis, cols along the local y-axis.
struct PanelDims
{
    std::size_t rows = 1;
    std::size_t cols = 1;

    std::size_t count() const { return rows * cols; }
    bool operator==(const PanelDims &) const = default;
};

// Planar array of point elements. Element i sits in column i of `elements`;
// ordering is row-major with the y-axis index running fastest.
struct ArrayGeometry
{
    Eigen::Matrix3Xd elements;
    Point3 mid_point = Point3::Zero();
    std::size_t rows = 0;
    std::size_t cols = 0;
    double spacing = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(elements.cols()); }
    Point3 element(std::size_t i) const { return elements.col(static_cast<Eigen::Index>(i)); }
};

// Selects the free-space amplitude law used for the line-of-sight entries.
enum class AmplitudeLaw {
    inverse_distance, // 1/(4 pi d)
    friis,            // lambda/(4 pi d)
};

struct ScenarioConfig
{
    double d_F = 7.0;
    double d_B = 7.0;
    double theta_F = 0.0;
    double theta_B = std::numbers::pi;
    double psi_F = 0.0;
    double psi_B = 0.0;

    PanelDims tx_dims{4, 8};
    PanelDims ris_dims{2, 512};
    PanelDims rx_dims{1, 16};

    double carrier_freq = 28e9;
    double tx_power = dbm_to_mw(0.0);      // mW
    double noise_power = dbm_to_mw(-97.0); // mW

    // Unset focus points mean the transmitter / receiver mid-points.
    std::optional<Point3> focus_tx;
    std::optional<Point3> focus_rx;

    // Unset means half a wavelength.
    std::optional<double> spacing;
    AmplitudeLaw amplitude = AmplitudeLaw::inverse_distance;

    bool operator==(const ScenarioConfig &) const = default;

    double wavelength() const { return wavelength_of(carrier_freq); }
    double element_spacing() const { return spacing.value_or(0.5 * wavelength()); }

    // Throws Error(config) naming the first violated bound.
    void validate() const
    {
        auto require = [](bool ok, const std::string &what) {
            if (!ok)
                throw Error(ErrorKind::config, "out of range: " + what);
        };
        auto finite = [](double v) { return std::isfinite(v); };
        require(finite(d_F) && d_F > 0.0, "d_F > 0");
        require(finite(d_B) && d_B > 0.0, "d_B > 0");
        require(finite(carrier_freq) && carrier_freq > 0.0, "carrier_freq > 0");
        require(finite(tx_power) && tx_power > 0.0, "tx_power > 0");
        require(finite(noise_power) && noise_power > 0.0, "noise_power > 0");
        require(finite(theta_F) && finite(theta_B) && finite(psi_F) && finite(psi_B), "angles finite");
        require(tx_dims.rows >= 1 && tx_dims.cols >= 1, "tx rows/cols >= 1");
        require(ris_dims.rows >= 1 && ris_dims.cols >= 1, "ris rows/cols >= 1");
        require(rx_dims.rows >= 1 && rx_dims.cols >= 1, "rx rows/cols >= 1");
        if (spacing)
            require(finite(*spacing) && *spacing > 0.0, "spacing > 0");
    }
};

struct Topology
{
    ArrayGeometry tx;
    ArrayGeometry ris;
    ArrayGeometry rx;
};

// Grid of rows x cols elements centred on `center`. The panel starts in the
// yz-plane and is then rotated about the vertical axis through `center`.
inline ArrayGeometry build_array(std::size_t rows, std::size_t cols, double spacing,
                                 const Point3 &center, double rotation_about_z)
{
    if (rows == 0 || cols == 0)
        throw Error(ErrorKind::invalid_dimension,
                    "array needs rows >= 1 and cols >= 1, got " + std::to_string(rows) + "x" +
                        std::to_string(cols));
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw Error(ErrorKind::invalid_dimension, "array spacing must be positive");

    const Point3 y_axis(-std::sin(rotation_about_z), std::cos(rotation_about_z), 0.0);
    const Point3 z_axis(0.0, 0.0, 1.0);

    ArrayGeometry g;
    g.rows = rows;
    g.cols = cols;
    g.spacing = spacing;
    g.mid_point = center;
    g.elements.resize(3, static_cast<Eigen::Index>(rows * cols));

    const double row_mid = 0.5 * static_cast<double>(rows - 1);
    const double col_mid = 0.5 * static_cast<double>(cols - 1);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
        {
            const double dy = (static_cast<double>(c) - col_mid) * spacing;
            const double dz = (static_cast<double>(r) - row_mid) * spacing;
            g.elements.col(static_cast<Eigen::Index>(r * cols + c)) = center + dy * y_axis + dz * z_axis;
        }
    return g;
}

// Mid-point on the z = 0 plane at distance d and angle theta from the RIS
// normal (+x), counterclockwise.
inline Point3 polar_point(double d, double theta)
{
    return {d * std::cos(theta), d * std::sin(theta), 0.0};
}

// RIS at the origin in the yz-plane; transmitter and receiver placed by
// (d, theta) and tilted by psi about z through their own mid-points.
inline Topology place_topology(const ScenarioConfig &cfg)
{
    cfg.validate();
    const double s = cfg.element_spacing();
    Topology t;
    t.ris = build_array(cfg.ris_dims.rows, cfg.ris_dims.cols, s, Point3::Zero(), 0.0);
    t.tx = build_array(cfg.tx_dims.rows, cfg.tx_dims.cols, s, polar_point(cfg.d_F, cfg.theta_F), cfg.psi_F);
    t.rx = build_array(cfg.rx_dims.rows, cfg.rx_dims.cols, s, polar_point(cfg.d_B, cfg.theta_B), cfg.psi_B);
    return t;
}

// Entry (k, n) is the distance from element n of `a` to element k of `b`.
inline RMatrix pairwise_distances(const ArrayGeometry &a, const ArrayGeometry &b)
{
    const auto na = static_cast<Eigen::Index>(a.size());
    const auto nb = static_cast<Eigen::Index>(b.size());
    RMatrix d(nb, na);
    for (Eigen::Index n = 0; n < na; ++n)
        for (Eigen::Index k = 0; k < nb; ++k)
            d(k, n) = (b.elements.col(k) - a.elements.col(n)).norm();
    return d;
}

// Distances from every element of `a` to a single point.
inline RVector distances_to(const ArrayGeometry &a, const Point3 &p)
{
    RVector d(static_cast<Eigen::Index>(a.size()));
    for (Eigen::Index i = 0; i < d.size(); ++i)
        d(i) = (a.elements.col(i) - p).norm();
    return d;
}

} // namespace nfris
