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
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "errors.hpp"
#include "geometry.hpp"
#include "types.hpp"

namespace nfris {

struct ChannelPair
{
    CMatrix H_F; // K x N, transmitter -> RIS
    CMatrix H_B; // M x K, RIS -> receiver
    double wavelength = 0.0;
    double kappa = 0.0;
};

// Free-space line-of-sight response (amplitude / d) * exp(j kappa d), with
// amplitude 1/(4 pi) by default or lambda/(4 pi) for the Friis law.
inline CMatrix los_channel(const RMatrix &distances, double kappa,
                           AmplitudeLaw law = AmplitudeLaw::inverse_distance)
{
    const double lambda = two_pi / kappa;
    const double scale = law == AmplitudeLaw::friis ? lambda / (4.0 * std::numbers::pi)
                                                    : 1.0 / (4.0 * std::numbers::pi);
    CMatrix h(distances.rows(), distances.cols());
    for (Eigen::Index j = 0; j < distances.cols(); ++j)
        for (Eigen::Index i = 0; i < distances.rows(); ++i)
        {
            const double d = distances(i, j);
            if (!(d > 0.0) || !std::isfinite(d))
                throw Error(ErrorKind::degenerate_geometry,
                            "non-positive distance " + std::to_string(d) + " at entry (" + std::to_string(i) +
                                ", " + std::to_string(j) + ")");
            h(i, j) = std::polar(scale / d, kappa * d);
        }
    return h;
}

inline ChannelPair make_channel_pair(const ArrayGeometry &tx, const ArrayGeometry &ris, const ArrayGeometry &rx,
                                     double carrier_freq, AmplitudeLaw law = AmplitudeLaw::inverse_distance)
{
    if (!(carrier_freq > 0.0))
        throw Error(ErrorKind::invalid_input, "carrier frequency must be positive");
    ChannelPair ch;
    ch.wavelength = wavelength_of(carrier_freq);
    ch.kappa = two_pi / ch.wavelength;
    ch.H_F = los_channel(pairwise_distances(tx, ris), ch.kappa, law);
    ch.H_B = los_channel(pairwise_distances(ris, rx), ch.kappa, law);
    return ch;
}

inline ChannelPair make_channel_pair(const Topology &t, const ScenarioConfig &cfg)
{
    return make_channel_pair(t.tx, t.ris, t.rx, cfg.carrier_freq, cfg.amplitude);
}

// Matrix dump: a "# rows cols" header line, then one line per row holding
// re,im pairs interleaved (2 * cols comma-separated values, %.17g).
inline void write_matrix_csv(std::ostream &os, const CMatrix &m)
{
    char buf[40];
    os << "# " << m.rows() << " " << m.cols() << "\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
        {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j).real());
            os << (j ? "," : "") << buf;
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j).imag());
            os << "," << buf;
        }
        os << "\n";
    }
}

inline CMatrix read_matrix_csv(std::istream &is)
{
    std::string hash;
    Eigen::Index rows = 0, cols = 0;
    std::string header;
    if (!std::getline(is, header))
        throw Error(ErrorKind::invalid_input, "matrix csv: missing header");
    std::istringstream hs(header);
    if (!(hs >> hash >> rows >> cols) || hash != "#" || rows < 0 || cols < 0)
        throw Error(ErrorKind::invalid_input, "matrix csv: bad header '" + header + "'");
    CMatrix m(rows, cols);
    std::string line;
    for (Eigen::Index i = 0; i < rows; ++i)
    {
        if (!std::getline(is, line))
            throw Error(ErrorKind::invalid_input, "matrix csv: truncated at row " + std::to_string(i));
        std::istringstream ls(line);
        for (Eigen::Index j = 0; j < cols; ++j)
        {
            double re = 0.0, im = 0.0;
            char c1 = ',', c2 = ',';
            if (j > 0)
                ls >> c1;
            if (!(ls >> re >> c2 >> im) || c1 != ',' || c2 != ',')
                throw Error(ErrorKind::invalid_input, "matrix csv: bad entry at row " + std::to_string(i));
            m(i, j) = {re, im};
        }
    }
    return m;
}

} // namespace nfris
