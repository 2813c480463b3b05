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

#include <Eigen/QR>

#include <nfris/nfris.hpp>

namespace nfris::testing {

// Linear desk-scale panels: N = M = 8, K = 64 along y.
inline ScenarioConfig desk_config()
{
    ScenarioConfig c;
    c.tx_dims = {1, 8};
    c.ris_dims = {1, 64};
    c.rx_dims = {1, 8};
    return c;
}

inline ScenarioConfig paraxial(ScenarioConfig c, double d)
{
    c.d_F = c.d_B = d;
    c.theta_F = 0.0;
    c.theta_B = std::numbers::pi;
    c.psi_F = c.psi_B = 0.0;
    return c;
}

inline ChannelPair channels_of(const ScenarioConfig &c)
{
    return make_channel_pair(place_topology(c), c);
}

inline CMatrix random_unitary(SplitRng &rng, Eigen::Index n)
{
    Eigen::HouseholderQR<CMatrix> qr(random_complex_matrix(rng, n, n));
    return qr.householderQ();
}

// Worst of max|Phi Phi^H - I| and the norm deviation | ||Phi s|| - ||s|| | over
// `draws` random unit-scale inputs.
inline double passivity_error(const RisConfiguration &phi, SplitRng &rng, int draws = 10)
{
    double worst = phi.unitarity_error();
    const auto k = static_cast<Eigen::Index>(phi.size());
    for (int i = 0; i < draws; ++i)
    {
        const CMatrix s = random_complex_matrix(rng, k, 1);
        worst = std::max(worst, std::abs(phi.apply(s).norm() - s.norm()));
    }
    return worst;
}

} // namespace nfris::testing
