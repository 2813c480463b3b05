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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include <nfris/channel.hpp>

using namespace nfris;
using Catch::Approx;

namespace {

RMatrix scalar(double d)
{
    RMatrix m(1, 1);
    m(0, 0) = d;
    return m;
}

} // namespace

TEST_CASE("los_channel - direct substitution")
{
    const cplx h1 = los_channel(scalar(1.0), two_pi)(0, 0);
    CHECK(std::abs(h1) == Approx(1.0 / (4.0 * std::numbers::pi)).epsilon(1e-14));
    CHECK(std::abs(h1) == Approx(0.0795775).epsilon(1e-6));
    CHECK(angular_distance(std::arg(h1), 0.0) < 1e-12);

    // 1/(4 pi 0.25) e^{j pi/2}
    const cplx h2 = los_channel(scalar(0.25), two_pi)(0, 0);
    CHECK(std::abs(h2.real()) < 1e-15);
    CHECK(h2.imag() == Approx(0.3183099).epsilon(1e-6));

    const cplx h3 = los_channel(scalar(2.5), 3.0)(0, 0);
    const cplx h4 = los_channel(scalar(5.0), 3.0)(0, 0);
    CHECK(std::abs(h4) == Approx(0.5 * std::abs(h3)).epsilon(1e-15));
}

TEST_CASE("los_channel - non-positive distances are degenerate")
{
    CHECK_THROWS_AS(los_channel(scalar(0.0), 1.0), Error);
    CHECK_THROWS_AS(los_channel(scalar(-1.0), 1.0), Error);
    const ArrayGeometry a = build_array(1, 2, 0.1, Point3::Zero(), 0.0);
    try
    {
        make_channel_pair(a, a, build_array(1, 1, 0.1, Point3(1, 0, 0), 0.0), 28e9);
        FAIL("expected degenerate geometry");
    }
    catch (const Error &e)
    {
        CHECK(e.kind() == ErrorKind::degenerate_geometry);
    }
}

TEST_CASE("make_channel_pair - scalar link at one metre")
{
    const ArrayGeometry tx = build_array(1, 1, 1.0, Point3(1, 0, 0), 0.0);
    const ArrayGeometry ris = build_array(1, 1, 1.0, Point3::Zero(), 0.0);
    const ArrayGeometry rx = build_array(1, 1, 1.0, Point3(-1, 0, 0), 0.0);
    const ChannelPair ch = make_channel_pair(tx, ris, rx, 28e9);
    CHECK(ch.kappa == two_pi / ch.wavelength);
    CHECK(std::abs(ch.H_F(0, 0)) == Approx(1.0 / (4 * std::numbers::pi)));
    CHECK(std::abs(ch.H_B(0, 0)) == Approx(1.0 / (4 * std::numbers::pi)));
}

TEST_CASE("make_channel_pair - full-size dimensions and amplitude bounds")
{
    ScenarioConfig cfg;
    const Topology t = place_topology(cfg);
    const ChannelPair ch = make_channel_pair(t, cfg);
    CHECK(ch.H_F.rows() == 1024);
    CHECK(ch.H_F.cols() == 32);
    CHECK(ch.H_B.rows() == 16);
    CHECK(ch.H_B.cols() == 1024);

    auto max_offset = [](const ArrayGeometry &g) {
        return (g.elements.colwise() - g.mid_point).colwise().norm().maxCoeff();
    };
    const double delta = max_offset(t.tx) + max_offset(t.ris);
    const double lo = 1.0 / (4 * std::numbers::pi * (7.0 + delta));
    const double hi = 1.0 / (4 * std::numbers::pi * (7.0 - delta));
    const RMatrix mag = ch.H_F.cwiseAbs();
    CHECK(mag.minCoeff() >= lo);
    CHECK(mag.maxCoeff() <= hi);
}

TEST_CASE("make_channel_pair - phase, magnitude and frequency-scaling properties")
{
    ScenarioConfig cfg;
    cfg.tx_dims = {2, 3};
    cfg.ris_dims = {2, 8};
    cfg.rx_dims = {1, 4};
    cfg.theta_F = 0.3;
    cfg.theta_B = 2.2;
    cfg.psi_B = 0.4;
    const Topology t = place_topology(cfg);
    const ChannelPair ch = make_channel_pair(t, cfg);
    const RMatrix dF = pairwise_distances(t.tx, t.ris);

    for (Eigen::Index i = 0; i < dF.rows(); ++i)
        for (Eigen::Index j = 0; j < dF.cols(); ++j)
        {
            const cplx h = ch.H_F(i, j);
            CHECK(std::abs(std::abs(h) * 4 * std::numbers::pi * dF(i, j) - 1.0) < 1e-12);
            CHECK(angular_distance(std::arg(h), std::fmod(ch.kappa * dF(i, j), two_pi)) < 1e-10);
        }

    // doubling the carrier doubles each phase argument, magnitudes untouched
    const ChannelPair ch2 = make_channel_pair(t.tx, t.ris, t.rx, 2 * cfg.carrier_freq);
    CHECK(ch2.wavelength == Approx(0.5 * ch.wavelength).epsilon(1e-15));
    CHECK((ch2.H_F.cwiseAbs() - ch.H_F.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-15);
    for (Eigen::Index i = 0; i < dF.rows(); ++i)
        CHECK(angular_distance(std::arg(ch2.H_F(i, 0)), std::fmod(2 * ch.kappa * dF(i, 0), two_pi)) < 1e-9);

    // swapping transmitter and receiver transposes the magnitudes
    const ChannelPair swapped = make_channel_pair(t.rx, t.ris, t.tx, cfg.carrier_freq);
    CHECK((swapped.H_F.cwiseAbs() - ch.H_B.cwiseAbs().transpose()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((swapped.H_B.cwiseAbs() - ch.H_F.cwiseAbs().transpose()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("make_channel_pair - Friis amplitude switch")
{
    const ArrayGeometry tx = build_array(1, 1, 1.0, Point3(2, 0, 0), 0.0);
    const ArrayGeometry ris = build_array(1, 1, 1.0, Point3::Zero(), 0.0);
    const ChannelPair a = make_channel_pair(tx, ris, tx, 28e9);
    const ChannelPair b = make_channel_pair(tx, ris, tx, 28e9, AmplitudeLaw::friis);
    CHECK(std::abs(b.H_F(0, 0)) == Approx(a.wavelength * std::abs(a.H_F(0, 0))).epsilon(1e-12));
}

TEST_CASE("matrix csv dump round-trips bit-exactly")
{
    ScenarioConfig cfg;
    cfg.ris_dims = {1, 6};
    cfg.tx_dims = {1, 3};
    const Topology t = place_topology(cfg);
    const ChannelPair ch = make_channel_pair(t, cfg);
    std::stringstream ss;
    write_matrix_csv(ss, ch.H_F);
    CHECK(ss.str().rfind("# 6 3\n", 0) == 0);
    const CMatrix back = read_matrix_csv(ss);
    CHECK(back == ch.H_F);

    std::istringstream bad("# 2 2\n1,2,3\n");
    CHECK_THROWS_AS(read_matrix_csv(bad), Error);
}
