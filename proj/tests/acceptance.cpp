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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <nfris/cli.hpp>

#include "oracles.hpp"
#include "support.hpp"

using namespace nfris;
using namespace nfris::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome
{
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char *f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Every configuration produced anywhere below, checked by criterion 4.
std::vector<RisConfiguration> produced;

RisConfiguration keep(RisConfiguration c)
{
    produced.push_back(c);
    return c;
}

RisConfiguration focusing_for(const Topology &t, const ChannelPair &ch)
{
    return keep(d_ris_focusing(t.ris, t.tx.mid_point, t.rx.mid_point, ch.kappa));
}

Outcome closed_form_equivalence()
{
    const auto t0 = Clock::now();
    SplitRng rng(1001);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i)
    {
        const CMatrix HF = random_complex_matrix(rng, 8, 4);
        const CMatrix HB = random_complex_matrix(rng, 4, 8);
        const double P = std::exp(rng.uniform(-2.0, 2.0));
        const double noise = std::exp(rng.uniform(-2.0, 1.0));
        const Prop1Result r = capacity_prop1(HF, HB, P, noise);
        keep(RisConfiguration::full(r.Phi));
        const double direct = oracle::logdet_rate(HB * r.Phi * HF, r.Q, noise);
        worst = std::max(worst, std::abs(direct - r.spectrum.capacity_bits) / r.spectrum.capacity_bits);
    }
    const double dt = seconds_since(t0);
    return {worst < 1e-9 && dt < 5.0, "max_rel_err=" + fmt("%.3e", worst) + " runtime=" + fmt("%.2fs", dt)};
}

Outcome water_filling_kkt()
{
    SplitRng rng(1002);
    double sum_err = 0.0, slack = 0.0, vs_bisect = 0.0;
    for (int i = 0; i < 1000; ++i)
    {
        const auto n = static_cast<std::size_t>(1 + i % 16);
        std::vector<double> g(n);
        for (double &v : g)
            v = std::exp(rng.uniform(-6.0, 4.0));
        std::sort(g.rbegin(), g.rend());
        const double P = std::exp(rng.uniform(-4.0, 4.0));
        const double noise = std::exp(rng.uniform(-2.0, 2.0));
        const ModeSpectrum ms = water_filling(g, P, noise);
        const auto ref = oracle::bisection_powers(g, P, noise);
        double total = 0.0;
        for (std::size_t k = 0; k < n; ++k)
        {
            total += ms.powers[k];
            const double gap = ms.mu - noise / g[k];
            // P_k (mu - noise/g_k - P_k) = 0 and P_k = 0 needs mu <= noise/g_k
            slack = std::max(slack, ms.powers[k] > 0.0 ? std::abs(gap - ms.powers[k]) : std::max(gap, 0.0));
            if (ms.powers[k] < 0.0)
                slack = std::max(slack, -ms.powers[k]);
            vs_bisect = std::max(vs_bisect, std::abs(ms.powers[k] - ref[k]));
        }
        sum_err = std::max(sum_err, std::abs(total - P) / P);
    }
    return {sum_err <= 1e-12 && slack < 1e-10 && vs_bisect < 1e-8,
            "sum_rel_err=" + fmt("%.3e", sum_err) + " slackness=" + fmt("%.3e", slack) +
                " bisection_max_diff=" + fmt("%.3e", vs_bisect)};
}

Outcome diagonal_x_invariance()
{
    SplitRng rng(1003);
    const CMatrix HF = random_complex_matrix(rng, 8, 4);
    const CMatrix HB = random_complex_matrix(rng, 4, 8);
    const double noise = 0.4;
    const Prop1Result p = capacity_prop1(HF, HB, 1.0, noise);
    const SvdTriple f = svd(HF), b = svd(HB);
    const double base = oracle::logdet_rate(HB * b.V * f.U.adjoint() * HF, p.Q, noise);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i)
    {
        const RisConfiguration X = RisConfiguration::diagonal(random_phases(rng, 8));
        const RisConfiguration phi = keep(RisConfiguration::full(b.V * X.matrix() * f.U.adjoint()));
        worst = std::max(worst, std::abs(oracle::logdet_rate(HB * phi.matrix() * HF, p.Q, noise) - base) / base);
    }
    return {worst < 1e-9, "max_rel_err=" + fmt("%.3e", worst)};
}

Outcome scheme_dominance()
{
    SplitRng rng(1005);
    double worst = -1e300;
    bool monotone = true;
    int iters = 0;
    for (int i = 0; i < 100; ++i)
    {
        const ScenarioConfig c = random_geometry(desk_config(), rng);
        const Topology t = place_topology(c);
        const ChannelPair ch = make_channel_pair(t, c);
        const RisConfiguration foc = focusing_for(t, ch);
        const double r_foc = rate_of(ch.H_F, ch.H_B, foc, c.tx_power, c.noise_power).capacity_bits;
        const RisConfiguration nd = keep(nd_ris_optimal(ch.H_F, ch.H_B));
        const double r_nd = rate_of(ch.H_F, ch.H_B, nd, c.tx_power, c.noise_power).capacity_bits;
        const NumericalResult num = d_ris_numerical(ch.H_F, ch.H_B, c.tx_power, c.noise_power, foc);
        keep(num.config);
        iters += num.iterations;
        worst = std::max({worst, num.rate - r_nd, r_foc - num.rate});
        monotone = monotone && std::abs(num.trace.front() - r_foc) <= 1e-12 * r_foc;
        for (std::size_t k = 1; k < num.trace.size(); ++k)
            monotone = monotone && num.trace[k] >= num.trace[k - 1];
    }
    return {worst <= 1e-9 && monotone, "max_violation=" + fmt("%.3e", std::max(worst, 0.0)) +
                                           (monotone ? " trace=monotone" : " trace=broken") +
                                           " mean_iterations=" + fmt("%.1f", iters / 100.0)};
}

// Frozen from an independent numpy evaluation of the same desk-scale scenario.
struct ParaxialFixture
{
    double d, rate_nd, rate_dfoc;
};
constexpr ParaxialFixture paraxial_fixtures[] = {
    {4.0, 43.39688918596375, 43.39688918116883},  {5.0, 39.284206863811534, 39.28420686252724},
    {6.0, 36.16609598227315, 36.16609598184166},  {7.0, 33.5212603879633, 33.52126038779191},
    {8.0, 31.22684400044643, 31.226844000369},
};

Outcome paraxial_near_optimality()
{
    const auto t0 = Clock::now();
    bool ok = true;
    double min_ratio = 1e300, max_gap = 0.0, fixture_err = 0.0;
    for (const auto &fx : paraxial_fixtures)
    {
        const ScenarioConfig c = paraxial(desk_config(), fx.d);
        const Topology t = place_topology(c);
        const ChannelPair ch = make_channel_pair(t, c);
        const RisConfiguration foc = focusing_for(t, ch);
        const double r_foc = rate_of(ch.H_F, ch.H_B, foc, c.tx_power, c.noise_power).capacity_bits;
        const Prop1Result nd = capacity_prop1(ch.H_F, ch.H_B, c.tx_power, c.noise_power);
        keep(RisConfiguration::full(nd.Phi));
        const NumericalResult num = d_ris_numerical(ch.H_F, ch.H_B, c.tx_power, c.noise_power, foc);
        keep(num.config);
        const double ratio = r_foc / nd.spectrum.capacity_bits;
        min_ratio = std::min(min_ratio, ratio);
        max_gap = std::max(max_gap, (num.rate - r_foc) / r_foc);
        fixture_err = std::max({fixture_err, std::abs(nd.spectrum.capacity_bits - fx.rate_nd) / fx.rate_nd,
                                std::abs(r_foc - fx.rate_dfoc) / fx.rate_dfoc});
        ok = ok && ratio >= 0.95 && num.rate - r_foc <= 0.02 * r_foc;
    }
    const double dt = seconds_since(t0);
    ok = ok && fixture_err < 1e-9 && dt < 60.0;
    return {ok, "min_ratio=" + fmt("%.6f", min_ratio) + " max_num_gain=" + fmt("%.3e", max_gap) +
                    " fixture_rel_err=" + fmt("%.3e", fixture_err) + " runtime=" + fmt("%.2fs", dt)};
}

Outcome beam_projection_agreement()
{
    const ScenarioConfig c = paraxial(desk_config(), 7.0);
    const Topology t = place_topology(c);
    const ChannelPair ch = make_channel_pair(t, c);
    const SvdTriple f = svd(ch.H_F), b = svd(ch.H_B);
    const double s1 = f.S(0) * b.S(0);
    const BeamProjection pn =
        beam_projection(cascade(ch.H_F, ch.H_B, keep(nd_ris_optimal(ch.H_F, ch.H_B))), f.V, 0, s1);
    const BeamProjection pf = beam_projection(cascade(ch.H_F, ch.H_B, focusing_for(t, ch)), f.V, 0, s1);
    const double peak = *std::max_element(pn.magnitudes.begin(), pn.magnitudes.end());
    double worst = 0.0;
    for (std::size_t m = 0; m < pn.magnitudes.size(); ++m)
        worst = std::max(worst, std::abs(pn.magnitudes[m] - pf.magnitudes[m]) / peak);
    return {worst <= 0.1, "max_pointwise_diff/peak=" + fmt("%.3e", worst)};
}

Outcome effective_rank_sanity()
{
    bool identity = true;
    for (int n : {1, 4, 16})
        identity = identity && effective_rank(singular_values(CMatrix::Identity(n, n))) == static_cast<double>(n);

    SweepOptions o;
    o.schemes = SchemeSet::parse("nd,foc");
    const ScenarioConfig c = desk_config();
    const SweepResult map = effective_rank_map(c, Point3(2.0, 13.0, 0.0), GridSpec{}, o);
    const double cap = static_cast<double>(std::min(c.tx_dims.rows * c.tx_dims.cols, c.rx_dims.rows * c.rx_dims.cols));
    double er_max = 0.0;
    for (const PointRecord &p : map.records)
        if (!p.skipped)
            er_max = std::max({er_max, *p.er_nd, *p.er_dfoc});

    ScenarioConfig far = c;
    far.d_B = 200.0;
    far.theta_B = std::numbers::pi / 2.0;
    const PointRecord fr = evaluate_point({far, 0.0, 0.0}, o);
    const bool ok = identity && map.records.size() == 400 && er_max <= cap && *fr.er_nd < 1.2;
    return {ok, std::string("ER(I_n)=n:") + (identity ? "yes" : "no") + " map_max_er=" + fmt("%.4f", er_max) +
                    " skipped=" + std::to_string(map.skipped_count()) + " far_er=" + fmt("%.6f", *fr.er_nd)};
}

Outcome full_scale_smoke()
{
    const ScenarioConfig c = parse_config("");
    const auto t0 = Clock::now();
    const Topology t = place_topology(c);
    const ChannelPair ch = make_channel_pair(t, c);
    const Prop1Result nd = capacity_prop1(ch.H_F, ch.H_B, c.tx_power, c.noise_power);
    const RisConfiguration foc = d_ris_focusing(t.ris, t.tx.mid_point, t.rx.mid_point, ch.kappa);
    const double r_foc = rate_of(ch.H_F, ch.H_B, foc, c.tx_power, c.noise_power).capacity_bits;
    const double dt = seconds_since(t0);

    const RisConfiguration phi = RisConfiguration::full(nd.Phi);
    const double direct = oracle::logdet_rate(ch.H_B * nd.Phi * ch.H_F, nd.Q, c.noise_power);
    const double rel = std::abs(direct - nd.spectrum.capacity_bits) / nd.spectrum.capacity_bits;
    SplitRng rng(1009);
    const double unit = std::max(passivity_error(phi, rng), passivity_error(foc, rng));
    const bool dims = ch.H_F.cols() == 32 && ch.H_F.rows() == 1024 && ch.H_B.rows() == 16;
    return {dims && dt < 30.0 && rel < 1e-9 && unit < 1e-10 && r_foc <= nd.spectrum.capacity_bits + 1e-9,
            "N=32 K=1024 M=16 runtime=" + fmt("%.2fs", dt) + " rate_nd=" + fmt("%.4f", nd.spectrum.capacity_bits) +
                " rate_dfoc=" + fmt("%.4f", r_foc) + " closed_form_rel_err=" + fmt("%.3e", rel) +
                " unitarity_err=" + fmt("%.3e", unit)};
}

std::string run_to_bytes(const std::string &sub, std::size_t workers, const fs::path &dir,
                         std::map<std::string, std::string> axes, const char *grid = nullptr)
{
    RunRequest req;
    req.subcommand = sub;
    req.seed = 7;
    req.scale = 0.125;
    req.workers = workers;
    req.out_dir = (dir / (sub + "_w" + std::to_string(workers))).string();
    req.axes = std::move(axes);
    if (grid)
        req.grid = grid;
    std::ostringstream out, err;
    if (run(req, out, err) != exit_ok)
        return "run failed: " + err.str();
    std::ifstream f(fs::path(*req.out_dir) / (sub + ".csv"), std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Outcome determinism()
{
    const fs::path dir = fs::temp_directory_path() / "nfris_acceptance_determinism";
    fs::remove_all(dir);
    bool ok = true;
    std::string detail;
    struct Case
    {
        std::string sub;
        std::map<std::string, std::string> axes;
        const char *grid;
    };
    const std::vector<Case> cases{
        {"angle-sweep", {{"theta", "0:1.4:8"}, {"d", "4,7"}}, nullptr},
        {"rate-map", {}, "-10:10:8,0:15:6"},
        {"rot-focus-sweep", {{"delta", "0:1:6"}}, nullptr},
    };
    for (const Case &c : cases)
    {
        const std::string one = run_to_bytes(c.sub, 1, dir, c.axes, c.grid);
        bool same = one.rfind("run failed", 0) != 0;
        for (std::size_t w : {2u, 4u})
            same = same && run_to_bytes(c.sub, w, dir, c.axes, c.grid) == one;
        ok = ok && same;
        detail += c.sub + (same ? "=identical " : "=DIFFERENT ");
    }
    fs::remove_all(dir);
    return {ok, detail + "(workers 1,2,4)"};
}

Outcome passivity_everywhere()
{
    SplitRng rng(1004);
    double worst = 0.0;
    for (const RisConfiguration &c : produced)
        worst = std::max(worst, passivity_error(c, rng, 10));
    return {!produced.empty() && worst < 1e-10,
            "configurations=" + std::to_string(produced.size()) + " max_err=" + fmt("%.3e", worst)};
}

} // namespace

int main()
{
    struct Criterion
    {
        int id;
        const char *name;
        std::function<Outcome()> check;
        Outcome result;
    };
    std::vector<Criterion> all{
        {1, "closed_form_capacity_oracle", closed_form_equivalence, {}},
        {2, "water_filling_kkt", water_filling_kkt, {}},
        {3, "diagonal_x_invariance", diagonal_x_invariance, {}},
        {4, "passivity_unitarity", nullptr, {}},
        {5, "scheme_dominance", scheme_dominance, {}},
        {6, "paraxial_near_optimality", paraxial_near_optimality, {}},
        {7, "beam_projection_agreement", beam_projection_agreement, {}},
        {8, "effective_rank_sanity", effective_rank_sanity, {}},
        {9, "full_scale_smoke", full_scale_smoke, {}},
        {10, "determinism", determinism, {}},
    };
    // criterion 4 audits what the others produced, so it is evaluated last
    for (auto &c : all)
        if (c.check)
        {
            try
            {
                c.result = c.check();
            }
            catch (const std::exception &e)
            {
                c.result = {false, std::string("exception: ") + e.what()};
            }
        }
    all[3].result = passivity_everywhere();

    int failed = 0;
    for (const auto &c : all)
    {
        std::printf("%s [%d] %s: %s\n", c.result.pass ? "PASS" : "FAIL", c.id, c.name, c.result.detail.c_str());
        failed += !c.result.pass;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
