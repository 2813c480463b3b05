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
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "channel.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "ris.hpp"
#include "rng.hpp"
#include "spectrum.hpp"

namespace nfris {

struct SchemeSet
{
    bool nd = true;
    bool foc = true;
    bool num = false;

    // Comma-separated subset of {nd, foc, num}.
    static SchemeSet parse(const std::string &text)
    {
        SchemeSet s{false, false, false};
        std::size_t start = 0;
        while (start <= text.size())
        {
            const std::size_t end = std::min(text.find(',', start), text.size());
            const std::string tok = text.substr(start, end - start);
            if (tok == "nd")
                s.nd = true;
            else if (tok == "foc")
                s.foc = true;
            else if (tok == "num")
                s.num = true;
            else if (!tok.empty())
                throw Error(ErrorKind::config, "unknown scheme '" + tok + "' (expected nd, foc, num)");
            start = end + 1;
        }
        if (!s.nd && !s.foc && !s.num)
            throw Error(ErrorKind::config, "empty scheme set");
        return s;
    }
};

struct PointRecord
{
    double x = 0.0;
    double y = 0.0;
    double d_F = 0.0, d_B = 0.0;
    double theta_F = 0.0, theta_B = 0.0;
    double psi_F = 0.0, psi_B = 0.0;
    std::optional<double> rate_nd, rate_dfoc, rate_dnum;
    std::optional<double> er_nd, er_dfoc;
    std::optional<double> ratio;
    bool skipped = false;
    std::string skip_reason;
};

struct SweepResult
{
    std::string x_label;
    std::string y_label;
    std::vector<PointRecord> records;

    std::size_t skipped_count() const
    {
        return static_cast<std::size_t>(
            std::count_if(records.begin(), records.end(), [](const PointRecord &r) { return r.skipped; }));
    }
};

struct SweepOptions
{
    SchemeSet schemes;
    NumericalOptions num;
    std::size_t workers = 0; // 0: hardware concurrency
    double guard_radius = 0.25;
    std::uint64_t seed = 0;
};

struct PointSpec
{
    ScenarioConfig cfg;
    double x = 0.0;
    double y = 0.0;
};

// Shrinks the y-axis element count of every panel by `scale` (rounded,
// at least one), so N, K and M scale proportionally.
inline ScenarioConfig scaled(ScenarioConfig cfg, double scale)
{
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw Error(ErrorKind::config, "out of range: scale > 0");
    auto shrink = [scale](PanelDims d) {
        d.cols = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(d.cols) * scale)));
        return d;
    };
    cfg.tx_dims = shrink(cfg.tx_dims);
    cfg.ris_dims = shrink(cfg.ris_dims);
    cfg.rx_dims = shrink(cfg.rx_dims);
    return cfg;
}

// Random placement for dominance checks: distances in [2, 10] m, angles
// anywhere in the plane, receiver tilts up to +-pi/4.
inline ScenarioConfig random_geometry(ScenarioConfig cfg, SplitRng &rng)
{
    cfg.d_F = rng.uniform(2.0, 10.0);
    cfg.d_B = rng.uniform(2.0, 10.0);
    cfg.theta_F = rng.uniform(-std::numbers::pi / 2.0, std::numbers::pi / 2.0);
    cfg.theta_B = rng.uniform(-std::numbers::pi, std::numbers::pi);
    cfg.psi_F = rng.uniform(-std::numbers::pi / 4.0, std::numbers::pi / 4.0);
    cfg.psi_B = rng.uniform(-std::numbers::pi / 4.0, std::numbers::pi / 4.0);
    return cfg;
}

inline PointRecord evaluate_point(const PointSpec &spec, const SweepOptions &opts, std::uint64_t point_seed = 0)
{
    const ScenarioConfig &cfg = spec.cfg;
    PointRecord rec;
    rec.x = spec.x;
    rec.y = spec.y;
    rec.d_F = cfg.d_F;
    rec.d_B = cfg.d_B;
    rec.theta_F = cfg.theta_F;
    rec.theta_B = cfg.theta_B;
    rec.psi_F = cfg.psi_F;
    rec.psi_B = cfg.psi_B;

    try
    {
        const Topology topo = place_topology(cfg);
        const double guard = opts.guard_radius;
        if (topo.rx.mid_point.norm() < guard || topo.tx.mid_point.norm() < guard)
            throw Error(ErrorKind::degenerate_geometry, "panel within guard radius of the RIS");
        if ((topo.rx.mid_point - topo.tx.mid_point).norm() < guard)
            throw Error(ErrorKind::degenerate_geometry, "transmitter and receiver overlap");

        const ChannelPair ch = make_channel_pair(topo, cfg);
        if (opts.schemes.nd)
        {
            const ModeSpectrum ms = capacity_prop1_spectrum(ch.H_F, ch.H_B, cfg.tx_power, cfg.noise_power);
            rec.rate_nd = ms.capacity_bits;
            std::vector<double> sv;
            for (double g : ms.gains)
                sv.push_back(std::sqrt(g));
            rec.er_nd = sv.empty() ? 0.0 : effective_rank(sv);
        }
        if (opts.schemes.foc || opts.schemes.num)
        {
            const RisConfiguration foc =
                d_ris_focusing(topo.ris, cfg.focus_tx.value_or(topo.tx.mid_point),
                               cfg.focus_rx.value_or(topo.rx.mid_point), ch.kappa);
            if (opts.schemes.foc)
            {
                const CMatrix H = cascade(ch.H_F, ch.H_B, foc);
                const RVector s = singular_values(H);
                rec.rate_dfoc = spectrum_from_gains(squared_gains(s, H.rows(), H.cols()), cfg.tx_power,
                                                    cfg.noise_power)
                                    .capacity_bits;
                rec.er_dfoc = s.sum() > 0.0 ? effective_rank(s) : 0.0;
            }
            if (opts.schemes.num)
            {
                NumericalOptions num = opts.num;
                num.seed = point_seed;
                rec.rate_dnum = d_ris_numerical(ch.H_F, ch.H_B, cfg.tx_power, cfg.noise_power, foc, num).rate;
            }
        }
        if (rec.rate_nd && rec.rate_dfoc && *rec.rate_nd > 0.0)
            rec.ratio = *rec.rate_dfoc / *rec.rate_nd;
    }
    catch (const Error &e)
    {
        if (e.kind() != ErrorKind::degenerate_geometry)
            throw;
        PointRecord skipped;
        skipped.x = rec.x;
        skipped.y = rec.y;
        skipped.d_F = rec.d_F;
        skipped.d_B = rec.d_B;
        skipped.theta_F = rec.theta_F;
        skipped.theta_B = rec.theta_B;
        skipped.psi_F = rec.psi_F;
        skipped.psi_B = rec.psi_B;
        skipped.skipped = true;
        skipped.skip_reason = e.what();
        return skipped;
    }
    return rec;
}

// Evaluates every point on a bounded worker pool. Records land at their own
// index, so the output order never depends on scheduling.
inline std::vector<PointRecord> run_grid(const std::vector<PointSpec> &points, const SweepOptions &opts)
{
    std::vector<PointRecord> out(points.size());
    std::size_t workers = opts.workers ? opts.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, std::max<std::size_t>(1, points.size()));

    const SplitRng root(opts.seed);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        for (;;)
        {
            const std::size_t i = next.fetch_add(1);
            if (i >= points.size())
                return;
            try
            {
                out[i] = evaluate_point(points[i], opts, root.split(i).seed());
            }
            catch (...)
            {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next.store(points.size());
                return;
            }
        }
    };

    if (workers == 1)
        work();
    else
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(work);
    }
    if (failure)
        std::rethrow_exception(failure);
    return out;
}

inline SweepResult paraxial_sweep(const ScenarioConfig &tmpl, const std::vector<double> &d_values,
                                  const SweepOptions &opts)
{
    std::vector<PointSpec> pts;
    for (double d : d_values)
    {
        ScenarioConfig c = tmpl;
        c.d_F = c.d_B = d;
        c.theta_F = 0.0;
        c.theta_B = std::numbers::pi;
        c.psi_F = c.psi_B = 0.0;
        pts.push_back({c, d, 0.0});
    }
    return {"d", "", run_grid(pts, opts)};
}

struct GridSpec
{
    double x0 = -10.0, x1 = 10.0;
    std::size_t nx = 20;
    double y0 = 0.0, y1 = 15.0;
    std::size_t ny = 20;

    static double at(double lo, double hi, std::size_t n, std::size_t i)
    {
        return n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
};

// Receiver mid-point swept over the z = 0 plane (row-major, x fastest), the
// transmitter mid-point fixed at `tx_center`.
inline SweepResult rate_map(const ScenarioConfig &tmpl, const Point3 &tx_center, const GridSpec &grid,
                            const SweepOptions &opts)
{
    if (grid.nx == 0 || grid.ny == 0)
        throw Error(ErrorKind::config, "out of range: grid resolution >= 1");
    std::vector<PointSpec> pts;
    ScenarioConfig base = tmpl;
    base.d_F = std::hypot(tx_center.x(), tx_center.y());
    base.theta_F = std::atan2(tx_center.y(), tx_center.x());
    for (std::size_t j = 0; j < grid.ny; ++j)
        for (std::size_t i = 0; i < grid.nx; ++i)
        {
            const double x = GridSpec::at(grid.x0, grid.x1, grid.nx, i);
            const double y = GridSpec::at(grid.y0, grid.y1, grid.ny, j);
            ScenarioConfig c = base;
            c.d_B = std::hypot(x, y);
            c.theta_B = std::atan2(y, x);
            if (c.d_B == 0.0)
                c.d_B = std::numeric_limits<double>::min(); // flagged by the guard
            pts.push_back({c, x, y});
        }
    return {"x", "y", run_grid(pts, opts)};
}

inline SweepResult effective_rank_map(const ScenarioConfig &tmpl, const Point3 &tx_center, const GridSpec &grid,
                                      const SweepOptions &opts)
{
    return rate_map(tmpl, tx_center, grid, opts);
}

// theta_F = -theta_B = theta at d_F = d_B = d.
inline SweepResult angle_sweep(const ScenarioConfig &tmpl, const std::vector<double> &thetas,
                               const std::vector<double> &d_values, const SweepOptions &opts)
{
    std::vector<PointSpec> pts;
    for (double d : d_values)
        for (double th : thetas)
        {
            ScenarioConfig c = tmpl;
            c.d_F = c.d_B = d;
            c.theta_F = th;
            c.theta_B = -th;
            c.psi_F = c.psi_B = 0.0;
            pts.push_back({c, th, d});
        }
    return {"theta", "d", run_grid(pts, opts)};
}

// d_B swept for each fixed d_F, angles held.
inline SweepResult distance_sweep(const ScenarioConfig &tmpl, const std::vector<double> &d_B_values,
                                  const std::vector<double> &d_F_values, const SweepOptions &opts,
                                  double theta_F = std::numbers::pi / 8.0, double theta_B = 3.0 * std::numbers::pi / 8.0)
{
    std::vector<PointSpec> pts;
    for (double dF : d_F_values)
        for (double dB : d_B_values)
        {
            ScenarioConfig c = tmpl;
            c.d_F = dF;
            c.d_B = dB;
            c.theta_F = theta_F;
            c.theta_B = theta_B;
            c.psi_F = c.psi_B = 0.0;
            pts.push_back({c, dB, dF});
        }
    return {"d_B", "d_F", run_grid(pts, opts)};
}

// Receive focusing point moved by delta along the receiver's axis towards its
// last element: p = c_U + delta (u_M - c_U) / |u_M - c_U|.
inline Point3 offset_focus_point(const ArrayGeometry &rx, double delta)
{
    const Point3 last = rx.element(rx.size() - 1);
    const Point3 dir = last - rx.mid_point;
    if (dir.norm() == 0.0)
        return rx.mid_point;
    return rx.mid_point + delta * dir / dir.norm();
}

struct RotationFocusSetup
{
    double theta_F = std::numbers::pi / 4.0;
    double theta_B = std::numbers::pi / 3.0;
    double d_F = 2.0;
    double d_B = 3.5;
};

inline SweepResult rotation_focus_sweep(const ScenarioConfig &tmpl, const std::vector<double> &psi_B_values,
                                        const std::vector<double> &deltas, const SweepOptions &opts,
                                        const RotationFocusSetup &setup = {})
{
    std::vector<PointSpec> pts;
    for (double psi : psi_B_values)
        for (double delta : deltas)
        {
            ScenarioConfig c = tmpl;
            c.theta_F = setup.theta_F;
            c.theta_B = setup.theta_B;
            c.d_F = setup.d_F;
            c.d_B = setup.d_B;
            c.psi_F = 0.0;
            c.psi_B = psi;
            const Topology t = place_topology(c);
            c.focus_tx = t.tx.mid_point;
            c.focus_rx = offset_focus_point(t.rx, delta);
            pts.push_back({c, delta, psi});
        }
    return {"delta", "psi_B", run_grid(pts, opts)};
}

struct BeamProjection
{
    std::vector<double> magnitudes; // |(H v_i)_m| / sigma_1 per receive antenna
    double norm = 0.0;              // ||H v_i|| / sigma_1
};

inline BeamProjection beam_projection(const CMatrix &H, const CMatrix &V, std::size_t mode, double sigma_1 = 1.0)
{
    if (static_cast<Eigen::Index>(mode) >= V.cols() || V.rows() != H.cols())
        throw Error(ErrorKind::invalid_input, "beam_projection: mode " + std::to_string(mode) + " out of range");
    if (!(sigma_1 > 0.0))
        throw Error(ErrorKind::invalid_input, "beam_projection: normaliser must be positive");
    const CVector y = H * V.col(static_cast<Eigen::Index>(mode));
    BeamProjection p;
    p.magnitudes.resize(static_cast<std::size_t>(y.size()));
    for (Eigen::Index m = 0; m < y.size(); ++m)
        p.magnitudes[static_cast<std::size_t>(m)] = std::abs(y(m)) / sigma_1;
    p.norm = y.norm() / sigma_1;
    return p;
}

struct Ccdf
{
    std::vector<double> abscissae;
    std::vector<std::vector<double>> series; // P(X > x), one per input sample set
};

// Complementary CDF of each sample set at `points` evenly spaced abscissae
// spanning the joint observed range.
inline Ccdf ccdf(const std::vector<std::vector<double>> &samples, std::size_t points = 200)
{
    Ccdf out;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto &s : samples)
        for (double v : s)
        {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (!std::isfinite(lo) || points == 0)
    {
        out.series.resize(samples.size());
        return out;
    }
    for (std::size_t i = 0; i < points; ++i)
        out.abscissae.push_back(GridSpec::at(lo, hi, points, i));
    if (points == 1)
        out.abscissae[0] = lo;
    for (const auto &s : samples)
    {
        std::vector<double> sorted = s;
        std::sort(sorted.begin(), sorted.end());
        std::vector<double> col;
        for (double x : out.abscissae)
        {
            const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), x);
            col.push_back(sorted.empty() ? 0.0 : static_cast<double>(above) / static_cast<double>(sorted.size()));
        }
        out.series.push_back(std::move(col));
    }
    return out;
}

inline std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline constexpr const char *sweep_csv_header =
    "x,y,d_F,d_B,theta_F,theta_B,psi_F,psi_B,rate_nd,rate_dfoc,rate_dnum,er_nd,er_dfoc,ratio,skipped";

inline void write_sweep_csv(std::ostream &os, const SweepResult &r)
{
    auto opt = [](const std::optional<double> &v) { return v ? format_number(*v) : std::string(); };
    os << sweep_csv_header << "\n";
    for (const PointRecord &p : r.records)
    {
        os << format_number(p.x) << ',' << format_number(p.y) << ',' << format_number(p.d_F) << ','
           << format_number(p.d_B) << ',' << format_number(p.theta_F) << ',' << format_number(p.theta_B) << ','
           << format_number(p.psi_F) << ',' << format_number(p.psi_B) << ',' << opt(p.rate_nd) << ','
           << opt(p.rate_dfoc) << ',' << opt(p.rate_dnum) << ',' << opt(p.er_nd) << ',' << opt(p.er_dfoc) << ','
           << opt(p.ratio) << ',' << (p.skipped ? 1 : 0) << "\n";
    }
}

inline void write_ccdf_csv(std::ostream &os, const Ccdf &c, const std::vector<std::string> &names)
{
    os << "value";
    for (const auto &n : names)
        os << ',' << n;
    os << "\n";
    for (std::size_t i = 0; i < c.abscissae.size(); ++i)
    {
        os << format_number(c.abscissae[i]);
        for (const auto &s : c.series)
            os << ',' << format_number(s[i]);
        os << "\n";
    }
}

} // namespace nfris
