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

#include <iostream>

#include <CLI11.hpp>

#include <nfris/cli.hpp>

int main(int argc, char **argv)
{
    CLI::App app{"Capacity and RIS design for near-field RIS-aided MIMO links"};
    app.require_subcommand(1);
    nfris::RunRequest req;

    std::string config, out_dir, schemes, grid, tx_center;
    std::map<std::string, std::string> axes;
    double scale = 0.0;

    for (const auto &name : nfris::subcommands())
    {
        CLI::App *sub = app.add_subcommand(name);
        sub->add_option("--config", config, "scenario file (key = value)");
        sub->add_option("--seed", req.seed, "RNG seed");
        if (name == "selftest")
            continue;
        sub->add_option("--scale", scale, "shrink factor for the y-axis element counts");
        sub->add_option("--workers", req.workers, "worker threads (0: all cores)");
        sub->add_option("--out-dir", out_dir, "output directory (default $NFRIS_OUT_DIR or ./nfris_out)");
        sub->add_option("--schemes", schemes, "comma list of nd,foc,num");
        sub->add_option("--max-iters", req.max_iters, "D-RIS-NUM outer iteration cap");
        sub->add_option("--rel-tol", req.rel_tol, "D-RIS-NUM relative stopping tolerance");
        sub->add_option("--guard", req.guard, "skip radius around the RIS and transmitter (m)");
        if (name == "single-point")
            sub->add_flag("--dump-channels", req.dump_channels, "write H_F, H_B and RIS configurations");
        if (name == "paraxial" || name == "angle-sweep")
            sub->add_option("--d-values", axes["d"], "distances: a,b,c or lo:hi:n");
        if (name == "angle-sweep")
            sub->add_option("--theta-values", axes["theta"], "angles (rad)");
        if (name == "dist-sweep")
        {
            sub->add_option("--d-b-values", axes["d_B"], "receiver distances");
            sub->add_option("--d-f-values", axes["d_F"], "transmitter distances");
        }
        if (name == "rot-focus-sweep")
        {
            sub->add_option("--psi-values", axes["psi_B"], "receiver rotations (rad)");
            sub->add_option("--delta-values", axes["delta"], "focus offsets (m)");
        }
        if (name == "rate-map" || name == "er-map")
        {
            sub->add_option("--grid", grid, "x0:x1:nx,y0:y1:ny");
            sub->add_option("--tx-center", tx_center, "transmitter mid-point x,y,z");
        }
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : nfris::exit_config;
    }

    req.subcommand = app.get_subcommands().front()->get_name();
    if (!config.empty())
        req.config_path = config;
    if (!out_dir.empty())
        req.out_dir = out_dir;
    if (!schemes.empty())
        req.schemes = schemes;
    if (!grid.empty())
        req.grid = grid;
    if (!tx_center.empty())
        req.tx_center = tx_center;
    if (scale > 0.0)
        req.scale = scale;
    for (const auto &[k, v] : axes)
        if (!v.empty())
            req.axes[k] = v;

    return nfris::run(req, std::cout, std::cerr);
}
