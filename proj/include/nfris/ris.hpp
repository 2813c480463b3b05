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
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "spectrum.hpp"
#include "types.hpp"

namespace nfris {

enum class RisKind {
    full_unitary,
    diagonal_phases,
};

// Reflection matrix of the surface: either a dense K x K unitary matrix or a
// diagonal of unit-modulus coefficients stored as phases in [0, 2 pi).
class RisConfiguration
{
public:
    static RisConfiguration diagonal(std::vector<double> phases)
    {
        RisConfiguration c;
        c.kind_ = RisKind::diagonal_phases;
        for (double &p : phases)
        {
            if (!std::isfinite(p))
                throw Error(ErrorKind::invalid_input, "ris phases must be finite");
            p = wrap_phase(p);
        }
        c.phases_ = std::move(phases);
        return c;
    }

    static RisConfiguration full(CMatrix matrix)
    {
        if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
            throw Error(ErrorKind::invalid_dimension, "ris matrix must be square and non-empty");
        RisConfiguration c;
        c.kind_ = RisKind::full_unitary;
        c.matrix_ = std::move(matrix);
        return c;
    }

    static RisConfiguration identity(std::size_t k) { return diagonal(std::vector<double>(k, 0.0)); }

    RisKind kind() const { return kind_; }
    bool is_diagonal() const { return kind_ == RisKind::diagonal_phases; }
    std::size_t size() const
    {
        return is_diagonal() ? phases_.size() : static_cast<std::size_t>(matrix_.rows());
    }
    const std::vector<double> &phases() const { return phases_; }

    CVector coefficients() const
    {
        CVector c(static_cast<Eigen::Index>(phases_.size()));
        for (std::size_t k = 0; k < phases_.size(); ++k)
            c(static_cast<Eigen::Index>(k)) = std::polar(1.0, phases_[k]);
        return c;
    }

    CMatrix matrix() const
    {
        if (is_diagonal())
            return CMatrix(coefficients().asDiagonal());
        return matrix_;
    }

    // Phi * x, without materialising the diagonal.
    CMatrix apply(const CMatrix &x) const
    {
        if (static_cast<Eigen::Index>(size()) != x.rows())
            throw Error(ErrorKind::invalid_dimension, "ris size " + std::to_string(size()) + " does not match " +
                                                          std::to_string(x.rows()) + " rows");
        if (is_diagonal())
            return coefficients().asDiagonal() * x;
        return matrix_ * x;
    }

    // max |Phi Phi^H - I|.
    double unitarity_error() const
    {
        if (is_diagonal())
        {
            double e = 0.0;
            for (double p : phases_)
                e = std::max(e, std::abs(std::norm(std::polar(1.0, p)) - 1.0));
            return e;
        }
        const auto k = matrix_.rows();
        return (matrix_ * matrix_.adjoint() - CMatrix::Identity(k, k)).cwiseAbs().maxCoeff();
    }

private:
    RisKind kind_ = RisKind::diagonal_phases;
    std::vector<double> phases_;
    CMatrix matrix_;
};

// End-to-end channel H_B Phi H_F (M x N).
inline CMatrix cascade(const CMatrix &H_F, const CMatrix &H_B, const RisConfiguration &phi)
{
    check_cascade_dims(H_F, H_B);
    return H_B * phi.apply(H_F);
}

inline RisConfiguration nd_ris_optimal(const CMatrix &H_F, const CMatrix &H_B)
{
    check_cascade_dims(H_F, H_B);
    const SvdTriple f = svd(H_F);
    const SvdTriple b = svd(H_B);
    return RisConfiguration::full(b.V * f.U.adjoint());
}

// Product of two focusing profiles: the surface co-phases the spherical wave
// from `focus_tx` with the one converging on `focus_rx`, so each element
// applies -kappa (d_k(tx) + d_k(rx)) and cancels the e^{+j kappa d} path phase.
inline RisConfiguration d_ris_focusing(const ArrayGeometry &ris, const Point3 &focus_tx, const Point3 &focus_rx,
                                       double kappa)
{
    const RVector d_tx = distances_to(ris, focus_tx);
    const RVector d_rx = distances_to(ris, focus_rx);
    std::vector<double> phases(ris.size());
    for (std::size_t k = 0; k < phases.size(); ++k)
    {
        const auto i = static_cast<Eigen::Index>(k);
        if (!(d_tx(i) > 0.0) || !(d_rx(i) > 0.0))
            throw Error(ErrorKind::degenerate_geometry,
                        "focusing point coincides with ris element " + std::to_string(k));
        phases[k] = -kappa * (d_tx(i) + d_rx(i));
    }
    return RisConfiguration::diagonal(std::move(phases));
}

// Water-filled rate for a given surface configuration.
inline ModeSpectrum rate_of(const CMatrix &H_F, const CMatrix &H_B, const RisConfiguration &phi, double total_power,
                            double noise_power)
{
    return water_filled_spectrum(cascade(H_F, H_B, phi), total_power, noise_power);
}

struct NumericalOptions
{
    int max_iters = 50;
    double rel_tol = 1e-6;
    double phase_tol = 1e-6; // rad, golden-section bracket width
    std::uint64_t seed = 0;
};

struct NumericalResult
{
    RisConfiguration config;
    double rate = 0.0;
    std::vector<double> trace; // trace[0] is the initial rate
    int iterations = 0;
    bool converged = false;
};

namespace detail {

// Q = W W^H with W = V_r diag(sqrt(P_r)) over the active modes of H.
inline CMatrix covariance_factor(const CMatrix &H, double total_power, double noise_power, double &rate)
{
    const SvdTriple t = svd(H, false);
    const ModeSpectrum ms = spectrum_from_gains(squared_gains(t.S, H.rows(), H.cols()), total_power, noise_power);
    rate = ms.capacity_bits;
    const auto r = static_cast<Eigen::Index>(ms.active_modes());
    CMatrix W(H.cols(), r);
    for (Eigen::Index i = 0; i < r; ++i)
        W.col(i) = t.V.col(i) * std::sqrt(ms.powers[static_cast<std::size_t>(i)]);
    return W;
}

inline double hermitian_logdet(const CMatrix &a)
{
    Eigen::LLT<CMatrix> llt(a);
    if (llt.info() != Eigen::Success)
        return -std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        acc += std::log(llt.matrixLLT()(i, i).real());
    return 2.0 * acc;
}

template <typename F>
double golden_section_max(F &&f, double lo, double hi, double tol, double &best_value)
{
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    while (hi - lo > tol)
    {
        if (fc >= fd)
        {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        }
        else
        {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    if (fc >= fd)
    {
        best_value = fc;
        return c;
    }
    best_value = fd;
    return d;
}

} // namespace detail

// Diagonal-RIS optimiser. Alternates a water-filling Q-step with one
// cyclic sweep of per-element phase updates at fixed Q; each phase slice is
// searched by golden-section in three contiguous 2 pi / 3 brackets.
// The rate sequence in the trace is non-decreasing.
inline NumericalResult d_ris_numerical(const CMatrix &H_F, const CMatrix &H_B, double total_power,
                                       double noise_power, const RisConfiguration &init,
                                       const NumericalOptions &opts = {})
{
    check_cascade_dims(H_F, H_B);
    if (!init.is_diagonal() || static_cast<Eigen::Index>(init.size()) != H_F.rows())
        throw Error(ErrorKind::invalid_input, "d_ris_numerical needs a diagonal initial point of size K");

    const Eigen::Index K = H_F.rows();
    std::vector<double> phases = init.phases();

    auto coeffs_of = [](const std::vector<double> &ph) {
        CVector c(static_cast<Eigen::Index>(ph.size()));
        for (std::size_t k = 0; k < ph.size(); ++k)
            c(static_cast<Eigen::Index>(k)) = std::polar(1.0, ph[k]);
        return c;
    };

    NumericalResult res;
    double rate = 0.0;
    CMatrix W = detail::covariance_factor(H_B * (coeffs_of(phases).asDiagonal() * H_F), total_power, noise_power, rate);
    res.trace.push_back(rate);

    for (int it = 0; it < opts.max_iters; ++it)
    {
        const std::vector<double> before = phases;
        const auto r = W.cols();
        const CMatrix FW = H_F * W; // K x r
        CVector c = coeffs_of(phases);
        CMatrix G = H_B * (c.asDiagonal() * FW); // M x r
        const CMatrix I_r = CMatrix::Identity(r, r);

        for (Eigen::Index k = 0; k < K && r > 0; ++k)
        {
            const CVector b = H_B.col(k);
            const Eigen::RowVectorXcd g = FW.row(k);
            const CMatrix rest = G - c(k) * (b * g);
            const CMatrix A = I_r + rest.adjoint() * rest / noise_power + b.squaredNorm() * g.adjoint() * g / noise_power;
            const CMatrix C = (rest.adjoint() * b) * g / noise_power;
            auto slice = [&](double phi) {
                const cplx e = std::polar(1.0, phi);
                const CMatrix X = e * C;
                return detail::hermitian_logdet(A + X + X.adjoint());
            };

            const double current = phases[static_cast<std::size_t>(k)];
            const double f_current = slice(current);
            double best = current;
            double f_best = f_current;
            for (int s = 0; s < 3; ++s)
            {
                const double centre = current + s * two_pi / 3.0;
                double f_val = 0.0;
                const double cand = detail::golden_section_max(slice, centre - std::numbers::pi / 3.0,
                                                               centre + std::numbers::pi / 3.0, opts.phase_tol, f_val);
                if (f_val > f_best)
                {
                    f_best = f_val;
                    best = cand;
                }
            }
            if (best != current)
            {
                phases[static_cast<std::size_t>(k)] = wrap_phase(best);
                c(k) = std::polar(1.0, phases[static_cast<std::size_t>(k)]);
                G = rest + c(k) * (b * g);
            }
        }

        double new_rate = 0.0;
        CMatrix W_new = detail::covariance_factor(H_B * (coeffs_of(phases).asDiagonal() * H_F), total_power,
                                                  noise_power, new_rate);
        ++res.iterations;
        if (new_rate < rate)
        {
            phases = before;
            res.converged = true;
            break;
        }
        res.trace.push_back(new_rate);
        const double gain = new_rate - rate;
        rate = new_rate;
        W = std::move(W_new);
        if (gain <= opts.rel_tol * std::abs(rate))
        {
            res.converged = true;
            break;
        }
    }

    res.config = RisConfiguration::diagonal(std::move(phases));
    res.rate = rate;
    return res;
}

// Distance of U_B^H (H_B Phi H_F) V_F from the diagonal target
// Gamma = Sigma_B Sigma_F, relative to ||Gamma||_F, minimised over a
// unit-modulus diagonal phase on Gamma (every such phase is capacity-achieving).
inline double diagonalization_residual(const CMatrix &H_F, const CMatrix &H_B, const RisConfiguration &phi)
{
    check_cascade_dims(H_F, H_B);
    const SvdTriple f = svd(H_F);
    const SvdTriple b = svd(H_B);
    const CMatrix A = b.U.adjoint() * cascade(H_F, H_B, phi) * f.V;

    const Eigen::Index modes = std::min(f.S.size(), b.S.size());
    double gamma_sq = 0.0;
    double cross = 0.0;
    for (Eigen::Index i = 0; i < modes; ++i)
    {
        const double g = f.S(i) * b.S(i);
        gamma_sq += g * g;
        cross += g * std::abs(A(i, i));
    }
    if (gamma_sq <= 0.0)
        throw Error(ErrorKind::invalid_input, "diagonalization_residual: cascade target is zero");
    const double r2 = A.squaredNorm() - 2.0 * cross + gamma_sq;
    return std::sqrt(std::max(r2, 0.0) / gamma_sq);
}

// Text format:
//   nfris-ris 1
//   kind diagonal_phases|full_unitary
//   size K
//   then K phases (rad), one per line, or K rows of K "re im" pairs.
// Numbers are written with 17 significant digits.
inline void write_ris(std::ostream &os, const RisConfiguration &c)
{
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    os << "nfris-ris 1\n";
    os << "kind " << (c.is_diagonal() ? "diagonal_phases" : "full_unitary") << "\n";
    os << "size " << c.size() << "\n";
    if (c.is_diagonal())
    {
        for (double p : c.phases())
            os << num(p) << "\n";
        return;
    }
    const CMatrix m = c.matrix();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            os << (j ? " " : "") << num(m(i, j).real()) << " " << num(m(i, j).imag());
        os << "\n";
    }
}

inline RisConfiguration read_ris(std::istream &is)
{
    auto fail = [](const std::string &what) { return Error(ErrorKind::invalid_input, "ris text: " + what); };
    std::string tag, kind;
    int version = 0;
    std::size_t k = 0;
    std::string w1, w2;
    if (!(is >> tag >> version) || tag != "nfris-ris" || version != 1)
        throw fail("bad header");
    if (!(is >> w1 >> kind) || w1 != "kind")
        throw fail("missing kind");
    if (!(is >> w2 >> k) || w2 != "size" || k == 0)
        throw fail("missing size");
    if (kind == "diagonal_phases")
    {
        std::vector<double> ph(k);
        for (auto &p : ph)
            if (!(is >> p))
                throw fail("truncated phase list");
        return RisConfiguration::diagonal(std::move(ph));
    }
    if (kind == "full_unitary")
    {
        const auto n = static_cast<Eigen::Index>(k);
        CMatrix m(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
            {
                double re = 0.0, im = 0.0;
                if (!(is >> re >> im))
                    throw fail("truncated matrix");
                m(i, j) = {re, im};
            }
        return RisConfiguration::full(std::move(m));
    }
    throw fail("unknown kind '" + kind + "'");
}

inline std::string to_text(const RisConfiguration &c)
{
    std::ostringstream os;
    write_ris(os, c);
    return os.str();
}

inline RisConfiguration from_text(const std::string &text)
{
    std::istringstream is(text);
    return read_ris(is);
}

} // namespace nfris
