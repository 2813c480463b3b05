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
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "errors.hpp"
#include "types.hpp"

namespace nfris {

struct SvdTriple
{
    CMatrix U;  // rows x rows (full) or rows x r (thin)
    RVector S;  // min(rows, cols) values, non-increasing
    CMatrix V;  // cols x cols (full) or cols x r (thin)
};

namespace detail {

inline std::string dims_of(const CMatrix &a)
{
    return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

inline void require_finite(const CMatrix &a, const char *what)
{
    if (!a.allFinite())
        throw Error(ErrorKind::numerical_failure, std::string(what) + ": non-finite entries in " + dims_of(a) + " matrix");
}

} // namespace detail

// Full SVD by default; the unitary factors are square so that the complete
// K-dimensional bases are available for building K x K reflection matrices.
inline SvdTriple svd(const CMatrix &a, bool full = true)
{
    detail::require_finite(a, "svd");
    const unsigned opts = full ? (Eigen::ComputeFullU | Eigen::ComputeFullV) : (Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::JacobiSVD<CMatrix> solver(a, opts);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::numerical_failure, "svd did not converge on " + detail::dims_of(a) + " matrix");
    SvdTriple t{solver.matrixU(), solver.singularValues(), solver.matrixV()};
    if (!t.S.allFinite() || !t.U.allFinite() || !t.V.allFinite())
        throw Error(ErrorKind::numerical_failure, "svd produced non-finite factors for " + detail::dims_of(a) + " matrix");
    return t;
}

inline RVector singular_values(const CMatrix &a)
{
    detail::require_finite(a, "singular_values");
    Eigen::JacobiSVD<CMatrix> solver(a);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::numerical_failure, "svd did not converge on " + detail::dims_of(a) + " matrix");
    return solver.singularValues();
}

// Values below max(S) * 1e-12 * max(rows, cols) count as zero.
inline double rank_threshold(const RVector &s, Eigen::Index rows, Eigen::Index cols)
{
    if (s.size() == 0)
        return 0.0;
    return s.maxCoeff() * 1e-12 * static_cast<double>(std::max(rows, cols));
}

struct ModeSpectrum
{
    std::vector<double> gains;  // positive, non-increasing
    std::vector<double> powers; // mW, same length as gains
    double mu = 0.0;            // water level, mW
    double capacity_bits = 0.0; // bit/s/Hz

    std::size_t active_modes() const
    {
        return static_cast<std::size_t>(std::count_if(powers.begin(), powers.end(), [](double p) { return p > 0.0; }));
    }
};

// Sum-power water-filling over parallel channels with gains g_i:
// P_i = (mu - noise/g_i)^+, sum P_i = total_power. The water level comes from
// the largest active prefix of the sorted gains.
inline ModeSpectrum water_filling(std::span<const double> gains, double total_power, double noise_power)
{
    if (gains.empty())
        throw Error(ErrorKind::invalid_input, "water_filling: empty gain list");
    if (!(total_power > 0.0) || !(noise_power > 0.0))
        throw Error(ErrorKind::invalid_input, "water_filling: powers must be positive");
    for (std::size_t i = 0; i < gains.size(); ++i)
    {
        if (!(gains[i] > 0.0) || !std::isfinite(gains[i]))
            throw Error(ErrorKind::invalid_input, "water_filling: gain " + std::to_string(i) + " is not positive");
        if (i > 0 && gains[i] > gains[i - 1])
            throw Error(ErrorKind::invalid_input, "water_filling: gains must be sorted descending");
    }

    const std::size_t n = gains.size();
    std::vector<double> inv(n);
    for (std::size_t i = 0; i < n; ++i)
        inv[i] = noise_power / gains[i];

    // Prefix sums are monotone in k, so scan upward and keep the last feasible k.
    std::size_t active = 1;
    double mu = total_power + inv[0];
    double prefix = inv[0];
    for (std::size_t k = 2; k <= n; ++k)
    {
        prefix += inv[k - 1];
        const double level = (total_power + prefix) / static_cast<double>(k);
        if (level - inv[k - 1] > 0.0)
        {
            active = k;
            mu = level;
        }
        else
            break;
    }

    ModeSpectrum ms;
    ms.gains.assign(gains.begin(), gains.end());
    ms.powers.assign(n, 0.0);
    ms.mu = mu;
    for (std::size_t i = 0; i < active; ++i)
    {
        ms.powers[i] = mu - inv[i];
        ms.capacity_bits += std::log1p(gains[i] * ms.powers[i] / noise_power);
    }
    ms.capacity_bits /= std::numbers::ln2;
    return ms;
}

// Positive squared singular values of `a` above the rank threshold, sorted.
inline std::vector<double> squared_gains(const RVector &s, Eigen::Index rows, Eigen::Index cols)
{
    const double tol = rank_threshold(s, rows, cols);
    std::vector<double> g;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tol)
            g.push_back(s(i) * s(i));
    return g;
}

// Mode gains sigma_Fi^2 sigma_Bi^2 of the optimally rotated cascade.
inline std::vector<double> cascade_gains(const RVector &s_F, Eigen::Index k_F, Eigen::Index n_F,
                                         const RVector &s_B, Eigen::Index m_B, Eigen::Index k_B)
{
    const double tol_F = rank_threshold(s_F, k_F, n_F);
    const double tol_B = rank_threshold(s_B, m_B, k_B);
    const Eigen::Index modes = std::min(s_F.size(), s_B.size());
    std::vector<double> g;
    for (Eigen::Index i = 0; i < modes; ++i)
        if (s_F(i) > tol_F && s_B(i) > tol_B)
            g.push_back(s_F(i) * s_F(i) * s_B(i) * s_B(i));
    return g;
}

inline void check_cascade_dims(const CMatrix &H_F, const CMatrix &H_B)
{
    if (H_F.rows() != H_B.cols() || H_F.size() == 0 || H_B.size() == 0)
        throw Error(ErrorKind::invalid_dimension,
                    "cascade dims mismatch: H_F " + detail::dims_of(H_F) + ", H_B " + detail::dims_of(H_B));
}

struct Prop1Result
{
    ModeSpectrum spectrum;
    CMatrix Q;   // N x N transmit covariance
    CMatrix Phi; // K x K unitary reflection matrix
};

inline ModeSpectrum spectrum_from_gains(const std::vector<double> &gains, double total_power, double noise_power)
{
    if (gains.empty())
    {
        ModeSpectrum ms;
        ms.mu = 0.0;
        return ms;
    }
    return water_filling(gains, total_power, noise_power);
}

// Capacity with the optimal unitary RIS: water-filling over sigma_Fi^2 sigma_Bi^2,
// Phi = V_B U_F^H and Q = V_F diag(P) V_F^H.
inline Prop1Result capacity_prop1(const CMatrix &H_F, const CMatrix &H_B, double total_power, double noise_power)
{
    check_cascade_dims(H_F, H_B);
    const SvdTriple f = svd(H_F);
    const SvdTriple b = svd(H_B);

    Prop1Result r;
    r.spectrum = spectrum_from_gains(cascade_gains(f.S, H_F.rows(), H_F.cols(), b.S, H_B.rows(), H_B.cols()),
                                     total_power, noise_power);
    r.Phi = b.V * f.U.adjoint();

    const Eigen::Index n = H_F.cols();
    RVector p = RVector::Zero(n);
    for (std::size_t i = 0; i < r.spectrum.powers.size(); ++i)
        p(static_cast<Eigen::Index>(i)) = r.spectrum.powers[i];
    r.Q = f.V * p.cast<cplx>().asDiagonal() * f.V.adjoint();
    return r;
}

// Closed-form capacity only, from singular values (no unitary factors).
inline ModeSpectrum capacity_prop1_spectrum(const CMatrix &H_F, const CMatrix &H_B, double total_power,
                                            double noise_power)
{
    check_cascade_dims(H_F, H_B);
    return spectrum_from_gains(cascade_gains(singular_values(H_F), H_F.rows(), H_F.cols(), singular_values(H_B),
                                             H_B.rows(), H_B.cols()),
                               total_power, noise_power);
}

struct CovarianceResult
{
    ModeSpectrum spectrum;
    CMatrix Q;
};

// Water-filling-optimal input for a fixed channel H (M x N).
inline CovarianceResult optimal_covariance(const CMatrix &H, double total_power, double noise_power)
{
    const SvdTriple t = svd(H);
    CovarianceResult r;
    r.spectrum = spectrum_from_gains(squared_gains(t.S, H.rows(), H.cols()), total_power, noise_power);
    RVector p = RVector::Zero(H.cols());
    for (std::size_t i = 0; i < r.spectrum.powers.size(); ++i)
        p(static_cast<Eigen::Index>(i)) = r.spectrum.powers[i];
    r.Q = t.V * p.cast<cplx>().asDiagonal() * t.V.adjoint();
    return r;
}

inline ModeSpectrum water_filled_spectrum(const CMatrix &H, double total_power, double noise_power)
{
    return spectrum_from_gains(squared_gains(singular_values(H), H.rows(), H.cols()), total_power, noise_power);
}

// log2 det(I + H Q H^H / noise). Q is factored as E sqrt(L) and the
// singular values of H E sqrt(L) are used, which avoids forming H Q H^H.
inline double mutual_information(const CMatrix &H, const CMatrix &Q, double noise_power)
{
    if (Q.rows() != Q.cols() || Q.rows() != H.cols())
        throw Error(ErrorKind::invalid_dimension, "mutual_information: Q is " + detail::dims_of(Q) + ", H is " +
                                                      detail::dims_of(H));
    if (!(noise_power > 0.0))
        throw Error(ErrorKind::invalid_input, "mutual_information: noise power must be positive");
    detail::require_finite(Q, "mutual_information");
    detail::require_finite(H, "mutual_information");

    const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
    if ((Q - Q.adjoint()).cwiseAbs().maxCoeff() > 1e-8 * scale)
        throw Error(ErrorKind::invalid_input, "mutual_information: Q is not Hermitian");
    if (Q.cwiseAbs().maxCoeff() == 0.0)
        return 0.0;

    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (Q + Q.adjoint()));
    if (es.info() != Eigen::Success)
        throw Error(ErrorKind::numerical_failure, "mutual_information: eigen-decomposition of Q failed");
    const RVector lam = es.eigenvalues();
    if (lam.minCoeff() < -1e-8 * scale)
        throw Error(ErrorKind::invalid_input, "mutual_information: Q is not positive semi-definite");

    const RVector root = lam.cwiseMax(0.0).cwiseSqrt();
    const CMatrix G = H * es.eigenvectors() * root.cast<cplx>().asDiagonal();
    const RVector s = singular_values(G);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        acc += std::log1p(s(i) * s(i) / noise_power);
    return acc / std::numbers::ln2;
}

// exp of the Shannon entropy of the normalised singular-value distribution.
inline double effective_rank(std::span<const double> s)
{
    double total = 0.0;
    for (double v : s)
    {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw Error(ErrorKind::invalid_input, "effective_rank: singular values must be non-negative");
        total += v;
    }
    if (total <= 0.0)
        throw Error(ErrorKind::invalid_input, "effective_rank: all singular values are zero");
    // flat spectrum: exp(log n) is not exact in floating point
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    std::size_t nonzero = 0;
    for (double v : s)
        if (v > 0.0)
        {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            ++nonzero;
        }
    if (lo == hi)
        return static_cast<double>(nonzero);
    double entropy = 0.0;
    for (double v : s)
        if (v > 0.0)
        {
            const double p = v / total;
            entropy -= p * std::log(p);
        }
    return std::exp(entropy);
}

inline double effective_rank(const RVector &s)
{
    return effective_rank(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())));
}

} // namespace nfris
