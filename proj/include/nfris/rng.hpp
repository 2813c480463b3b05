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
#include <random>
#include <vector>

#include "types.hpp"

namespace nfris {

// splitmix64 finaliser; used to derive independent child seeds.
inline std::uint64_t mix_seed(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Seeded generator that can spawn child streams keyed by an index, so the
// stream of work item i never depends on how many items ran before it.
class SplitRng
{
public:
    explicit SplitRng(std::uint64_t seed) : seed_(seed), engine_(mix_seed(seed)) {}

    SplitRng split(std::uint64_t index) const { return SplitRng(mix_seed(seed_ ^ mix_seed(index + 1))); }

    std::uint64_t seed() const { return seed_; }
    std::mt19937_64 &engine() { return engine_; }

    double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

// i.i.d. CN(0, 1) entries.
inline CMatrix random_complex_matrix(SplitRng &rng, Eigen::Index rows, Eigen::Index cols)
{
    CMatrix m(rows, cols);
    const double s = std::sqrt(0.5);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            m(i, j) = {s * rng.normal(), s * rng.normal()};
    return m;
}

inline std::vector<double> random_phases(SplitRng &rng, std::size_t n)
{
    std::vector<double> p(n);
    for (double &v : p)
        v = rng.uniform(0.0, two_pi);
    return p;
}

} // namespace nfris
