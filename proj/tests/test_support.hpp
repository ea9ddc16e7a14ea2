// SPDX-License-Identifier: Apache-2.0
//
// rsris: rate-splitting transmit design for RIS-assisted multicell MIMO
// Copyright (C) 2026 The rsris authors
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

// Shared fixtures for the unit tests and the acceptance runner.

#ifndef RSRIS_TEST_SUPPORT_HPP
#define RSRIS_TEST_SUPPORT_HPP

#include "rsris/framework.hpp"

#include <cmath>
#include <random>

namespace rsris::testing
{

inline RealMatrix random_psd(int d, std::mt19937_64 &g, double scale)
{
    std::normal_distribution<double> n;
    RealMatrix a(d, d);
    for (int i = 0; i < d * d; ++i)
        a(i) = n(g);
    return scale * a * a.transpose() / d;
}

inline ComplexMatrix random_complex(int r, int c, std::mt19937_64 &g, double sd = 1.0)
{
    std::normal_distribution<double> n(0.0, sd);
    ComplexMatrix m(r, c);
    for (int i = 0; i < r * c; ++i)
        m(i) = Complex(n(g), n(g));
    return m;
}

// Real form of a proper block: composite of a random Hermitian PSD matrix.
inline RealMatrix random_proper_psd(int n_complex, std::mt19937_64 &g, double scale)
{
    const ComplexMatrix a = random_complex(n_complex, n_complex, g);
    const ComplexMatrix h = a * a.adjoint() / n_complex;
    return 0.5 * scale * to_real_composite(h);
}

// Random covariances that respect the signaling structure, each block scaled by `scale`.
inline CovarianceSet random_covariances(const CovarianceSet &shape, std::mt19937_64 &g, double scale)
{
    CovarianceSet out = shape;
    for (int l = 0; l < out.num_cells(); ++l)
    {
        const int d = static_cast<int>(out.common[l].rows());
        auto draw = [&] {
            return out.signaling == Signaling::proper ? random_proper_psd(d / 2, g, scale) : random_psd(d, g, scale);
        };
        for (auto &p : out.priv[l])
            p = draw();
        out.common[l] = draw();
    }
    return out;
}

// Single-cell, single-user channel with one antenna at each end.
inline EquivalentChannels siso_channels(Complex h, double noise_power = 1.0)
{
    ComplexMatrix hm(1, 1);
    hm(0, 0) = h / std::sqrt(noise_power);
    EquivalentChannels ch;
    ch.h = {{{to_real_composite(hm)}}};
    ch.noise = {{RealMatrix::Identity(2, 2) * 0.5}};
    return ch;
}

inline ProblemSpec basic_spec(ObjectiveKind kind, int cells, double budget)
{
    ProblemSpec spec;
    spec.step.objective = kind;
    spec.step.budgets.assign(cells, budget);
    return spec;
}

// The overloaded two-cell layout with one antenna per node.
inline FadingSet overloaded_fading(std::uint64_t seed, int users = 4, int ris_elements = 8)
{
    return sample_scenario(Topology::two_cell(users, 1, 1, ris_elements), FadingParams{}, seed);
}

inline double db_to_watts(double dbw) { return std::pow(10.0, dbw / 10.0); }

} // namespace rsris::testing

#endif
