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

#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace rsris;
using namespace rsris::testing;

namespace
{

// Single cell, K SISO users with complex gains h[k].
EquivalentChannels siso_broadcast(const std::vector<Complex> &h)
{
    EquivalentChannels ch;
    ch.h.resize(1);
    ch.noise.resize(1);
    for (Complex g : h)
    {
        ComplexMatrix m(1, 1);
        m(0, 0) = g;
        ch.h[0].push_back({to_real_composite(m)});
        ch.noise[0].push_back(0.5 * RealMatrix::Identity(2, 2));
    }
    return ch;
}

RealMatrix proper_power(double p) { return 0.5 * p * RealMatrix::Identity(2, 2); }

// Complex-domain rate of a proper MIMO link: log2 det(I + D^-1 H Q H^H).
double complex_rate(const ComplexMatrix &h, const ComplexMatrix &q, const ComplexMatrix &d)
{
    const ComplexMatrix m = ComplexMatrix::Identity(d.rows(), d.rows()) + d.inverse() * h * q * h.adjoint();
    return std::log2(std::abs(m.determinant()));
}

} // namespace

TEST(Rates, SisoCapacity)
{
    const Complex h(0.8, -1.1);
    const EquivalentChannels ch = siso_channels(h);
    CovarianceSet cov = CovarianceSet::zeros(ch, Signaling::improper);
    cov.priv[0][0] = proper_power(3.0);
    EXPECT_NEAR(private_rate(0, 0, cov, ch), std::log2(1.0 + 3.0 * std::norm(h)), 1e-12);
}

TEST(Rates, TwoUserBroadcastSinr)
{
    const std::vector<Complex> h{{1.0, 0.5}, {-0.3, 0.7}};
    const EquivalentChannels ch = siso_broadcast(h);
    CovarianceSet cov = CovarianceSet::zeros(ch, Signaling::proper);
    const double p1 = 2.0, p2 = 1.5, pc = 0.7;
    cov.priv[0][0] = proper_power(p1);
    cov.priv[0][1] = proper_power(p2);
    cov.common[0] = proper_power(pc);
    const RateBundle b = evaluate_rates(cov, ch);
    const double g1 = std::norm(h[0]), g2 = std::norm(h[1]);
    EXPECT_NEAR(b.priv[0][0], std::log2(1.0 + p1 * g1 / (1.0 + p2 * g1)), 1e-12);
    EXPECT_NEAR(b.priv[0][1], std::log2(1.0 + p2 * g2 / (1.0 + p1 * g2)), 1e-12);
    const double c1 = std::log2(1.0 + pc * g1 / (1.0 + (p1 + p2) * g1));
    const double c2 = std::log2(1.0 + pc * g2 / (1.0 + (p1 + p2) * g2));
    EXPECT_NEAR(b.common_per_user[0][0], c1, 1e-12);
    EXPECT_NEAR(b.common_per_user[0][1], c2, 1e-12);
    EXPECT_NEAR(b.common_cap[0], std::min(c1, c2), 1e-12);
}

TEST(Rates, ProperMimoMatchesComplexDomain)
{
    std::mt19937_64 g(21);
    // two cells, one user each, 2x2 links, proper signalling everywhere
    const ComplexMatrix h00 = random_complex(2, 2, g), h01 = random_complex(2, 2, g);
    const ComplexMatrix h10 = random_complex(2, 2, g), h11 = random_complex(2, 2, g);
    const ComplexMatrix a = random_complex(2, 2, g), b = random_complex(2, 2, g);
    const ComplexMatrix q0 = a * a.adjoint(), q1 = b * b.adjoint();
    EquivalentChannels ch;
    ch.h = {{{to_real_composite(h00), to_real_composite(h01)}}, {{to_real_composite(h10), to_real_composite(h11)}}};
    ch.noise = {{0.5 * RealMatrix::Identity(4, 4)}, {0.5 * RealMatrix::Identity(4, 4)}};
    CovarianceSet cov = CovarianceSet::zeros(ch, Signaling::proper);
    cov.priv[0][0] = 0.5 * to_real_composite(q0);
    cov.priv[1][0] = 0.5 * to_real_composite(q1);
    const ComplexMatrix d0 = ComplexMatrix::Identity(2, 2) + h01 * q1 * h01.adjoint();
    EXPECT_NEAR(private_rate(0, 0, cov, ch), complex_rate(h00, q0, d0), 1e-10);
    EXPECT_NEAR(cov.power(0), q0.trace().real(), 1e-12);
}

TEST(Rates, ImproperCanBeatProperOnTheSameBudget)
{
    // Two SISO users whose channels differ by a quarter turn: rank-one layers
    // on the real and imaginary axes stay orthogonal at both receivers.
    const EquivalentChannels ch = siso_broadcast({{1.0, 0.0}, {0.0, 1.0}});
    CovarianceSet igs = CovarianceSet::zeros(ch, Signaling::improper);
    igs.priv[0][0] = RealMatrix::Zero(2, 2);
    igs.priv[0][0](0, 0) = 2.0; // real axis
    igs.priv[0][1] = RealMatrix::Zero(2, 2);
    igs.priv[0][1](1, 1) = 2.0; // imaginary axis
    CovarianceSet pgs = CovarianceSet::zeros(ch, Signaling::proper);
    pgs.priv[0][0] = proper_power(2.0);
    pgs.priv[0][1] = proper_power(2.0);
    const RateBundle bi = evaluate_rates(igs, ch), bp = evaluate_rates(pgs, ch);
    EXPECT_NEAR(bi.priv[0][0], 0.5 * std::log2(1.0 + 4.0), 1e-12);
    EXPECT_GT(bi.priv[0][0], bp.priv[0][0]);
}

TEST(Rates, InterferenceMatrixCounts)
{
    const EquivalentChannels ch = siso_broadcast({{1.0, 0.0}, {2.0, 0.0}});
    CovarianceSet cov = CovarianceSet::zeros(ch, Signaling::proper);
    cov.priv[0][1] = proper_power(1.0);
    cov.common[0] = proper_power(5.0); // common stream is removed before private decoding
    const RealMatrix d = interference_matrix(0, 0, cov, ch);
    EXPECT_LT((d - RealMatrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(Rates, RejectsNonPsdCovariance)
{
    const EquivalentChannels ch = siso_channels({1.0, 0.0});
    CovarianceSet cov = CovarianceSet::zeros(ch, Signaling::improper);
    cov.priv[0][0](0, 0) = -1.0;
    EXPECT_THROW(private_rate(0, 0, cov, ch), std::invalid_argument);
}

TEST(Rates, ZeroPowerGivesZeroRates)
{
    const EquivalentChannels ch = siso_broadcast({{1.0, 0.0}, {0.5, 0.5}});
    const RateBundle b = evaluate_rates(CovarianceSet::zeros(ch, Signaling::improper), ch);
    EXPECT_EQ(b.priv[0][0], 0.0);
    EXPECT_EQ(b.common_cap[0], 0.0);
}

TEST(Covariances, EqualSplitUsesBudget)
{
    const EquivalentChannels ch = siso_broadcast({{1.0, 0.0}, {0.5, 0.5}, {0.1, 0.2}});
    const CovarianceSet rs = CovarianceSet::equal_split(ch, {8.0}, Signaling::proper, true);
    EXPECT_NEAR(rs.power(0), 8.0, 1e-12);
    EXPECT_NEAR(rs.priv[0][0].trace(), 2.0, 1e-12);
    const CovarianceSet tin = CovarianceSet::equal_split(ch, {9.0}, Signaling::proper, false);
    EXPECT_NEAR(tin.priv[0][2].trace(), 3.0, 1e-12);
    EXPECT_EQ(tin.common[0].norm(), 0.0);
    EXPECT_NO_THROW(rs.validate({8.0}));
    EXPECT_THROW(rs.validate({7.0}), std::invalid_argument);
}

TEST(Covariances, ProperStructureIsChecked)
{
    const EquivalentChannels ch = siso_channels({1.0, 0.0});
    CovarianceSet cov = CovarianceSet::zeros(ch, Signaling::proper);
    cov.priv[0][0] = RealMatrix::Zero(2, 2);
    cov.priv[0][0](0, 0) = 1.0;
    EXPECT_THROW(cov.validate({10.0}), std::invalid_argument);
    cov.signaling = Signaling::improper;
    EXPECT_NO_THROW(cov.validate({10.0}));
}

TEST(Allocation, MaxMinMatchesBisection)
{
    std::mt19937_64 g(22);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int trial = 0; trial < 200; ++trial)
    {
        RateBundle b;
        b.priv = {{u(g), u(g), u(g)}};
        b.common_cap = {u(g)};
        b.common_per_user = {{b.common_cap[0], b.common_cap[0], b.common_cap[0]}};
        const std::vector<std::vector<double>> lambda{{u(g) + 0.1, u(g) + 0.1, trial % 3 == 0 ? 0.0 : u(g) + 0.1}};
        const auto a = allocate_common_maxmin(b, lambda);
        // oracle: largest t with sum_k max(0, lambda_k t - r_k) <= cap
        double lo = 0.0, hi = 100.0;
        for (int it = 0; it < 200; ++it)
        {
            const double t = 0.5 * (lo + hi);
            double need = 0.0;
            for (int k = 0; k < 3; ++k)
                need += std::max(0.0, lambda[0][k] * t - b.priv[0][k]);
            (need <= b.common_cap[0] ? lo : hi) = t;
        }
        EXPECT_NEAR(a.value, lo, 1e-9);
        EXPECT_NO_THROW(check_allocation(b, a.rc));
    }
}

TEST(Allocation, ThresholdsFeasibility)
{
    RateBundle b;
    b.priv = {{0.5, 1.0}};
    b.common_cap = {0.6};
    b.common_per_user = {{0.6, 0.6}};
    const auto ok = allocate_common_thresholds(b, {{1.0, 1.0}});
    ASSERT_TRUE(ok.feasible);
    EXPECT_GE(ok.rc[0][0] + 0.5, 1.0 - 1e-12);
    EXPECT_NEAR(ok.rc[0][0] + ok.rc[0][1], 0.6, 1e-12);
    EXPECT_FALSE(allocate_common_thresholds(b, {{1.2, 1.2}}).feasible);
}

TEST(Allocation, RejectsOverCap)
{
    RateBundle b;
    b.priv = {{0.5, 1.0}};
    b.common_cap = {0.6};
    b.common_per_user = {{0.6, 0.6}};
    EXPECT_THROW(check_allocation(b, {{0.5, 0.5}}), std::invalid_argument);
    EXPECT_THROW(check_allocation(b, {{-0.1, 0.1}}), std::invalid_argument);
    EXPECT_NEAR(user_rate(0, 1, b, {{0.2, 0.3}}), 1.3, 1e-15);
}

TEST(EnergyEfficiency, GeeFormula)
{
    const EquivalentChannels ch = siso_broadcast({{1.0, 0.0}, {0.5, 0.5}});
    const CovarianceSet cov = CovarianceSet::equal_split(ch, {3.0}, Signaling::improper);
    const RateBundle b = evaluate_rates(cov, ch);
    PowerModel pm;
    auto rc = zero_allocation(b);
    rc[0][0] = b.common_cap[0];
    const double sum = b.priv[0][0] + b.priv[0][1] + b.common_cap[0];
    EXPECT_NEAR(gee(cov, b, rc, pm), sum / (2.0 * pm.static_power + pm.inv_efficiency * 3.0), 1e-12);
    const double ee0 = ee_user(0, 0, cov, b, rc, pm);
    EXPECT_NEAR(ee0, (b.priv[0][0] + b.common_cap[0]) / (pm.static_power + pm.inv_efficiency * (1.0 + 0.5)), 1e-12);
}

TEST(EnergyEfficiency, PowerModelValidation)
{
    PowerModel pm;
    pm.static_power = 0.0;
    EXPECT_THROW(pm.validate(), std::invalid_argument);
    pm.static_power = 1.0;
    pm.inv_efficiency = 0.5;
    EXPECT_THROW(pm.validate(), std::invalid_argument);
}
