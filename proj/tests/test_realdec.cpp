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
using rsris::testing::random_complex;

TEST(RealComposite, ScalarLayout)
{
    ComplexMatrix m(1, 1);
    m(0, 0) = Complex(2.0, 3.0);
    const RealMatrix r = to_real_composite(m);
    RealMatrix expected(2, 2);
    expected << 2.0, -3.0, 3.0, 2.0;
    EXPECT_EQ(r, expected);
}

TEST(RealComposite, ProductHomomorphism)
{
    std::mt19937_64 g(3);
    for (int trial = 0; trial < 20; ++trial)
    {
        const ComplexMatrix a = random_complex(3, 2, g);
        const ComplexMatrix b = random_complex(2, 4, g);
        const RealMatrix lhs = to_real_composite(ComplexMatrix(a * b));
        const RealMatrix rhs = to_real_composite(a) * to_real_composite(b);
        EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_TRUE(is_proper_structured(lhs));
    }
}

TEST(RealComposite, ActsOnStackedVectors)
{
    std::mt19937_64 g(4);
    const ComplexMatrix a = random_complex(3, 3, g);
    const ComplexVector x = random_complex(3, 1, g);
    const RealVector lhs = to_real_composite(a) * to_real_vector(x);
    const RealVector rhs = to_real_vector(ComplexVector(a * x));
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(WidelyLinear, MatchesComplexMap)
{
    std::mt19937_64 g(5);
    const ComplexMatrix a = random_complex(2, 3, g);
    const ComplexMatrix b = random_complex(2, 3, g);
    const ComplexVector x = random_complex(3, 1, g);
    const ComplexVector y = a * x + b * x.conjugate();
    const RealVector lhs = widely_linear_real(a, b) * to_real_vector(x);
    EXPECT_LT((lhs - to_real_vector(y)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_THROW(widely_linear_real(a, ComplexMatrix(b.leftCols(2))), std::invalid_argument);
}

TEST(Iqi, IdealCoefficients)
{
    const auto c = widely_linear_coeffs(IqiParams::ideal(3));
    for (int i = 0; i < 3; ++i)
    {
        EXPECT_EQ(c.mu(i), Complex(1.0, 0.0));
        EXPECT_EQ(c.nu(i), Complex(0.0, 0.0));
    }
    EXPECT_EQ(iqi_real_map(IqiParams::ideal(2)), RealMatrix::Identity(4, 4));
}

TEST(Iqi, CoefficientFormula)
{
    const double eps = 1.2, phi = 0.3;
    const auto c = widely_linear_coeffs(IqiParams::uniform(1, eps, phi));
    const Complex j(0.0, 1.0);
    EXPECT_NEAR(std::abs(c.mu(0) - 0.5 * (1.0 + eps * std::exp(j * phi))), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.nu(0) - 0.5 * (1.0 - eps * std::exp(-j * phi))), 0.0, 1e-15);
}

TEST(Iqi, IdealReducesToProperDecomposition)
{
    std::mt19937_64 g(6);
    const ComplexMatrix h = random_complex(2, 3, g);
    const RealMatrix eq = iqi_equivalent_channel(h, IqiParams::ideal(3), IqiParams::ideal(2, DeviceSide::receiver));
    EXPECT_EQ(eq, to_real_composite(h));
    EXPECT_TRUE(is_proper_structured(eq, 0.0));
}

TEST(Iqi, ImpairedChannelIsNotProper)
{
    std::mt19937_64 g(7);
    const ComplexMatrix h = random_complex(2, 2, g);
    const RealMatrix eq = iqi_equivalent_channel(h, IqiParams::uniform(2, 1.1, 0.1), IqiParams::ideal(2));
    EXPECT_FALSE(is_proper_structured(eq, 1e-6));
}

TEST(Iqi, RejectsInvalidParameters)
{
    EXPECT_THROW(IqiParams::uniform(2, 0.0, 0.0), std::invalid_argument);
    EXPECT_THROW(IqiParams::uniform(2, 1.0, 2.0), std::invalid_argument);
    std::mt19937_64 g(8);
    EXPECT_THROW(iqi_equivalent_channel(random_complex(2, 2, g), IqiParams::ideal(3), IqiParams::ideal(2)),
                 std::invalid_argument);
}

TEST(Noise, IdealCovarianceIsHalfSigma)
{
    const RealMatrix c = noise_covariance(NoiseModel{2.0, IqiParams::ideal(2, DeviceSide::receiver)}, 2);
    EXPECT_LT((c - RealMatrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_THROW(noise_covariance(NoiseModel{0.0, IqiParams::ideal(2)}, 2), std::invalid_argument);
}

TEST(Noise, ImpairedCovarianceFollowsMap)
{
    const IqiParams p = IqiParams::uniform(2, 0.9, -0.2, DeviceSide::receiver);
    const RealMatrix gamma = iqi_real_map(p);
    const RealMatrix c = noise_covariance(NoiseModel{1.0, p}, 2);
    EXPECT_LT((c - 0.5 * gamma * gamma.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_TRUE(c.isApprox(c.transpose(), 0.0));
}

TEST(PsdSqrt, SquaresBack)
{
    std::mt19937_64 g(9);
    const RealMatrix p = rsris::testing::random_psd(4, g, 1.0);
    const RealMatrix r = psd_sqrt(p);
    EXPECT_LT((r * r - p).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_TRUE(r.isApprox(r.transpose()));
}

TEST(Finite, RejectsNan)
{
    RealMatrix m = RealMatrix::Zero(2, 2);
    m(1, 1) = std::nan("");
    EXPECT_THROW(require_finite(m, "m"), std::invalid_argument);
}
