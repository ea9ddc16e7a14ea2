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

#include "rsris/barrier.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace rsris;

namespace
{

ConcaveFunction affine(double c, std::vector<std::pair<int, double>> terms)
{
    ConcaveFunction f;
    f.constant = c;
    for (auto [v, a] : terms)
        f.add_linear(v, a);
    return f;
}

RealMatrix unit(int n, int i, int j)
{
    RealMatrix m = RealMatrix::Zero(n, n);
    m(i, j) = 1.0;
    m(j, i) = 1.0;
    return m;
}

} // namespace

TEST(Barrier, LinearProgram)
{
    ConvexProgram p;
    p.num_vars = 2;
    p.objective = RealVector(2);
    p.objective << -1.0, -2.0; // maximize x + 2y
    p.constraints.push_back(affine(4.0, {{0, -1.0}, {1, -1.0}})); // x + y <= 4
    p.constraints.push_back(affine(3.0, {{1, -1.0}}));           // y <= 3
    p.constraints.push_back(affine(0.0, {{0, 1.0}}));
    p.constraints.push_back(affine(0.0, {{1, 1.0}}));
    const auto r = solve_convex_program(p, RealVector::Constant(2, 0.5));
    ASSERT_EQ(r.status, SolverStatus::optimal);
    EXPECT_NEAR(r.x(0), 1.0, 1e-6);
    EXPECT_NEAR(r.x(1), 3.0, 1e-6);
    EXPECT_NEAR(r.objective, -7.0, 1e-6);
}

TEST(Barrier, LogDetWaterFilling)
{
    // max ln(1 + x0) + ln(1 + 3 x1)  s.t. x0 + x1 <= 2, x >= 0  via epigraph t
    ConvexProgram p;
    p.num_vars = 3;
    p.objective = RealVector::Zero(3);
    p.objective(2) = -1.0;
    ConcaveFunction f;
    f.add_linear(2, -1.0);
    LogDetTerm ld;
    ld.arg.base = RealMatrix::Identity(2, 2);
    ld.arg.slopes = {{0, unit(2, 0, 0)}, {1, 3.0 * unit(2, 1, 1)}};
    f.logdets.push_back(ld);
    p.constraints.push_back(f);
    p.constraints.push_back(affine(2.0, {{0, -1.0}, {1, -1.0}}));
    p.constraints.push_back(affine(0.0, {{0, 1.0}}));
    p.constraints.push_back(affine(0.0, {{1, 1.0}}));
    RealVector x0(3);
    x0 << 0.5, 0.5, -1.0;
    const auto r = solve_convex_program(p, x0);
    ASSERT_EQ(r.status, SolverStatus::optimal);
    // water level w: 1 + x0 = w, 1/3 + x1 = w  ->  w = 5/3
    EXPECT_NEAR(r.x(0), 2.0 / 3.0, 1e-6);
    EXPECT_NEAR(r.x(1), 4.0 / 3.0, 1e-6);
    EXPECT_NEAR(r.x(2), std::log(5.0 / 3.0) + std::log(5.0), 1e-6);
}

TEST(Barrier, QuadraticConstraint)
{
    ConvexProgram p;
    p.num_vars = 2;
    p.objective = RealVector(2);
    p.objective << 1.0, 1.0;
    ConcaveFunction disk;
    disk.constant = 1.0;
    disk.quadratics.push_back({{0, 1}, RealMatrix::Identity(2, 2)});
    p.constraints.push_back(disk);
    const auto r = solve_convex_program(p, RealVector::Zero(2));
    ASSERT_EQ(r.status, SolverStatus::optimal);
    EXPECT_NEAR(r.x(0), -std::sqrt(0.5), 1e-6);
    EXPECT_NEAR(r.x(1), -std::sqrt(0.5), 1e-6);
}

TEST(Barrier, LmiMaxDet)
{
    // max ln det X  s.t. tr X <= 1, X = [[a, b], [b, c]] > 0
    ConvexProgram p;
    p.num_vars = 4; // a, b, c, t
    p.objective = RealVector::Zero(4);
    p.objective(3) = -1.0;
    AffineSymmetric x;
    x.base = RealMatrix::Zero(2, 2);
    x.slopes = {{0, unit(2, 0, 0)}, {1, unit(2, 0, 1)}, {2, unit(2, 1, 1)}};
    p.lmis.push_back(x);
    ConcaveFunction f;
    f.add_linear(3, -1.0);
    f.logdets.push_back({1.0, x});
    p.constraints.push_back(f);
    p.constraints.push_back(affine(1.0, {{0, -1.0}, {2, -1.0}}));
    RealVector x0(4);
    x0 << 0.3, 0.05, 0.3, -10.0;
    const auto r = solve_convex_program(p, x0);
    ASSERT_EQ(r.status, SolverStatus::optimal);
    EXPECT_NEAR(r.x(0), 0.5, 1e-6);
    EXPECT_NEAR(r.x(1), 0.0, 1e-6);
    EXPECT_NEAR(r.x(3), 2.0 * std::log(0.5), 1e-6);
    EXPECT_LE(r.max_violation, 1e-12);
}

TEST(Barrier, PhaseOneRecoversFeasibility)
{
    ConvexProgram p;
    p.num_vars = 1;
    p.objective = RealVector::Constant(1, -1.0);
    p.constraints.push_back(affine(1.0, {{0, -1.0}})); // x <= 1
    p.constraints.push_back(affine(0.0, {{0, 1.0}}));  // x >= 0
    const auto r = solve_convex_program(p, RealVector::Constant(1, 5.0));
    ASSERT_EQ(r.status, SolverStatus::optimal);
    EXPECT_NEAR(r.x(0), 1.0, 1e-6);
}

TEST(Barrier, DetectsInfeasibility)
{
    ConvexProgram p;
    p.num_vars = 1;
    p.objective = RealVector::Constant(1, 1.0);
    p.constraints.push_back(affine(-1.0, {{0, 1.0}})); // x >= 1
    p.constraints.push_back(affine(0.0, {{0, -1.0}})); // x <= 0
    const auto r = solve_convex_program(p, RealVector::Constant(1, 0.5));
    EXPECT_EQ(r.status, SolverStatus::infeasible);
}

TEST(Barrier, StartMustSatisfyLmis)
{
    ConvexProgram p;
    p.num_vars = 1;
    p.objective = RealVector::Constant(1, 1.0);
    AffineSymmetric m;
    m.base = RealMatrix::Zero(1, 1);
    m.slopes = {{0, RealMatrix::Identity(1, 1)}};
    p.lmis.push_back(m);
    EXPECT_THROW(solve_convex_program(p, RealVector::Constant(1, -1.0)), std::invalid_argument);
    EXPECT_THROW(solve_convex_program(p, RealVector::Zero(2)), std::invalid_argument);
}

TEST(Barrier, MaxViolation)
{
    ConvexProgram p;
    p.num_vars = 1;
    p.objective = RealVector::Constant(1, 1.0);
    p.constraints.push_back(affine(1.0, {{0, -1.0}}));
    EXPECT_DOUBLE_EQ(max_violation(p, RealVector::Constant(1, 3.0)), 2.0);
    EXPECT_DOUBLE_EQ(max_violation(p, RealVector::Constant(1, 0.0)), 0.0);
}

TEST(ConcaveFunction, DerivativesMatchFiniteDifferences)
{
    std::mt19937_64 g(31);
    std::normal_distribution<double> n;
    ConcaveFunction f;
    f.constant = 0.3;
    f.add_linear(1, 0.7);
    LogDetTerm ld;
    ld.coef = 0.8;
    ld.arg.base = RealMatrix::Identity(3, 3) * 2.0;
    for (int v : {0, 2, 3})
    {
        RealMatrix s(3, 3);
        for (int i = 0; i < 9; ++i)
            s(i) = 0.3 * n(g);
        ld.arg.slopes.emplace_back(v, 0.5 * (s + s.transpose()));
    }
    f.logdets.push_back(ld);
    f.quadratics.push_back({{1, 3}, RealMatrix::Identity(2, 2) * 0.4});
    f.finalize();
    RealVector x(4);
    x << 0.1, -0.2, 0.3, 0.05;
    double v = 0.0;
    RealVector grad;
    RealMatrix hess;
    ASSERT_TRUE(f.derivatives(x, v, grad, hess));
    EXPECT_NEAR(v, f.value(x), 1e-14);
    const auto &supp = f.support();
    const double h = 1e-5;
    for (std::size_t a = 0; a < supp.size(); ++a)
    {
        RealVector e = RealVector::Zero(4);
        e(supp[a]) = h;
        EXPECT_NEAR(grad(a), (f.value(x + e) - f.value(x - e)) / (2 * h), 1e-8);
        for (std::size_t b = 0; b < supp.size(); ++b)
        {
            RealVector e2 = RealVector::Zero(4);
            e2(supp[b]) = h;
            const double fd = (f.value(x + e + e2) - f.value(x + e - e2) - f.value(x - e + e2) + f.value(x - e - e2)) /
                              (4 * h * h);
            EXPECT_NEAR(hess(a, b), fd, 1e-5);
        }
    }
}

TEST(ConcaveFunction, OutsideDomainIsMinusInfinity)
{
    ConcaveFunction f;
    LogDetTerm ld;
    ld.arg.base = RealMatrix::Identity(1, 1);
    ld.arg.slopes = {{0, RealMatrix::Identity(1, 1)}};
    f.logdets.push_back(ld);
    EXPECT_EQ(f.value(RealVector::Constant(1, -2.0)), -std::numeric_limits<double>::infinity());
}
