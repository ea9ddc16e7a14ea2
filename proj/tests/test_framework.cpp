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
#include "json.hpp"

#include <sstream>

using namespace rsris;
using namespace rsris::testing;

namespace
{

EquivalentChannels fixed_channels(std::uint64_t seed, int users = 2)
{
    const FadingSet f = sample_scenario(Topology::two_cell(users, 1, 1, 4), FadingParams{}, seed);
    std::mt19937_64 g(seed);
    const ThetaSet t = random_theta(f, RisSetParams{}, g);
    return build_equivalent_channels(f, t, default_space_map(f), HardwareModel::uniform(f, 0.9, 0.15));
}

void expect_monotone(const RunTrace &t, bool minimize)
{
    // the rate-target search before the init entry follows its own objective
    auto first = std::find_if(t.entries.begin(), t.entries.end(),
                              [](const TraceEntry &e) { return e.step == StepType::init; });
    ASSERT_NE(first, t.entries.end());
    double prev = first->objective;
    for (auto it = first; it != t.entries.end(); ++it)
    {
        const TraceEntry &e = *it;
        if (minimize)
            EXPECT_LE(e.objective, prev + 1e-12 * std::max(1.0, std::abs(prev)));
        else
            EXPECT_GE(e.objective, prev - 1e-12 * std::max(1.0, std::abs(prev)));
        prev = e.objective;
    }
}

} // namespace

TEST(Spec, Validation)
{
    ProblemSpec s = basic_spec(ObjectiveKind::mwrm, 2, 1.0);
    EXPECT_NO_THROW(s.validate(2));
    EXPECT_THROW(s.validate(3), std::invalid_argument);
    s.step.budgets[1] = std::nan("");
    EXPECT_THROW(s.validate(2), std::invalid_argument);
    s = basic_spec(ObjectiveKind::mwrm, 2, 1.0);
    s.convergence.max_iterations = 0;
    EXPECT_THROW(s.validate(2), std::invalid_argument);
    s.convergence = {};
    s.convergence.rel_tol = 0.0;
    EXPECT_THROW(s.validate(2), std::invalid_argument);
}

TEST(RunMm, ZeroBudgetIsTrivial)
{
    const RunTrace t = run_mm(basic_spec(ObjectiveKind::mwrm, 2, 0.0), fixed_channels(1));
    EXPECT_TRUE(t.converged);
    EXPECT_EQ(t.total_power, 0.0);
    EXPECT_EQ(t.min_rate, 0.0);
    EXPECT_LE(t.iterations, 2);
}

TEST(RunMm, StationaryStartStopsQuickly)
{
    // single user at the closed-form optimum: all power on the private stream, white
    const Complex h(0.8, -0.6);
    const EquivalentChannels ch = siso_channels(h);
    const ProblemSpec spec = basic_spec(ObjectiveKind::mwrm, 1, 2.0);
    CovarianceSet start = CovarianceSet::zeros(ch, Signaling::improper);
    start.priv[0][0] = RealMatrix::Identity(2, 2);
    const RunTrace t = run_mm(spec, ch, start);
    EXPECT_TRUE(t.converged);
    EXPECT_LE(t.iterations, 2);
    EXPECT_NEAR(t.min_rate, std::log2(1.0 + 2.0 * std::norm(h)), 1e-6);
    EXPECT_NEAR(t.objective, t.entries.front().objective, 1e-6);
}

TEST(RunMm, ObjectivesAreMonotone)
{
    const EquivalentChannels ch = fixed_channels(3);
    for (ObjectiveKind k : {ObjectiveKind::mwrm, ObjectiveKind::wsrm, ObjectiveKind::gee, ObjectiveKind::mwee})
    {
        const RunTrace t = run_mm(basic_spec(k, 2, 2.0), ch);
        EXPECT_TRUE(t.feasible) << to_string(k);
        expect_monotone(t, false);
        EXPECT_NO_THROW(t.cov.validate({2.0, 2.0}, 1e-7));
        EXPECT_NO_THROW(check_allocation(t.bundle, t.rc, 1e-7));
    }
}

TEST(RunMm, PlainIterationIsMonotoneAndNoBetter)
{
    const EquivalentChannels ch = fixed_channels(3);
    for (ObjectiveKind k : {ObjectiveKind::mwrm, ObjectiveKind::gee})
    {
        ProblemSpec plain = basic_spec(k, 2, 2.0);
        plain.convergence.extrapolate = false;
        plain.convergence.max_iterations = 5;
        ProblemSpec fast = plain;
        fast.convergence.extrapolate = true;
        const RunTrace a = run_mm(plain, ch);
        const RunTrace b = run_mm(fast, ch);
        expect_monotone(a, false);
        expect_monotone(b, false);
        // same first MM step; the extra points only add ascent
        ASSERT_GE(a.entries.size(), 2U);
        ASSERT_GE(b.entries.size(), 2U);
        EXPECT_GE(b.entries[1].objective, a.entries[1].objective - 1e-12) << to_string(k);
    }
}

TEST(RunMm, PowerMinMeetsTargets)
{
    const EquivalentChannels ch = fixed_channels(4);
    ProblemSpec spec = basic_spec(ObjectiveKind::power_min, 2, 100.0);
    spec.step.thresholds = {{0.5, 0.5}, {0.5, 0.5}};
    const RunTrace t = run_mm(spec, ch);
    ASSERT_TRUE(t.feasible) << t.message;
    EXPECT_GE(t.min_rate, 0.5 - 1e-6);
    EXPECT_LT(t.total_power, 200.0);
    expect_monotone(t, true);
}

TEST(RunMm, UnreachableTargetsAreReported)
{
    ProblemSpec spec = basic_spec(ObjectiveKind::power_min, 1, 1.0);
    spec.step.thresholds = {{3.0}};
    spec.convergence.max_iterations = 10;
    // log2(1 + 1) = 1 < 3 whatever the split
    const RunTrace t = run_mm(spec, siso_channels({1.0, 0.0}));
    EXPECT_FALSE(t.feasible);
    EXPECT_FALSE(t.message.empty());
}

TEST(RunMm, RsDominatesTin)
{
    const EquivalentChannels ch = fixed_channels(5);
    ProblemSpec rs = basic_spec(ObjectiveKind::mwrm, 2, 3.0);
    ProblemSpec tin = rs;
    tin.step.scheme = Scheme::tin;
    const RunTrace a = run_mm(tin, ch);
    // RS started from the TIN optimum keeps at least its value
    CovarianceSet start = a.cov;
    const RunTrace b = run_mm(rs, ch, start);
    EXPECT_GE(b.min_rate, a.min_rate - 1e-9);
}

TEST(RunAo, DarkRisMatchesRunMm)
{
    FadingSet f = overloaded_fading(6, 2, 4);
    const FadingSet dark = f.without_ris();
    const HardwareModel hw = HardwareModel::uniform(dark, 0.9, 0.1);
    const ProblemSpec spec = basic_spec(ObjectiveKind::mwrm, 2, 1.0);
    AoOptions opt;
    opt.theta_seed = 3;
    const RunTrace ao = run_ao(spec, dark, hw, opt);
    const EquivalentChannels ch = build_equivalent_channels(dark, ao.theta, default_space_map(dark), hw);
    const RunTrace mm = run_mm(spec, ch);
    EXPECT_NEAR(ao.objective, mm.objective, 1e-6 * std::max(1.0, mm.objective));
}

TEST(RunAo, OptimizedThetaBeatsItsStart)
{
    const FadingSet f = overloaded_fading(7, 2, 6);
    const HardwareModel hw = HardwareModel::uniform(f, 0.9, 0.1);
    const ProblemSpec spec = basic_spec(ObjectiveKind::mwrm, 2, 1.0);
    AoOptions opt;
    opt.theta_seed = 9;
    AoOptions fixed = opt;
    fixed.optimize_theta = false;
    const RunTrace a = run_ao(spec, f, hw, opt);
    const RunTrace r = run_ao(spec, f, hw, fixed);
    EXPECT_GE(a.objective, r.objective - 1e-6);
    EXPECT_TRUE(is_member(a.theta, opt.set));
    expect_monotone(a, false);
    // the random-Theta run never leaves its starting point
    std::mt19937_64 g(9);
    const ThetaSet t0 = random_theta(f, opt.set, g);
    for (std::size_t m = 0; m < t0.reflect.size(); ++m)
        EXPECT_EQ((r.theta.reflect[m] - t0.reflect[m]).norm(), 0.0);
}

TEST(RunAo, NestedSetsFollowContainment)
{
    const FadingSet f = overloaded_fading(11, 2, 4);
    const HardwareModel hw = HardwareModel::uniform(f, 0.9, 0.1);
    const ProblemSpec spec = basic_spec(ObjectiveKind::mwrm, 2, 1.0);
    AoOptions opt;
    opt.theta_seed = 5;
    RisSetParams u, i, d;
    u.kind = SetKind::unit_disk;
    i.kind = SetKind::unit_modulus;
    d.kind = SetKind::discrete_phase;
    // listed largest first; the runner orders them itself
    const auto t = run_ao_nested(spec, f, hw, opt, {u, i, d});
    ASSERT_EQ(t.size(), 3U);
    EXPECT_GE(t[1].objective, t[2].objective - 1e-12);
    EXPECT_GE(t[0].objective, t[1].objective - 1e-12);
    EXPECT_TRUE(is_member(t[0].theta, u));
    EXPECT_TRUE(is_member(t[1].theta, i));
    EXPECT_TRUE(is_member(t[2].theta, d));
    // the I run starts where the D run ended
    EXPECT_NEAR(t[1].entries.front().objective, t[2].objective, 1e-12 * std::max(1.0, t[2].objective));
    expect_monotone(t[0], false);

    // the smallest set has no predecessor and matches a plain run
    AoOptions od = opt;
    od.set = d;
    EXPECT_EQ(run_ao(spec, f, hw, od).objective, t[2].objective);
}

TEST(RunAo, InitialCovarianceIsUsed)
{
    const FadingSet f = overloaded_fading(12, 2, 4);
    const HardwareModel hw = HardwareModel::uniform(f, 0.9, 0.1);
    ProblemSpec spec = basic_spec(ObjectiveKind::mwrm, 2, 1.0);
    AoOptions opt;
    opt.theta_seed = 2;
    const RunTrace a = run_ao(spec, f, hw, opt);
    AoOptions warm = opt;
    warm.initial_theta = a.theta;
    warm.initial_cov = a.cov;
    const RunTrace b = run_ao(spec, f, hw, warm);
    EXPECT_NEAR(b.entries.front().objective, a.objective, 1e-12 * std::max(1.0, a.objective));
    EXPECT_GE(b.objective, a.objective - 1e-12);

    warm.initial_cov->priv[0][0] *= 100.0; // over budget
    EXPECT_THROW(run_ao(spec, f, hw, warm), std::invalid_argument);
}

TEST(RunAo, UnawareDesignIsScoredOnTrueHardware)
{
    const FadingSet f = overloaded_fading(8, 2, 4);
    const HardwareModel hw = HardwareModel::uniform(f, 0.7, 0.4);
    ProblemSpec spec = basic_spec(ObjectiveKind::mwrm, 2, 1.0);
    spec.iqi_aware = false;
    AoOptions opt;
    opt.theta_seed = 1;
    const RunTrace t = run_ao(spec, f, hw, opt);
    const EquivalentChannels truth = build_equivalent_channels(f, t.theta, default_space_map(f), hw);
    const RateBundle b = evaluate_rates(t.cov, truth);
    for (int l = 0; l < 2; ++l)
        for (int k = 0; k < 2; ++k)
            EXPECT_NEAR(b.priv[l][k], t.bundle.priv[l][k], 1e-12);
}

TEST(RateRegion, CornersAndSymmetry)
{
    // two symmetric single-user cells without coupling
    EquivalentChannels ch;
    ComplexMatrix h(1, 1), z(1, 1);
    h(0, 0) = 1.0;
    z(0, 0) = 0.0;
    const RealMatrix hr = to_real_composite(h), zr = to_real_composite(z);
    ch.h = {{{hr, zr}}, {{zr, hr}}};
    ch.noise = {{RealMatrix::Identity(2, 2) * 0.5}, {RealMatrix::Identity(2, 2) * 0.5}};
    ProblemSpec spec = basic_spec(ObjectiveKind::mwrm, 2, 3.0);
    const auto pts = sweep_rate_region(spec, ch, {{{1.0}, {0.0}}, {{0.5}, {0.5}}, {{0.0}, {1.0}}});
    ASSERT_EQ(pts.size(), 3U);
    EXPECT_NEAR(pts[0].rates[0][0], 2.0, 1e-5);
    EXPECT_NEAR(pts[1].rates[0][0], pts[1].rates[1][0], 1e-6);
    EXPECT_NEAR(pts[0].rates[0][0], pts[2].rates[1][0], 1e-6);
}

TEST(Classify, Modes)
{
    RateBundle b;
    b.priv = {{1.0, 1.0}, {0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}};
    CommonAllocation rc = {{0.0, 0.0}, {0.3, 0.2}, {0.0, 0.4}, {0.2, 0.1}};
    const auto modes = classify_rs_mode(b, rc);
    ASSERT_EQ(modes.size(), 4U);
    EXPECT_EQ(modes[0], RsMode::tin);
    EXPECT_EQ(modes[1], RsMode::broadcast);
    EXPECT_EQ(modes[2], RsMode::noma_like);
    EXPECT_EQ(modes[3], RsMode::general);
    EXPECT_STREQ(to_string(RsMode::noma_like), "NOMA-like");
}

TEST(Trace, JsonAndCsv)
{
    const RunTrace t = run_mm(basic_spec(ObjectiveKind::mwrm, 2, 1.0), fixed_channels(10));
    const nlohmann::json j = nlohmann::json::parse(t.to_json());
    EXPECT_EQ(j.at("trace").size(), t.entries.size());
    EXPECT_NEAR(j.at("objective").get<double>(), t.objective, 1e-12 * std::max(1.0, t.objective));
    std::istringstream csv(t.to_csv());
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "iteration,step,objective,candidate,accepted,status");
    int rows = 0;
    while (std::getline(csv, line))
        ++rows;
    EXPECT_EQ(rows, static_cast<int>(t.entries.size()));
    const auto acc = t.accepted_objectives();
    EXPECT_EQ(static_cast<int>(acc.size()), static_cast<int>(t.entries.size()) - 1);
}
