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

#ifndef RSRIS_FRAMEWORK_HPP
#define RSRIS_FRAMEWORK_HPP

#include "rsris/channel.hpp"
#include "rsris/rates.hpp"
#include "rsris/rispace.hpp"
#include "rsris/subproblems.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rsris
{

struct ConvergenceCriteria
{
    double rel_tol = 1e-4;
    int max_iterations = 50;
    // Over-relaxed steps along the last update, kept only when they improve
    // the exact objective, and up to three RIS steps per outer iteration.
    // false gives the plain MM / AO iteration.
    bool extrapolate = true;

    void validate() const;
};

struct ProblemSpec
{
    StepProblem step;
    bool iqi_aware = true; // false: design for ideal devices, evaluate on the true ones
    ConvergenceCriteria convergence;

    void validate(int cells) const;
};

enum class StepType
{
    init,
    feasibility, // rate-profile steps searching a point that meets the targets
    p_step,
    theta_step
};

const char *to_string(StepType s);

struct TraceEntry
{
    int iteration = 0;
    StepType step = StepType::init;
    double objective = 0.0;  // accepted objective after the step
    double candidate = 0.0;  // exact objective of the step's candidate
    bool accepted = true;
    SolverStatus status = SolverStatus::optimal;
    int newton = 0;
};

struct RunTrace
{
    std::vector<TraceEntry> entries;
    CovarianceSet cov;
    ThetaSet theta;
    RateBundle bundle;
    CommonAllocation rc;
    double objective = 0.0;
    bool converged = false;
    bool feasible = true;
    int iterations = 0;
    std::string message;

    // Headline quantities of the final point.
    double min_rate = 0.0;
    double sum_rate = 0.0;
    double total_power = 0.0;
    double gee_value = 0.0;

    /// Objective column of the P-step and Theta-step entries.
    std::vector<double> accepted_objectives() const;
    std::string to_json() const;
    std::string to_csv() const; // iteration,step,objective,candidate,accepted,status
};

struct ObjectiveValue
{
    double value = 0.0;
    CommonAllocation rc;
    bool feasible = true;
};

/// Exact objective of a covariance set with the best common-rate split.
ObjectiveValue evaluate_objective(const ProblemSpec &spec, const CovarianceSet &cov, const RateBundle &bundle);

/// MM on fixed channels (no RIS step). Starts from the equal split unless `initial` is given.
RunTrace run_mm(const ProblemSpec &spec, const EquivalentChannels &channels,
                const std::optional<CovarianceSet> &initial = std::nullopt);

struct AoOptions
{
    RisSetParams set;
    UserSpaceMap space_map;          // empty: default map
    bool optimize_theta = true;      // false: random-Theta baseline
    std::optional<ThetaSet> initial_theta;
    std::optional<CovarianceSet> initial_cov; // default: equal split
    std::uint64_t theta_seed = 0;    // Theta^0 when no initial value is given
};

/// Alternating optimization of covariances and RIS coefficients.
RunTrace run_ao(const ProblemSpec &spec, const FadingSet &fading, const HardwareModel &hardware,
                const AoOptions &options);

/// One run per set. Each run starts from the best finished run over a set it
/// contains (same channels), so with IQI-aware design a larger set never ends
/// below a smaller one. Runs without a contained predecessor start as run_ao.
/// Traces are returned in the order of `sets`.
std::vector<RunTrace> run_ao_nested(const ProblemSpec &spec, const FadingSet &fading,
                                    const HardwareModel &hardware, const AoOptions &options,
                                    const std::vector<RisSetParams> &sets);

struct RatePoint
{
    UserWeights lambda;
    std::vector<std::vector<double>> rates;
};

/// One MWRM run per rate profile.
std::vector<RatePoint> sweep_rate_region(const ProblemSpec &base, const EquivalentChannels &channels,
                                         const std::vector<UserWeights> &lambdas);

enum class RsMode
{
    tin,
    noma_like,
    broadcast,
    general
};

const char *to_string(RsMode m);

std::vector<RsMode> classify_rs_mode(const RateBundle &bundle, const CommonAllocation &rc, double tol = 1e-6);

} // namespace rsris

#endif
