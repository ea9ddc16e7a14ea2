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

#ifndef RSRIS_SUBPROBLEMS_HPP
#define RSRIS_SUBPROBLEMS_HPP

#include "rsris/barrier.hpp"
#include "rsris/rates.hpp"
#include "rsris/rispace.hpp"
#include "rsris/surrogates.hpp"

#include <vector>

namespace rsris
{

enum class ObjectiveKind
{
    mwrm,     // max-min weighted rate (rate profile)
    wsrm,     // weighted sum rate
    gee,      // global energy efficiency
    mwee,     // max-min energy efficiency
    power_min // total power subject to rate targets
};

const char *to_string(ObjectiveKind k);

enum class Scheme
{
    rs, // rate splitting: one common stream per cell
    tin // treat interference as noise: no common stream
};

const char *to_string(Scheme s);

using UserWeights = std::vector<std::vector<double>>; // [l][k]

// Everything a covariance or RIS step needs besides the expansion point.
struct StepProblem
{
    ObjectiveKind objective = ObjectiveKind::mwrm;
    Scheme scheme = Scheme::rs;
    bool force_zero_common = false; // RS run with the common layer switched off
    Signaling signaling = Signaling::improper;
    std::vector<double> budgets;    // watts per cell
    UserWeights weights;            // lambda (MWRM) or w (WSRM); empty = equal
    UserWeights thresholds;         // r^th; empty = none
    PowerModel power;
    SolverOptions solver;
    int dinkelbach_max_iterations = 30;
    double dinkelbach_tol = 1e-6;

    bool has_common() const { return scheme == Scheme::rs && !force_zero_common; }
};

/// Equal weights 1/(sum of users) for an empty input; otherwise validated (>= 0, not all 0).
UserWeights resolved_weights(const StepProblem &p, const std::vector<int> &users_per_cell);
UserWeights resolved_thresholds(const StepProblem &p, const std::vector<int> &users_per_cell);

struct PStepResult
{
    CovarianceSet cov;
    CommonAllocation rc;
    SolverReport report;
    double surrogate_objective = 0.0;
    std::vector<double> dinkelbach_f;  // F(mu^(m)) per Dinkelbach iteration
    std::vector<double> dinkelbach_mu; // mu^(m)
};

// Covariance steps. The surrogates are built from `ep` (the point P^(t-1)).
PStepResult solve_p_step_mwrm(const CovarianceExpansion &ep, const StepProblem &p);
PStepResult solve_p_step_wsrm(const CovarianceExpansion &ep, const StepProblem &p);
PStepResult solve_p_step_powermin(const CovarianceExpansion &ep, const StepProblem &p);
PStepResult solve_p_step_gee(const CovarianceExpansion &ep, const StepProblem &p);
PStepResult solve_p_step_mwee(const CovarianceExpansion &ep, const StepProblem &p);
PStepResult solve_p_step(const CovarianceExpansion &ep, const StepProblem &p);

/// One parametric GEE subproblem: max sum r - mu (L K p_c + eta sum Tr P). `surrogate_objective` is F(mu).
PStepResult solve_p_step_gee_parametric(const CovarianceExpansion &ep, const StepProblem &p, double mu);

struct ThetaStepResult
{
    ThetaSet candidate; // solution of the convexified problem, before projection
    RealVector x;
    CommonAllocation rc;
    SolverReport report;
    double surrogate_objective = 0.0;
};

/// RIS step at fixed covariances around the feasible point `prev`.
ThetaStepResult solve_theta_step(const ThetaModel &model, const CovarianceSet &cov, const ThetaSet &prev,
                                 const RisSetParams &set, const StepProblem &p);

/// Real coordinates of symmetric (IGS) or proper-structured (PGS) covariance blocks.
struct CovarianceBasis
{
    Signaling signaling = Signaling::improper;
    std::vector<RealMatrix> basis; // mutually orthogonal in the Frobenius product

    static CovarianceBasis of(Signaling s, int dim);
    RealMatrix compose(const RealVector &coords) const;
    RealVector coordinates(const RealMatrix &m) const; // orthogonal projection
};

} // namespace rsris

#endif
