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

#ifndef RSRIS_BARRIER_HPP
#define RSRIS_BARRIER_HPP

// Interior-point (log-barrier, path-following) solver for the small convex
// programs produced by the surrogate steps:
//
//   minimize    c' x
//   subject to  g_i(x) >= 0            g_i concave: affine + sum a ln det(A(x)) - x'Qx
//               M_j(x) > 0             linear matrix inequalities
//
// where A(x), M_j(x) are affine symmetric matrix functions.

#include "rsris/realdec.hpp"

#include <string>
#include <utility>
#include <vector>

namespace rsris
{

/// Symmetric matrix affine in the decision vector: base + sum_a x_a slope_a.
struct AffineSymmetric
{
    RealMatrix base;
    std::vector<std::pair<int, RealMatrix>> slopes;

    RealMatrix at(const RealVector &x) const;
    // Merges slopes that share a variable index and drops exact zeros.
    void compact();
};

struct LogDetTerm
{
    double coef = 1.0; // > 0
    AffineSymmetric arg;
};

// Contributes  -x_S' Q x_S  with Q symmetric PSD.
struct QuadraticTerm
{
    std::vector<int> vars;
    RealMatrix q;
};

class ConcaveFunction
{
  public:
    double constant = 0.0;
    std::vector<std::pair<int, double>> linear;
    std::vector<LogDetTerm> logdets;
    std::vector<QuadraticTerm> quadratics;

    void add_linear(int var, double coef) { linear.emplace_back(var, coef); }

    /// Value, or -inf outside the log-det domain.
    double value(const RealVector &x) const;

    // Variables the function depends on (sorted); valid after finalize().
    const std::vector<int> &support() const { return support_; }
    void finalize();

    // Local gradient and Hessian over support(). Returns false outside the domain.
    bool derivatives(const RealVector &x, double &value, RealVector &grad, RealMatrix &hess) const;

  private:
    std::vector<int> support_;
    bool finalized_ = false;
    std::vector<std::pair<int, double>> linear_local_;
    std::vector<std::vector<int>> logdet_local_;
    std::vector<std::vector<int>> quad_local_;
};

struct ConvexProgram
{
    int num_vars = 0;
    RealVector objective; // minimize objective' x
    std::vector<ConcaveFunction> constraints;
    std::vector<AffineSymmetric> lmis;
    std::vector<std::string> constraint_names; // optional, parallel to constraints

    int add_variable() { return num_vars++; }
    void finalize();
};

enum class SolverStatus
{
    optimal,
    infeasible,
    max_iterations,
    numerical_error
};

const char *to_string(SolverStatus s);

struct SolverOptions
{
    double gap_tol = 1e-8;     // relative duality gap (m / t) / max(1, |c'x|)
    double barrier_growth = 20.0;
    int max_newton_per_center = 200;
    int max_total_newton = 5000;
    double newton_tol = 1e-10; // half squared Newton decrement
};

struct SolverReport
{
    SolverStatus status = SolverStatus::numerical_error;
    RealVector x;
    double objective = 0.0;   // c' x
    double gap = 0.0;         // final m / t
    double max_violation = 0.0; // largest max(0, -g_i(x)) and LMI negativity
    int newton_iterations = 0;
    std::string message;
};

/// Solves from `x0`, which must keep every LMI positive definite. Constraints
/// violated at `x0` are handled by a phase-I problem.
SolverReport solve_convex_program(const ConvexProgram &program, const RealVector &x0,
                                  const SolverOptions &options = {});

/// Largest constraint violation of `x` (0 when strictly feasible).
double max_violation(const ConvexProgram &program, const RealVector &x);

} // namespace rsris

#endif
