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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace rsris
{

RealMatrix AffineSymmetric::at(const RealVector &x) const
{
    RealMatrix m = base;
    for (const auto &[var, slope] : slopes)
        m += x(var) * slope;
    return m;
}

void AffineSymmetric::compact()
{
    std::map<int, RealMatrix> merged;
    for (auto &[var, slope] : slopes)
    {
        auto it = merged.find(var);
        if (it == merged.end())
            merged.emplace(var, slope);
        else
            it->second += slope;
    }
    slopes.clear();
    for (auto &[var, slope] : merged)
        if (slope.cwiseAbs().maxCoeff() > 0.0)
            slopes.emplace_back(var, std::move(slope));
}

namespace
{

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln det of an SPD matrix and its inverse; false if not PD.
bool logdet_and_inverse(const RealMatrix &m, double &logdet, RealMatrix *inverse)
{
    Eigen::LLT<RealMatrix> llt(m);
    if (llt.info() != Eigen::Success)
        return false;
    const auto diag = llt.matrixLLT().diagonal();
    if ((diag.array() <= 0.0).any() || !diag.allFinite())
        return false;
    logdet = 2.0 * diag.array().log().sum();
    if (inverse)
        *inverse = llt.solve(RealMatrix::Identity(m.rows(), m.cols()));
    return true;
}

} // namespace

double ConcaveFunction::value(const RealVector &x) const
{
    double v = constant;
    for (const auto &[var, c] : linear)
        v += c * x(var);
    for (const auto &term : logdets)
    {
        double ld = 0.0;
        if (!logdet_and_inverse(term.arg.at(x), ld, nullptr))
            return kNegInf;
        v += term.coef * ld;
    }
    for (const auto &q : quadratics)
    {
        RealVector xs(q.vars.size());
        for (std::size_t i = 0; i < q.vars.size(); ++i)
            xs(i) = x(q.vars[i]);
        v -= xs.dot(q.q * xs);
    }
    return v;
}

void ConcaveFunction::finalize()
{
    for (auto &term : logdets)
        term.arg.compact();
    std::vector<int> vars;
    for (const auto &[var, c] : linear)
        vars.push_back(var);
    for (const auto &term : logdets)
        for (const auto &[var, s] : term.arg.slopes)
            vars.push_back(var);
    for (const auto &q : quadratics)
        vars.insert(vars.end(), q.vars.begin(), q.vars.end());
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    support_ = vars;

    auto local = [&](int var) {
        return static_cast<int>(std::lower_bound(support_.begin(), support_.end(), var) - support_.begin());
    };
    linear_local_.clear();
    for (const auto &[var, c] : linear)
        linear_local_.emplace_back(local(var), c);
    logdet_local_.clear();
    for (const auto &term : logdets)
    {
        std::vector<int> idx;
        for (const auto &[var, s] : term.arg.slopes)
            idx.push_back(local(var));
        logdet_local_.push_back(std::move(idx));
    }
    quad_local_.clear();
    for (const auto &q : quadratics)
    {
        std::vector<int> idx;
        for (int var : q.vars)
            idx.push_back(local(var));
        quad_local_.push_back(std::move(idx));
    }
    finalized_ = true;
}

bool ConcaveFunction::derivatives(const RealVector &x, double &val, RealVector &grad, RealMatrix &hess) const
{
    if (!finalized_)
        throw std::logic_error("ConcaveFunction::derivatives before finalize()");
    const Eigen::Index s = static_cast<Eigen::Index>(support_.size());
    grad.setZero(s);
    hess.setZero(s, s);
    val = constant;
    for (std::size_t i = 0; i < linear.size(); ++i)
    {
        val += linear[i].second * x(linear[i].first);
        grad(linear_local_[i].first) += linear_local_[i].second;
    }

    for (std::size_t t = 0; t < logdets.size(); ++t)
    {
        const auto &term = logdets[t];
        double ld = 0.0;
        RealMatrix inv;
        if (!logdet_and_inverse(term.arg.at(x), ld, &inv))
            return false;
        val += term.coef * ld;
        const Eigen::Index p = static_cast<Eigen::Index>(term.arg.slopes.size());
        const Eigen::Index d = inv.rows();
        // tr(M^-1 S_a M^-1 S_b) = vec(F_a) . vec(F_b^T) with F_a = M^-1 S_a
        RealMatrix fa(d * d, p), fb(d * d, p);
        for (Eigen::Index a = 0; a < p; ++a)
        {
            const RealMatrix f = inv * term.arg.slopes[a].second;
            grad(logdet_local_[t][a]) += term.coef * f.trace();
            fa.col(a) = Eigen::Map<const RealVector>(f.data(), d * d);
            const RealMatrix ft = f.transpose();
            fb.col(a) = Eigen::Map<const RealVector>(ft.data(), d * d);
        }
        const RealMatrix h = fa.transpose() * fb;
        for (Eigen::Index a = 0; a < p; ++a)
            for (Eigen::Index b = 0; b < p; ++b)
                hess(logdet_local_[t][a], logdet_local_[t][b]) -= term.coef * 0.5 * (h(a, b) + h(b, a));
    }

    for (std::size_t qi = 0; qi < quadratics.size(); ++qi)
    {
        const auto &q = quadratics[qi];
        const auto &idx = quad_local_[qi];
        RealVector xs(q.vars.size());
        for (std::size_t i = 0; i < q.vars.size(); ++i)
            xs(i) = x(q.vars[i]);
        const RealVector qx = q.q * xs;
        val -= xs.dot(qx);
        for (std::size_t i = 0; i < idx.size(); ++i)
        {
            grad(idx[i]) -= 2.0 * qx(i);
            for (std::size_t j = 0; j < idx.size(); ++j)
                hess(idx[i], idx[j]) -= q.q(i, j) + q.q(j, i);
        }
    }
    return std::isfinite(val);
}

void ConvexProgram::finalize()
{
    if (objective.size() != num_vars)
    {
        RealVector c = RealVector::Zero(num_vars);
        c.head(std::min<Eigen::Index>(objective.size(), num_vars)) =
            objective.head(std::min<Eigen::Index>(objective.size(), num_vars));
        objective = c;
    }
    for (auto &g : constraints)
        g.finalize();
    for (auto &m : lmis)
        m.compact();
}

const char *to_string(SolverStatus s)
{
    switch (s)
    {
    case SolverStatus::optimal:
        return "optimal";
    case SolverStatus::infeasible:
        return "infeasible";
    case SolverStatus::max_iterations:
        return "max_iterations";
    case SolverStatus::numerical_error:
        return "numerical_error";
    }
    return "?";
}

namespace
{

// Barrier  phi(x) = -sum ln g_i(x) - sum ln det M_j(x), with LMIs stored as
// single-log-det concave functions.
class BarrierProblem
{
  public:
    BarrierProblem(const ConvexProgram &p) : program_(p)
    {
        for (const auto &m : p.lmis)
        {
            ConcaveFunction f;
            f.logdets.push_back({1.0, m});
            f.finalize();
            lmi_fns_.push_back(std::move(f));
            lmi_dim_ += static_cast<int>(m.base.rows());
        }
    }

    int barrier_weight() const { return static_cast<int>(program_.constraints.size()) + lmi_dim_; }

    double phi(const RealVector &x) const
    {
        double v = 0.0;
        for (const auto &g : program_.constraints)
        {
            const double gv = g.value(x);
            if (!(gv > 0.0))
                return std::numeric_limits<double>::infinity();
            v -= std::log(gv);
        }
        for (const auto &f : lmi_fns_)
        {
            const double ld = f.value(x);
            if (!std::isfinite(ld))
                return std::numeric_limits<double>::infinity();
            v -= ld;
        }
        return v;
    }

    bool gradient_hessian(const RealVector &x, RealVector &grad, RealMatrix &hess) const
    {
        const int n = program_.num_vars;
        grad.setZero(n);
        hess.setZero(n, n);
        double val = 0.0;
        RealVector lg;
        RealMatrix lh;
        for (const auto &g : program_.constraints)
        {
            if (!g.derivatives(x, val, lg, lh) || !(val > 0.0))
                return false;
            const auto &supp = g.support();
            for (std::size_t a = 0; a < supp.size(); ++a)
            {
                grad(supp[a]) -= lg(a) / val;
                for (std::size_t b = 0; b < supp.size(); ++b)
                    hess(supp[a], supp[b]) += lg(a) * lg(b) / (val * val) - lh(a, b) / val;
            }
        }
        for (const auto &f : lmi_fns_)
        {
            if (!f.derivatives(x, val, lg, lh))
                return false;
            const auto &supp = f.support();
            for (std::size_t a = 0; a < supp.size(); ++a)
            {
                grad(supp[a]) -= lg(a);
                for (std::size_t b = 0; b < supp.size(); ++b)
                    hess(supp[a], supp[b]) -= lh(a, b);
            }
        }
        return true;
    }

  private:
    const ConvexProgram &program_;
    std::vector<ConcaveFunction> lmi_fns_;
    int lmi_dim_ = 0;
};

struct CenteringResult
{
    RealVector x;
    int iterations = 0;
    bool ok = true;
};

// Minimizes t c'x + phi(x) by damped Newton. `stop` is polled after each step.
template <typename Stop>
CenteringResult center(const BarrierProblem &bp, const RealVector &c, double t, RealVector x,
                       const SolverOptions &opt, int budget, Stop &&stop)
{
    CenteringResult res;
    RealVector g;
    RealMatrix h;
    const Eigen::Index n = x.size();
    for (int it = 0; it < std::min(opt.max_newton_per_center, budget); ++it)
    {
        if (!bp.gradient_hessian(x, g, h))
        {
            res.ok = false;
            break;
        }
        g += t * c;
        RealVector dx;
        {
            double reg = 0.0;
            const double scale = std::max(1e-300, h.diagonal().cwiseAbs().maxCoeff());
            for (int attempt = 0; attempt < 12; ++attempt)
            {
                Eigen::LLT<RealMatrix> llt(h + reg * RealMatrix::Identity(n, n));
                if (llt.info() == Eigen::Success)
                {
                    dx = -llt.solve(g);
                    if (dx.allFinite())
                        break;
                }
                reg = reg == 0.0 ? 1e-14 * scale : reg * 100.0;
            }
        }
        if (dx.size() != n || !dx.allFinite())
        {
            res.ok = false;
            break;
        }
        ++res.iterations;
        const double decrement = -g.dot(dx);
        if (decrement / 2.0 <= opt.newton_tol)
            break;

        double step = 1.0;
        const double f0 = t * c.dot(x) + bp.phi(x);
        double f1 = std::numeric_limits<double>::infinity();
        for (int ls = 0; ls < 80; ++ls)
        {
            f1 = t * c.dot(x + step * dx) + bp.phi(x + step * dx);
            if (std::isfinite(f1) && f1 <= f0 - 0.01 * step * decrement)
                break;
            step *= 0.5;
        }
        if (!std::isfinite(f1) || step < 1e-15)
            break; // no progress possible at this precision
        x += step * dx;
        if (stop(x))
            break;
    }
    res.x = std::move(x);
    return res;
}

struct PathResult
{
    RealVector x;
    double gap = 0.0;
    int newton = 0;
    SolverStatus status = SolverStatus::optimal;
    bool stopped_early = false;
};

template <typename Stop>
PathResult follow_path(const ConvexProgram &program, const RealVector &x0, const SolverOptions &opt, Stop &&stop)
{
    BarrierProblem bp(program);
    PathResult out;
    out.x = x0;
    const double m = std::max(1, bp.barrier_weight());
    double t = 1.0;
    bool stopped = false;
    auto poll = [&](const RealVector &x) {
        if (stop(x))
            stopped = true;
        return stopped;
    };
    while (true)
    {
        const int budget = opt.max_total_newton - out.newton;
        if (budget <= 0)
        {
            out.status = SolverStatus::max_iterations;
            break;
        }
        auto cr = center(bp, program.objective, t, out.x, opt, budget, poll);
        out.newton += cr.iterations;
        if (!cr.ok)
        {
            out.status = SolverStatus::numerical_error;
            break;
        }
        out.x = std::move(cr.x);
        out.gap = m / t;
        if (stopped)
        {
            out.stopped_early = true;
            break;
        }
        if (out.gap <= opt.gap_tol * std::max(1.0, std::abs(program.objective.dot(out.x))))
            break;
        t *= opt.barrier_growth;
    }
    return out;
}

double lmi_min_eigenvalue(const AffineSymmetric &m, const RealVector &x)
{
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(m.at(x), Eigen::EigenvaluesOnly);
    return es.eigenvalues().size() ? es.eigenvalues().minCoeff() : 0.0;
}

} // namespace

double max_violation(const ConvexProgram &program, const RealVector &x)
{
    double v = 0.0;
    for (const auto &g : program.constraints)
    {
        const double gv = g.value(x);
        v = std::max(v, std::isfinite(gv) ? -gv : std::numeric_limits<double>::infinity());
    }
    for (const auto &m : program.lmis)
        v = std::max(v, -lmi_min_eigenvalue(m, x));
    return std::max(v, 0.0);
}

SolverReport solve_convex_program(const ConvexProgram &input, const RealVector &x0, const SolverOptions &options)
{
    ConvexProgram program = input;
    program.finalize();
    SolverReport report;
    report.x = x0;
    if (x0.size() != program.num_vars)
        throw std::invalid_argument("solve_convex_program: starting point has wrong dimension");
    for (const auto &m : program.lmis)
        if (!(lmi_min_eigenvalue(m, x0) > 0.0))
            throw std::invalid_argument("solve_convex_program: starting point violates an LMI");

    RealVector x = x0;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto &g : program.constraints)
    {
        const double gv = g.value(x);
        worst = std::max(worst, std::isfinite(gv) ? -gv : std::numeric_limits<double>::infinity());
    }
    if (!std::isfinite(worst))
    {
        report.message = "starting point outside the log-det domain";
        return report;
    }

    if (worst >= 0.0)
    {
        // Phase I: minimize s subject to g_i(x) + s >= 0, s >= -1.
        ConvexProgram phase1 = program;
        const int s = phase1.add_variable();
        for (auto &g : phase1.constraints)
            g.add_linear(s, 1.0);
        ConcaveFunction lower;
        lower.constant = 1.0;
        lower.add_linear(s, 1.0);
        phase1.constraints.push_back(std::move(lower));
        // keeps the phase-I barrier bounded in directions the constraints leave free:
        // radius^2 - |x - x0|^2 >= 0
        const double radius = 1e3 * (1.0 + x.norm());
        ConcaveFunction ball;
        ball.constant = radius * radius - x.squaredNorm();
        for (int i = 0; i < program.num_vars; ++i)
            ball.add_linear(i, 2.0 * x(i));
        QuadraticTerm q;
        for (int i = 0; i < program.num_vars; ++i)
            q.vars.push_back(i);
        q.q = RealMatrix::Identity(program.num_vars, program.num_vars);
        ball.quadratics.push_back(std::move(q));
        phase1.constraints.push_back(std::move(ball));
        phase1.objective = RealVector::Zero(phase1.num_vars);
        phase1.objective(s) = 1.0;
        phase1.finalize();

        RealVector y(phase1.num_vars);
        y.head(program.num_vars) = x;
        y(s) = worst + 1.0;
        SolverOptions o1 = options;
        auto r1 = follow_path(phase1, y, o1, [&](const RealVector &v) { return v(s) < -1e-4; });
        report.newton_iterations += r1.newton;
        x = r1.x.head(program.num_vars);
        const bool strictly_feasible = max_violation(program, x) == 0.0 && r1.x(s) < 0.0;
        if (!strictly_feasible)
        {
            report.x = x;
            report.max_violation = max_violation(program, x);
            report.status = r1.status == SolverStatus::optimal ? SolverStatus::infeasible : r1.status;
            report.message = "phase I could not find a strictly feasible point (min slack " +
                             std::to_string(r1.x(s)) + ")";
            return report;
        }
    }

    auto r2 = follow_path(program, x, options, [](const RealVector &) { return false; });
    report.newton_iterations += r2.newton;
    report.x = r2.x;
    report.gap = r2.gap;
    report.objective = program.objective.dot(r2.x);
    report.max_violation = max_violation(program, r2.x);
    report.status = r2.status;
    if (r2.status == SolverStatus::numerical_error && report.max_violation == 0.0 && r2.gap < 1e-4)
    {
        // stalled close to the optimum: keep the last centred iterate
        report.status = SolverStatus::optimal;
        report.message = "stalled at gap " + std::to_string(r2.gap);
    }
    return report;
}

} // namespace rsris
