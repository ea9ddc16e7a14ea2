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

#include "rsris/subproblems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rsris
{

const char *to_string(ObjectiveKind k)
{
    switch (k)
    {
    case ObjectiveKind::mwrm:
        return "MWRM";
    case ObjectiveKind::wsrm:
        return "WSRM";
    case ObjectiveKind::gee:
        return "GEE";
    case ObjectiveKind::mwee:
        return "MWEE";
    case ObjectiveKind::power_min:
        return "PowerMin";
    }
    return "?";
}

const char *to_string(Scheme s) { return s == Scheme::rs ? "RS" : "TIN"; }

namespace
{

UserWeights shaped(const UserWeights &in, const std::vector<int> &users, double fill, const char *what)
{
    UserWeights out(users.size());
    if (in.empty())
    {
        for (std::size_t l = 0; l < users.size(); ++l)
            out[l].assign(users[l], fill);
        return out;
    }
    if (in.size() != users.size())
        throw std::invalid_argument(std::string(what) + ": cell count mismatch");
    for (std::size_t l = 0; l < users.size(); ++l)
    {
        if (static_cast<int>(in[l].size()) != users[l])
            throw std::invalid_argument(std::string(what) + ": user count mismatch");
        for (double v : in[l])
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument(std::string(what) + ": entries must be finite and nonnegative");
        out[l] = in[l];
    }
    return out;
}

std::vector<int> users_of(const CovarianceSet &cov)
{
    std::vector<int> u;
    for (int l = 0; l < cov.num_cells(); ++l)
        u.push_back(cov.num_users(l));
    return u;
}

} // namespace

UserWeights resolved_weights(const StepProblem &p, const std::vector<int> &users_per_cell)
{
    const int total = std::accumulate(users_per_cell.begin(), users_per_cell.end(), 0);
    UserWeights w = shaped(p.weights, users_per_cell, 1.0 / std::max(1, total), "weights");
    double sum = 0.0;
    for (const auto &row : w)
        sum += std::accumulate(row.begin(), row.end(), 0.0);
    if (!(sum > 0.0))
        throw std::invalid_argument("weights: at least one user needs a positive weight");
    return w;
}

UserWeights resolved_thresholds(const StepProblem &p, const std::vector<int> &users_per_cell)
{
    return shaped(p.thresholds, users_per_cell, 0.0, "thresholds");
}

CovarianceBasis CovarianceBasis::of(Signaling s, int dim)
{
    if (dim <= 0 || dim % 2 != 0)
        throw std::invalid_argument("CovarianceBasis: dimension must be even and positive");
    CovarianceBasis b;
    b.signaling = s;
    if (s == Signaling::improper)
    {
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j)
            {
                RealMatrix e = RealMatrix::Zero(dim, dim);
                e(i, j) = 1.0;
                e(j, i) = 1.0;
                b.basis.push_back(e);
            }
        return b;
    }
    const int n = dim / 2;
    // [[A, -B], [B, A]] with A symmetric and B skew
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
        {
            RealMatrix e = RealMatrix::Zero(dim, dim);
            e(i, j) = e(j, i) = 1.0;
            e(n + i, n + j) = e(n + j, n + i) = 1.0;
            b.basis.push_back(e);
        }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
        {
            RealMatrix e = RealMatrix::Zero(dim, dim);
            e(n + i, j) = 1.0;  // B(i, j)
            e(n + j, i) = -1.0; // B(j, i)
            e(j, n + i) = 1.0;  // -B(i, j) transposed
            e(i, n + j) = -1.0;
            b.basis.push_back(e);
        }
    return b;
}

RealMatrix CovarianceBasis::compose(const RealVector &coords) const
{
    if (coords.size() != static_cast<Eigen::Index>(basis.size()))
        throw std::invalid_argument("CovarianceBasis::compose: coordinate count mismatch");
    RealMatrix m = RealMatrix::Zero(basis.front().rows(), basis.front().cols());
    for (std::size_t a = 0; a < basis.size(); ++a)
        m += coords(static_cast<Eigen::Index>(a)) * basis[a];
    return m;
}

RealVector CovarianceBasis::coordinates(const RealMatrix &m) const
{
    RealVector x(basis.size());
    for (std::size_t a = 0; a < basis.size(); ++a)
        x(static_cast<Eigen::Index>(a)) = m.cwiseProduct(basis[a]).sum() / basis[a].squaredNorm();
    return x;
}

namespace
{

struct LinearForm
{
    double constant = 0.0;
    std::vector<std::pair<int, double>> terms;

    double value(const RealVector &x) const
    {
        double v = constant;
        for (const auto &[i, c] : terms)
            v += c * x(i);
        return v;
    }
    void add_to(ConcaveFunction &g, double scale) const
    {
        g.constant += scale * constant;
        for (const auto &[i, c] : terms)
            g.add_linear(i, scale * c);
    }
};

enum class FormKind
{
    max_min,           // max r : rate + rc >= lambda r
    max_sum,           // max sum w t - mu cost : t <= rate + rc
    min_cost,          // min cost
    max_min_minus_cost // max s : rate + rc - mu user_cost >= s
};

struct Form
{
    FormKind kind = FormKind::max_min;
    UserWeights weights;
    UserWeights thresholds;
    LinearForm total_cost;
    double mu = 0.0;
    std::vector<std::vector<LinearForm>> user_cost;
};

struct RateFunctions
{
    std::vector<std::vector<ConcaveFunction>> rate, cap;
    std::vector<bool> has_rc;  // per cell
    std::vector<bool> active; // per cell: users take part in the objective
};

struct Assembled
{
    ConvexProgram prog;
    RealVector x0;
    std::vector<std::vector<int>> rc;
    int r = -1;
    std::vector<std::vector<int>> t;
};

Assembled assemble(const ConvexProgram &base, const RealVector &base_x0, RateFunctions &rf, const Form &form)
{
    for (auto &row : rf.rate)
        for (auto &g : row)
            g.finalize();
    for (auto &row : rf.cap)
        for (auto &g : row)
            g.finalize();

    Assembled a;
    a.prog = base;
    const int cells = static_cast<int>(rf.rate.size());
    std::vector<std::vector<double>> v(cells), c(cells);
    for (int l = 0; l < cells; ++l)
        for (std::size_t k = 0; k < rf.rate[l].size(); ++k)
        {
            v[l].push_back(rf.rate[l][k].value(base_x0));
            c[l].push_back(rf.has_rc[l] ? rf.cap[l][k].value(base_x0) : 0.0);
        }

    std::vector<double> x0(base_x0.data(), base_x0.data() + base_x0.size());
    auto add_var = [&](double start) {
        x0.push_back(start);
        return a.prog.add_variable();
    };
    auto margin = [](double z) { return 1e-3 * (1.0 + std::abs(z)); };

    a.rc.resize(cells);
    std::vector<std::vector<double>> rc0(cells);
    for (int l = 0; l < cells; ++l)
    {
        const int users = static_cast<int>(rf.rate[l].size());
        rc0[l].assign(users, 0.0);
        a.rc[l].assign(users, -1);
        if (!rf.has_rc[l])
            continue;
        const double cap = *std::min_element(c[l].begin(), c[l].end());
        for (int k = 0; k < users; ++k)
        {
            rc0[l][k] = cap > 0.0 ? 0.5 * cap / users : 1e-6;
            a.rc[l][k] = add_var(rc0[l][k]);
        }
    }

    auto user_fn = [&](int l, int k) {
        ConcaveFunction g = rf.rate[l][k];
        if (a.rc[l][k] >= 0)
            g.add_linear(a.rc[l][k], 1.0);
        return g;
    };
    auto user_value = [&](int l, int k) { return v[l][k] + rc0[l][k]; };

    RealVector objective;
    switch (form.kind)
    {
    case FormKind::max_min: {
        double r0 = std::numeric_limits<double>::infinity();
        for (int l = 0; l < cells; ++l)
            for (std::size_t k = 0; k < rf.rate[l].size(); ++k)
                if (rf.active[l] && form.weights[l][k] > 0.0)
                    r0 = std::min(r0, user_value(l, static_cast<int>(k)) / form.weights[l][k]);
        if (!std::isfinite(r0))
            throw std::invalid_argument("max-min objective without any weighted user");
        r0 -= margin(r0);
        a.r = add_var(r0);
        for (int l = 0; l < cells; ++l)
            for (std::size_t k = 0; k < rf.rate[l].size(); ++k)
                if (rf.active[l] && form.weights[l][k] > 0.0)
                {
                    ConcaveFunction g = user_fn(l, static_cast<int>(k));
                    g.add_linear(a.r, -form.weights[l][k]);
                    a.prog.constraints.push_back(std::move(g));
                }
        objective = RealVector::Zero(a.prog.num_vars);
        objective(a.r) = -1.0;
        break;
    }
    case FormKind::max_sum: {
        a.t.resize(cells);
        std::vector<std::pair<int, double>> obj;
        for (int l = 0; l < cells; ++l)
        {
            a.t[l].assign(rf.rate[l].size(), -1);
            for (std::size_t k = 0; k < rf.rate[l].size(); ++k)
                if (rf.active[l] && form.weights[l][k] > 0.0)
                {
                    const double t0 = user_value(l, static_cast<int>(k));
                    a.t[l][k] = add_var(t0 - margin(t0));
                    ConcaveFunction g = user_fn(l, static_cast<int>(k));
                    g.add_linear(a.t[l][k], -1.0);
                    a.prog.constraints.push_back(std::move(g));
                    obj.emplace_back(a.t[l][k], -form.weights[l][k]);
                }
        }
        objective = RealVector::Zero(a.prog.num_vars);
        for (const auto &[i, w] : obj)
            objective(i) += w;
        for (const auto &[i, cst] : form.total_cost.terms)
            objective(i) += form.mu * cst;
        break;
    }
    case FormKind::min_cost:
        objective = RealVector::Zero(a.prog.num_vars);
        for (const auto &[i, cst] : form.total_cost.terms)
            objective(i) += cst;
        break;
    case FormKind::max_min_minus_cost: {
        RealVector probe = Eigen::Map<RealVector>(x0.data(), static_cast<Eigen::Index>(x0.size()));
        double s0 = std::numeric_limits<double>::infinity();
        for (int l = 0; l < cells; ++l)
            for (std::size_t k = 0; k < rf.rate[l].size(); ++k)
                if (rf.active[l])
                    s0 = std::min(s0, user_value(l, static_cast<int>(k)) - form.mu * form.user_cost[l][k].value(probe));
        if (!std::isfinite(s0))
            throw std::invalid_argument("max-min objective without any active user");
        s0 -= margin(s0);
        a.r = add_var(s0);
        for (int l = 0; l < cells; ++l)
            for (std::size_t k = 0; k < rf.rate[l].size(); ++k)
                if (rf.active[l])
                {
                    ConcaveFunction g = user_fn(l, static_cast<int>(k));
                    form.user_cost[l][k].add_to(g, -form.mu);
                    g.add_linear(a.r, -1.0);
                    a.prog.constraints.push_back(std::move(g));
                }
        objective = RealVector::Zero(a.prog.num_vars);
        objective(a.r) = -1.0;
        break;
    }
    }

    for (int l = 0; l < cells; ++l)
        for (std::size_t k = 0; k < rf.rate[l].size(); ++k)
            if (rf.active[l] && !form.thresholds.empty() && form.thresholds[l][k] > 0.0)
            {
                ConcaveFunction g = user_fn(l, static_cast<int>(k));
                g.constant -= form.thresholds[l][k];
                a.prog.constraints.push_back(std::move(g));
            }

    for (int l = 0; l < cells; ++l)
    {
        if (!rf.has_rc[l])
            continue;
        for (std::size_t k = 0; k < rf.cap[l].size(); ++k)
        {
            ConcaveFunction g = rf.cap[l][k];
            for (int j : a.rc[l])
                g.add_linear(j, -1.0);
            a.prog.constraints.push_back(std::move(g));
        }
        for (int j : a.rc[l])
        {
            ConcaveFunction g;
            g.add_linear(j, 1.0);
            a.prog.constraints.push_back(std::move(g));
        }
    }

    a.prog.objective = objective;
    a.prog.objective.conservativeResize(a.prog.num_vars);
    a.x0 = Eigen::Map<RealVector>(x0.data(), static_cast<Eigen::Index>(x0.size()));
    return a;
}

CommonAllocation extract_rc(const Assembled &a, const RealVector &x)
{
    CommonAllocation rc(a.rc.size());
    for (std::size_t l = 0; l < a.rc.size(); ++l)
        for (int j : a.rc[l])
            rc[l].push_back(j >= 0 ? std::max(0.0, x(j)) : 0.0);
    return rc;
}

// Covariance-step decision layout.
struct PBase
{
    ConvexProgram prog;
    RealVector x0;
    CovarianceBasis basis;
    CovarianceSet fixed; // values of blocks that are not decision variables
    std::vector<std::vector<int>> offset; // [l][k], index K_l is the common block; -1 = fixed
    std::vector<LinearForm> cell_power;
    std::vector<bool> cell_active;

    int offset_of(BlockRef b) const
    {
        const auto &row = offset.at(b.cell);
        return b.is_common() ? row.back() : row.at(b.user);
    }

    CovarianceSet compose(const RealVector &x) const
    {
        CovarianceSet cov = fixed;
        const Eigen::Index nb = static_cast<Eigen::Index>(basis.basis.size());
        for (const BlockRef b : all_blocks(cov))
        {
            const int off = offset_of(b);
            if (off < 0)
                continue;
            RealMatrix m = basis.compose(x.segment(off, nb));
            block_of(cov, b) = 0.5 * (m + m.transpose());
        }
        return cov;
    }
};

PBase make_p_base(const CovarianceExpansion &ep, const StepProblem &p, bool power_min)
{
    const CovarianceSet &prev = ep.cov;
    const int cells = prev.num_cells();
    if (static_cast<int>(p.budgets.size()) != cells)
        throw std::invalid_argument("covariance step: one power budget per cell required");
    PBase b;
    const int dim = ep.channels.tx_dim(0);
    b.basis = CovarianceBasis::of(p.signaling, dim);
    b.fixed = prev;
    b.fixed.signaling = p.signaling;
    b.offset.resize(cells);
    b.cell_power.resize(cells);
    b.cell_active.assign(cells, false);
    const int nb = static_cast<int>(b.basis.basis.size());
    std::vector<double> x0;

    for (int l = 0; l < cells; ++l)
    {
        const double budget = p.budgets[l];
        if (!(budget >= 0.0) || !std::isfinite(budget))
            throw std::invalid_argument("covariance step: power budgets must be finite and nonnegative");
        const bool active = budget > 0.0;
        b.cell_active[l] = active;
        const int users = prev.num_users(l);
        if (!p.has_common() || !active)
            b.fixed.common[l].setZero();
        if (!active)
            for (auto &pk : b.fixed.priv[l])
                pk.setZero();
        const int blocks = users + (p.has_common() ? 1 : 0);
        const double prev_power = prev.power(l);
        const double a = power_min ? 1e-3 : 0.05;
        const double level = (power_min && prev_power > 0.0 ? std::min(prev_power, budget) : budget) /
                             (blocks * dim);
        for (int k = 0; k <= users; ++k)
        {
            const bool common = k == users;
            if (!active || (common && !p.has_common()))
            {
                b.offset[l].push_back(-1);
                continue;
            }
            const RealMatrix &pk = common ? prev.common[l] : prev.priv[l][k];
            RealMatrix start = (1.0 - 2.0 * a) * pk + a * level * RealMatrix::Identity(dim, dim);
            const RealVector coords = b.basis.coordinates(start);
            const int off = b.prog.num_vars;
            b.offset[l].push_back(off);
            AffineSymmetric lmi;
            lmi.base = RealMatrix::Zero(dim, dim);
            for (int j = 0; j < nb; ++j)
            {
                b.prog.add_variable();
                x0.push_back(coords(j));
                lmi.slopes.emplace_back(off + j, b.basis.basis[j]);
                const double tr = b.basis.basis[j].trace();
                if (tr != 0.0)
                    b.cell_power[l].terms.emplace_back(off + j, tr);
            }
            b.prog.lmis.push_back(std::move(lmi));
        }
        if (active)
        {
            ConcaveFunction g;
            g.constant = budget;
            b.cell_power[l].add_to(g, -1.0);
            b.prog.constraints.push_back(std::move(g));
        }
    }
    b.x0 = Eigen::Map<RealVector>(x0.data(), static_cast<Eigen::Index>(x0.size()));
    return b;
}

ConcaveFunction to_function(const ConcaveRateSurrogate &s, const PBase &b)
{
    ConcaveFunction g;
    g.constant = s.constant;
    LogDetTerm ld;
    ld.coef = kHalfLog2e;
    ld.arg.base = s.base;
    for (const auto &term : s.logdet_terms)
    {
        const int off = b.offset_of(term.block);
        if (off < 0)
        {
            ld.arg.base += term.h * block_of(b.fixed, term.block) * term.h.transpose();
            continue;
        }
        for (std::size_t j = 0; j < b.basis.basis.size(); ++j)
            ld.arg.slopes.emplace_back(off + static_cast<int>(j),
                                       term.h * b.basis.basis[j] * term.h.transpose());
    }
    ld.arg.base = 0.5 * (ld.arg.base + ld.arg.base.transpose());
    for (const auto &[blk, cmat] : s.linear)
    {
        const int off = b.offset_of(blk);
        if (off < 0)
        {
            g.constant -= cmat.cwiseProduct(block_of(b.fixed, blk)).sum();
            continue;
        }
        for (std::size_t j = 0; j < b.basis.basis.size(); ++j)
            g.add_linear(off + static_cast<int>(j), -cmat.cwiseProduct(b.basis.basis[j]).sum());
    }
    g.logdets.push_back(std::move(ld));
    return g;
}

RateFunctions p_rate_functions(const CovarianceExpansion &ep, const PBase &b, const StepProblem &p)
{
    RateFunctions rf;
    const int cells = ep.cov.num_cells();
    rf.rate.resize(cells);
    rf.cap.resize(cells);
    for (int l = 0; l < cells; ++l)
    {
        rf.has_rc.push_back(p.has_common() && b.cell_active[l]);
        rf.active.push_back(b.cell_active[l]);
        for (int k = 0; k < ep.cov.num_users(l); ++k)
        {
            rf.rate[l].push_back(to_function(private_rate_surrogate(l, k, ep), b));
            if (rf.has_rc[l])
                rf.cap[l].push_back(to_function(common_rate_surrogate(l, k, ep), b));
        }
    }
    return rf;
}

// p_c + eta Tr(P_lk) + (eta / K) Tr(P_lc)
std::vector<std::vector<LinearForm>> user_costs(const PBase &b, const StepProblem &p)
{
    std::vector<std::vector<LinearForm>> out(b.fixed.num_cells());
    const int nb = static_cast<int>(b.basis.basis.size());
    for (int l = 0; l < b.fixed.num_cells(); ++l)
    {
        const int users = b.fixed.num_users(l);
        for (int k = 0; k < users; ++k)
        {
            LinearForm f;
            f.constant = p.power.static_power;
            auto add_block = [&](BlockRef ref, double scale) {
                const int off = b.offset_of(ref);
                if (off < 0)
                {
                    f.constant += scale * block_of(b.fixed, ref).trace();
                    return;
                }
                for (int j = 0; j < nb; ++j)
                {
                    const double tr = b.basis.basis[j].trace();
                    if (tr != 0.0)
                        f.terms.emplace_back(off + j, scale * tr);
                }
            };
            add_block({l, k}, p.power.inv_efficiency);
            add_block({l, -1}, p.power.inv_efficiency / users);
            out[l].push_back(std::move(f));
        }
    }
    return out;
}

LinearForm total_cost(const PBase &b, const StepProblem &p)
{
    LinearForm f;
    int users = 0;
    for (int l = 0; l < b.fixed.num_cells(); ++l)
    {
        users += b.fixed.num_users(l);
        for (const auto &[i, c] : b.cell_power[l].terms)
            f.terms.emplace_back(i, p.power.inv_efficiency * c);
    }
    f.constant = users * p.power.static_power;
    return f;
}

bool all_budgets_zero(const StepProblem &p)
{
    return std::all_of(p.budgets.begin(), p.budgets.end(), [](double b) { return b == 0.0; });
}

PStepResult zero_result(const CovarianceExpansion &ep, const StepProblem &p)
{
    PStepResult r;
    r.cov = ep.cov;
    r.cov.signaling = p.signaling;
    for (const BlockRef b : all_blocks(r.cov))
        block_of(r.cov, b).setZero();
    r.rc = CommonAllocation(r.cov.num_cells());
    for (int l = 0; l < r.cov.num_cells(); ++l)
        r.rc[l].assign(r.cov.num_users(l), 0.0);
    r.report.status = SolverStatus::optimal;
    r.report.message = "all power budgets are zero";
    return r;
}

struct PSolve
{
    PBase base;
    RateFunctions rf;
    Assembled assembled;
    SolverReport report;
};

PSolve run_p_program(const CovarianceExpansion &ep, const StepProblem &p, const Form &form_in, bool power_min)
{
    PSolve s{make_p_base(ep, p, power_min), {}, {}, {}};
    s.rf = p_rate_functions(ep, s.base, p);
    Form form = form_in;
    if (form.kind == FormKind::max_sum || form.kind == FormKind::min_cost)
        form.total_cost = power_min ? [&] {
            LinearForm f;
            for (const auto &cp : s.base.cell_power)
                f.terms.insert(f.terms.end(), cp.terms.begin(), cp.terms.end());
            return f;
        }()
                                    : total_cost(s.base, p);
    if (form.kind == FormKind::max_min_minus_cost)
        form.user_cost = user_costs(s.base, p);
    s.assembled = assemble(s.base.prog, s.base.x0, s.rf, form);
    s.report = solve_convex_program(s.assembled.prog, s.assembled.x0, p.solver);
    return s;
}

PStepResult finish(const PSolve &s, const StepProblem &p)
{
    PStepResult r;
    r.report = s.report;
    r.cov = s.base.compose(s.report.x);
    r.cov.signaling = p.signaling;
    r.rc = extract_rc(s.assembled, s.report.x);
    r.surrogate_objective = -s.report.objective;
    return r;
}

double surrogate_user_rate(const PSolve &s, int l, int k)
{
    double v = s.rf.rate[l][k].value(s.report.x);
    const int j = s.assembled.rc[l][k];
    if (j >= 0)
        v += std::max(0.0, s.report.x(j));
    return v;
}

} // namespace

PStepResult solve_p_step_mwrm(const CovarianceExpansion &ep, const StepProblem &p)
{
    if (all_budgets_zero(p))
        return zero_result(ep, p);
    Form form;
    form.kind = FormKind::max_min;
    form.weights = resolved_weights(p, users_of(ep.cov));
    form.thresholds = resolved_thresholds(p, users_of(ep.cov));
    return finish(run_p_program(ep, p, form, false), p);
}

PStepResult solve_p_step_wsrm(const CovarianceExpansion &ep, const StepProblem &p)
{
    if (all_budgets_zero(p))
        return zero_result(ep, p);
    Form form;
    form.kind = FormKind::max_sum;
    form.weights = resolved_weights(p, users_of(ep.cov));
    form.thresholds = resolved_thresholds(p, users_of(ep.cov));
    form.mu = 0.0;
    return finish(run_p_program(ep, p, form, false), p);
}

PStepResult solve_p_step_powermin(const CovarianceExpansion &ep, const StepProblem &p)
{
    const UserWeights th = resolved_thresholds(p, users_of(ep.cov));
    bool any = false;
    for (const auto &row : th)
        for (double v : row)
            any = any || v > 0.0;
    if (!any || all_budgets_zero(p))
    {
        if (any)
        {
            PStepResult r = zero_result(ep, p);
            r.report.status = SolverStatus::infeasible;
            r.report.message = "positive rate targets with zero power budgets";
            return r;
        }
        PStepResult r = zero_result(ep, p);
        r.report.message = "no rate targets";
        return r;
    }
    Form form;
    form.kind = FormKind::min_cost;
    form.thresholds = th;
    PStepResult r = finish(run_p_program(ep, p, form, true), p);
    r.surrogate_objective = r.cov.total_power();
    return r;
}

PStepResult solve_p_step_gee_parametric(const CovarianceExpansion &ep, const StepProblem &p, double mu)
{
    Form form;
    form.kind = FormKind::max_sum;
    form.weights = shaped({}, users_of(ep.cov), 1.0, "weights");
    form.thresholds = resolved_thresholds(p, users_of(ep.cov));
    form.mu = mu;
    PSolve s = run_p_program(ep, p, form, false);
    PStepResult r = finish(s, p);
    double num = 0.0;
    for (int l = 0; l < ep.cov.num_cells(); ++l)
        for (int k = 0; k < ep.cov.num_users(l); ++k)
            if (s.rf.active[l])
                num += surrogate_user_rate(s, l, k);
    const double cost = total_cost(s.base, p).value(s.report.x);
    r.surrogate_objective = num - mu * cost;
    return r;
}

PStepResult solve_p_step_gee(const CovarianceExpansion &ep, const StepProblem &p)
{
    if (all_budgets_zero(p))
        return zero_result(ep, p);
    double mu = 0.0;
    PStepResult best;
    std::vector<double> fs, mus;
    for (int m = 0; m < p.dinkelbach_max_iterations; ++m)
    {
        PStepResult r = solve_p_step_gee_parametric(ep, p, mu);
        fs.push_back(r.surrogate_objective);
        mus.push_back(mu);
        if (r.report.status != SolverStatus::optimal)
        {
            r.dinkelbach_f = fs;
            r.dinkelbach_mu = mus;
            return r;
        }
        // mu^(m+1) = numerator / denominator at the new point
        const double power = r.cov.total_power();
        int users = 0;
        for (int l = 0; l < r.cov.num_cells(); ++l)
            users += r.cov.num_users(l);
        const double denom = users * p.power.static_power + p.power.inv_efficiency * power;
        const double num = r.surrogate_objective + mu * denom;
        best = std::move(r);
        best.surrogate_objective = num / denom;
        if (fs.back() < p.dinkelbach_tol)
            break;
        mu = num / denom;
        if (m + 1 == p.dinkelbach_max_iterations)
        {
            best.report.status = SolverStatus::max_iterations;
            best.report.message = "Dinkelbach iteration cap reached";
        }
    }
    best.dinkelbach_f = fs;
    best.dinkelbach_mu = mus;
    return best;
}

PStepResult solve_p_step_mwee(const CovarianceExpansion &ep, const StepProblem &p)
{
    if (all_budgets_zero(p))
        return zero_result(ep, p);
    double mu = 0.0;
    PStepResult best;
    std::vector<double> fs, mus;
    Form form;
    form.kind = FormKind::max_min_minus_cost;
    form.thresholds = resolved_thresholds(p, users_of(ep.cov));
    for (int m = 0; m < p.dinkelbach_max_iterations; ++m)
    {
        form.mu = mu;
        PSolve s = run_p_program(ep, p, form, false);
        PStepResult r = finish(s, p);
        fs.push_back(r.surrogate_objective);
        mus.push_back(mu);
        if (r.report.status != SolverStatus::optimal)
        {
            r.dinkelbach_f = fs;
            r.dinkelbach_mu = mus;
            return r;
        }
        const auto costs = user_costs(s.base, p);
        double ratio = std::numeric_limits<double>::infinity();
        for (int l = 0; l < ep.cov.num_cells(); ++l)
            for (int k = 0; k < ep.cov.num_users(l); ++k)
                if (s.rf.active[l])
                    ratio = std::min(ratio, surrogate_user_rate(s, l, k) / costs[l][k].value(s.report.x));
        best = std::move(r);
        best.surrogate_objective = ratio;
        if (fs.back() < p.dinkelbach_tol)
            break;
        mu = ratio;
        if (m + 1 == p.dinkelbach_max_iterations)
        {
            best.report.status = SolverStatus::max_iterations;
            best.report.message = "Dinkelbach iteration cap reached";
        }
    }
    best.dinkelbach_f = fs;
    best.dinkelbach_mu = mus;
    return best;
}

PStepResult solve_p_step(const CovarianceExpansion &ep, const StepProblem &p)
{
    switch (p.objective)
    {
    case ObjectiveKind::mwrm:
        return solve_p_step_mwrm(ep, p);
    case ObjectiveKind::wsrm:
        return solve_p_step_wsrm(ep, p);
    case ObjectiveKind::gee:
        return solve_p_step_gee(ep, p);
    case ObjectiveKind::mwee:
        return solve_p_step_mwee(ep, p);
    case ObjectiveKind::power_min:
        return solve_p_step_powermin(ep, p);
    }
    throw std::invalid_argument("solve_p_step: unknown objective");
}

namespace
{

ConcaveFunction to_function(const QuadraticSurrogate &s)
{
    ConcaveFunction g;
    g.constant = s.constant;
    for (Eigen::Index i = 0; i < s.linear.size(); ++i)
        if (s.linear(i) != 0.0)
            g.add_linear(static_cast<int>(i), s.linear(i));
    std::vector<int> vars;
    for (Eigen::Index i = 0; i < s.quad.rows(); ++i)
        if (s.quad.row(i).cwiseAbs().maxCoeff() > 0.0)
            vars.push_back(static_cast<int>(i));
    if (!vars.empty())
    {
        QuadraticTerm q;
        q.vars = vars;
        q.q.resize(static_cast<Eigen::Index>(vars.size()), static_cast<Eigen::Index>(vars.size()));
        for (std::size_t a = 0; a < vars.size(); ++a)
            for (std::size_t b = 0; b < vars.size(); ++b)
                q.q(a, b) = s.quad(vars[a], vars[b]);
        g.quadratics.push_back(std::move(q));
    }
    return g;
}

} // namespace

ThetaStepResult solve_theta_step(const ThetaModel &model, const CovarianceSet &cov, const ThetaSet &prev,
                                 const RisSetParams &set, const StepProblem &p)
{
    if ((set.kind == SetKind::star_es) != model.layout.star)
        throw std::invalid_argument("solve_theta_step: model layout does not match the set kind");
    const RealVector x_bar = theta_to_vector(prev, model.layout);
    const int n = model.num_vars();

    ConvexProgram base;
    base.num_vars = n;
    for (const auto &ec : convexified_constraints(prev, model.layout, set))
    {
        ConcaveFunction g;
        g.constant = ec.constant;
        for (std::size_t i = 0; i < ec.vars.size(); ++i)
            if (ec.linear(static_cast<Eigen::Index>(i)) != 0.0)
                g.add_linear(ec.vars[i], ec.linear(static_cast<Eigen::Index>(i)));
        if (ec.quad.cwiseAbs().maxCoeff() > 0.0)
            g.quadratics.push_back({ec.vars, ec.quad});
        base.constraints.push_back(std::move(g));
        base.constraint_names.push_back(ec.name);
    }
    const RealVector x0 = (1.0 - 1e-3) * x_bar;

    const int cells = cov.num_cells();
    RateFunctions rf;
    rf.rate.resize(cells);
    rf.cap.resize(cells);
    for (int l = 0; l < cells; ++l)
    {
        const bool active = cov.power(l) > 0.0;
        rf.active.push_back(active);
        rf.has_rc.push_back(p.has_common() && active && cov.common[l].trace() > 0.0);
        for (int k = 0; k < cov.num_users(l); ++k)
        {
            rf.rate[l].push_back(to_function(theta_rate_surrogate(l, k, RateKind::private_rate, model, cov, x_bar)));
            if (rf.has_rc[l])
                rf.cap[l].push_back(to_function(theta_rate_surrogate(l, k, RateKind::common_rate, model, cov, x_bar)));
        }
    }

    const auto users = users_of(cov);
    Form form;
    switch (p.objective)
    {
    case ObjectiveKind::mwrm:
        form.kind = FormKind::max_min;
        form.weights = resolved_weights(p, users);
        form.thresholds = resolved_thresholds(p, users);
        break;
    case ObjectiveKind::power_min:
        // maximize the smallest rate relative to its target
        form.kind = FormKind::max_min;
        form.weights = resolved_thresholds(p, users);
        break;
    case ObjectiveKind::mwee:
        // the energy denominators are constant in this step
        form.kind = FormKind::max_min;
        form.weights.resize(cells);
        for (int l = 0; l < cells; ++l)
            for (int k = 0; k < cov.num_users(l); ++k)
                form.weights[l].push_back(p.power.static_power + p.power.inv_efficiency * cov.priv[l][k].trace() +
                                          p.power.inv_efficiency / cov.num_users(l) * cov.common[l].trace());
        form.thresholds = resolved_thresholds(p, users);
        break;
    case ObjectiveKind::wsrm:
        form.kind = FormKind::max_sum;
        form.weights = resolved_weights(p, users);
        form.thresholds = resolved_thresholds(p, users);
        break;
    case ObjectiveKind::gee:
        form.kind = FormKind::max_sum;
        form.weights = shaped({}, users, 1.0, "weights");
        form.thresholds = resolved_thresholds(p, users);
        break;
    }

    Assembled a = assemble(base, x0, rf, form);
    ThetaStepResult out;
    out.report = solve_convex_program(a.prog, a.x0, p.solver);
    out.x = out.report.x.head(n);
    out.candidate = vector_to_theta(out.x, model.layout, set.kind);
    out.rc = extract_rc(a, out.report.x);
    out.surrogate_objective = -out.report.objective;
    return out;
}

} // namespace rsris
