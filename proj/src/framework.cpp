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

#include "rsris/framework.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace rsris
{

void ConvergenceCriteria::validate() const
{
    if (!(rel_tol > 0.0))
        throw std::invalid_argument("ConvergenceCriteria: rel_tol must be positive");
    if (max_iterations < 1)
        throw std::invalid_argument("ConvergenceCriteria: max_iterations must be at least 1");
}

void ProblemSpec::validate(int cells) const
{
    convergence.validate();
    step.power.validate();
    if (static_cast<int>(step.budgets.size()) != cells)
        throw std::invalid_argument("ProblemSpec: one power budget per cell required");
    for (double b : step.budgets)
        if (!(b >= 0.0) || !std::isfinite(b))
            throw std::invalid_argument("ProblemSpec: power budgets must be finite and nonnegative");
}

const char *to_string(StepType s)
{
    switch (s)
    {
    case StepType::init:
        return "init";
    case StepType::feasibility:
        return "feasibility";
    case StepType::p_step:
        return "P";
    case StepType::theta_step:
        return "Theta";
    }
    return "?";
}

const char *to_string(RsMode m)
{
    switch (m)
    {
    case RsMode::tin:
        return "TIN";
    case RsMode::noma_like:
        return "NOMA-like";
    case RsMode::broadcast:
        return "Broadcast";
    case RsMode::general:
        return "General-RS";
    }
    return "?";
}

std::vector<double> RunTrace::accepted_objectives() const
{
    std::vector<double> out;
    for (const auto &e : entries)
        if (e.step == StepType::p_step || e.step == StepType::theta_step)
            out.push_back(e.objective);
    return out;
}

namespace
{

nlohmann::json matrix_json(const RealMatrix &m)
{
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

} // namespace

std::string RunTrace::to_json() const
{
    nlohmann::json j;
    j["objective"] = finite_or_null(objective);
    j["converged"] = converged;
    j["feasible"] = feasible;
    j["iterations"] = iterations;
    j["message"] = message;
    j["min_rate"] = min_rate;
    j["sum_rate"] = sum_rate;
    j["total_power"] = total_power;
    j["gee"] = gee_value;
    auto &it = j["trace"] = nlohmann::json::array();
    for (const auto &e : entries)
        it.push_back({{"iteration", e.iteration},
                      {"step", to_string(e.step)},
                      {"objective", finite_or_null(e.objective)},
                      {"candidate", finite_or_null(e.candidate)},
                      {"accepted", e.accepted},
                      {"status", to_string(e.status)},
                      {"newton", e.newton}});
    nlohmann::json cells = nlohmann::json::array();
    for (int l = 0; l < cov.num_cells(); ++l)
    {
        nlohmann::json c;
        c["common"] = matrix_json(cov.common[l]);
        c["private"] = nlohmann::json::array();
        for (const auto &p : cov.priv[l])
            c["private"].push_back(matrix_json(p));
        c["private_rates"] = bundle.priv.at(l);
        c["common_cap"] = bundle.common_cap.at(l);
        c["common_allocation"] = rc.at(l);
        cells.push_back(c);
    }
    j["covariances"] = to_string(cov.signaling);
    j["cells"] = cells;
    nlohmann::json ris = nlohmann::json::array();
    for (std::size_t m = 0; m < theta.reflect.size(); ++m)
    {
        nlohmann::json r;
        for (Eigen::Index n = 0; n < theta.reflect[m].size(); ++n)
        {
            r["reflect"].push_back({theta.reflect[m](n).real(), theta.reflect[m](n).imag()});
            if (theta.is_star())
                r["transmit"].push_back({theta.transmit[m](n).real(), theta.transmit[m](n).imag()});
        }
        ris.push_back(r);
    }
    j["theta"] = {{"set", to_string(theta.kind)}, {"ris", ris}};
    return j.dump(2);
}

std::string RunTrace::to_csv() const
{
    std::ostringstream os;
    os.precision(17);
    os << "iteration,step,objective,candidate,accepted,status\n";
    for (const auto &e : entries)
        os << e.iteration << ',' << to_string(e.step) << ',' << e.objective << ',' << e.candidate << ','
           << (e.accepted ? 1 : 0) << ',' << to_string(e.status) << '\n';
    return os.str();
}

namespace
{

UserWeights users_shape(const CovarianceSet &cov)
{
    UserWeights w(cov.num_cells());
    for (int l = 0; l < cov.num_cells(); ++l)
        w[l].assign(cov.num_users(l), 0.0);
    return w;
}

std::vector<int> user_counts(const CovarianceSet &cov)
{
    std::vector<int> u;
    for (int l = 0; l < cov.num_cells(); ++l)
        u.push_back(cov.num_users(l));
    return u;
}

bool has_targets(const ProblemSpec &spec, const CovarianceSet &cov)
{
    for (const auto &row : resolved_thresholds(spec.step, user_counts(cov)))
        for (double v : row)
            if (v > 0.0)
                return true;
    return false;
}

ObjectiveValue infeasible_value(const RateBundle &bundle, double v)
{
    ObjectiveValue o;
    o.value = v;
    o.rc = zero_allocation(bundle);
    o.feasible = false;
    return o;
}

} // namespace

ObjectiveValue evaluate_objective(const ProblemSpec &spec, const CovarianceSet &cov, const RateBundle &bundle)
{
    const auto users = user_counts(cov);
    ObjectiveValue out;
    switch (spec.step.objective)
    {
    case ObjectiveKind::mwrm: {
        auto a = allocate_common_maxmin(bundle, resolved_weights(spec.step, users));
        out.value = a.value;
        out.rc = std::move(a.rc);
        return out;
    }
    case ObjectiveKind::mwee: {
        UserWeights denom = users_shape(cov);
        for (int l = 0; l < cov.num_cells(); ++l)
            for (int k = 0; k < cov.num_users(l); ++k)
                denom[l][k] = spec.step.power.static_power +
                              spec.step.power.inv_efficiency * cov.priv[l][k].trace() +
                              spec.step.power.inv_efficiency / cov.num_users(l) * cov.common[l].trace();
        auto a = allocate_common_maxmin(bundle, denom);
        out.value = a.value;
        out.rc = std::move(a.rc);
        return out;
    }
    case ObjectiveKind::wsrm: {
        const auto w = resolved_weights(spec.step, users);
        out.rc = zero_allocation(bundle);
        out.value = 0.0;
        for (int l = 0; l < cov.num_cells(); ++l)
        {
            int best = 0;
            for (int k = 0; k < cov.num_users(l); ++k)
            {
                out.value += w[l][k] * bundle.priv[l][k];
                if (w[l][k] > w[l][best])
                    best = k;
            }
            out.rc[l][best] = bundle.common_cap[l];
            out.value += w[l][best] * bundle.common_cap[l];
        }
        return out;
    }
    case ObjectiveKind::gee: {
        auto a = allocate_common_thresholds(bundle, resolved_thresholds(spec.step, users));
        if (!a.feasible)
            return infeasible_value(bundle, -std::numeric_limits<double>::infinity());
        out.value = gee(cov, bundle, a.rc, spec.step.power);
        out.rc = std::move(a.rc);
        return out;
    }
    case ObjectiveKind::power_min: {
        auto a = allocate_common_thresholds(bundle, resolved_thresholds(spec.step, users));
        out.value = cov.total_power();
        if (!a.feasible)
            return infeasible_value(bundle, out.value);
        out.rc = std::move(a.rc);
        return out;
    }
    }
    throw std::invalid_argument("evaluate_objective: unknown objective");
}

namespace
{

bool minimizing(const ProblemSpec &spec) { return spec.step.objective == ObjectiveKind::power_min; }

double relative_change(double now, double before)
{
    if (!std::isfinite(now) || !std::isfinite(before))
        return std::numeric_limits<double>::infinity();
    return std::abs(now - before) / std::max(std::abs(before), 1e-12);
}

// Objective that gates RIS-step acceptance: the step's own min-rate-to-target
// ratio for power minimization, the run objective otherwise.
double theta_metric(const ProblemSpec &spec, const CovarianceSet &cov, const RateBundle &bundle)
{
    if (spec.step.objective == ObjectiveKind::power_min)
        return allocate_common_maxmin(bundle, resolved_thresholds(spec.step, user_counts(cov))).value;
    const ObjectiveValue v = evaluate_objective(spec, cov, bundle);
    return v.feasible ? v.value : -std::numeric_limits<double>::infinity();
}

struct State
{
    CovarianceSet cov;
    ThetaSet theta;
    EquivalentChannels ch;
    RateBundle bundle;
    ObjectiveValue obj;
};

struct Context
{
    const ThetaModel *model = nullptr;
    const AoOptions *ao = nullptr;
};

// Over-relaxation: after an MM step from x0 to x1, the points x1 + beta (x1 - x0)
// for beta = 1, 2, 4, ... are tried and kept while the exact objective improves.
// The MM update itself is unchanged, so every guarantee of the plain iteration
// still holds; the extra points only shorten the slow tails of the iteration.
constexpr double kMaxBeta = 64.0;

// The RIS step moves each phase only a little (the linearized modulus bound),
// so it is repeated while it keeps improving before the next P-step.
constexpr int kThetaRepeats = 3;

void clip_psd(RealMatrix &m)
{
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (m + m.transpose()));
    m = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() * es.eigenvectors().transpose();
}

// base + beta (base - prev), pulled back onto the PSD cone and the budgets.
CovarianceSet extrapolated(const CovarianceSet &base, const CovarianceSet &prev, double beta,
                           const std::vector<double> &budgets)
{
    CovarianceSet c = base;
    for (int l = 0; l < c.num_cells(); ++l)
    {
        c.common[l] += beta * (base.common[l] - prev.common[l]);
        for (std::size_t k = 0; k < c.priv[l].size(); ++k)
            c.priv[l][k] += beta * (base.priv[l][k] - prev.priv[l][k]);
        if (c.common[l].norm() > 0.0)
            clip_psd(c.common[l]);
        for (auto &p : c.priv[l])
            clip_psd(p);
        const double pw = c.power(l);
        if (pw > budgets[l])
        {
            const double f = budgets[l] / pw;
            c.common[l] *= f;
            for (auto &p : c.priv[l])
                p *= f;
        }
    }
    return c;
}

ThetaSet extrapolated(const ThetaSet &base, const ThetaSet &prev, double beta, const RisSetParams &set)
{
    ThetaSet t = base;
    for (std::size_t m = 0; m < t.reflect.size(); ++m)
    {
        t.reflect[m] += beta * (base.reflect[m] - prev.reflect[m]);
        if (t.is_star())
            t.transmit[m] += beta * (base.transmit[m] - prev.transmit[m]);
    }
    return project(t, set);
}

bool improves(const ObjectiveValue &v, const ObjectiveValue &ref, bool minimize)
{
    return v.feasible && (minimize ? v.value < ref.value : v.value > ref.value);
}

void extrapolate_p(const ProblemSpec &spec, const CovarianceSet &prev, State &st, bool minimize)
{
    if (!spec.convergence.extrapolate)
        return;
    const CovarianceSet base = st.cov;
    for (double beta = 1.0; beta <= kMaxBeta; beta *= 2.0)
    {
        CovarianceSet c = extrapolated(base, prev, beta, spec.step.budgets);
        RateBundle b = evaluate_rates(c, st.ch);
        ObjectiveValue v = evaluate_objective(spec, c, b);
        if (!improves(v, st.obj, minimize))
            break;
        st.cov = std::move(c);
        st.bundle = std::move(b);
        st.obj = std::move(v);
    }
}

// Gated by the RIS-step metric, like the step itself.
void extrapolate_theta(const ProblemSpec &spec, const ThetaSet &prev, State &st, const Context &ctx,
                       double &metric)
{
    if (!spec.convergence.extrapolate)
        return;
    const ThetaSet base = st.theta;
    for (double beta = 1.0; beta <= kMaxBeta; beta *= 2.0)
    {
        ThetaSet t = extrapolated(base, prev, beta, ctx.ao->set);
        EquivalentChannels ch = ctx.model->at(theta_to_vector(t, ctx.model->layout));
        RateBundle b = evaluate_rates(st.cov, ch);
        const double v = theta_metric(spec, st.cov, b);
        if (!(v > metric))
            break;
        st.theta = std::move(t);
        st.ch = std::move(ch);
        st.bundle = std::move(b);
        metric = v;
    }
}

// Both blocks together along the last outer iteration. Not used for power
// minimization, whose two steps are gated by different metrics.
void extrapolate_joint(const ProblemSpec &spec, const CovarianceSet &prev_cov, const ThetaSet &prev_theta,
                       State &st, const Context &ctx, double &metric)
{
    if (!spec.convergence.extrapolate)
        return;
    const CovarianceSet base_cov = st.cov;
    const ThetaSet base_theta = st.theta;
    for (double beta = 1.0; beta <= kMaxBeta; beta *= 2.0)
    {
        CovarianceSet c = extrapolated(base_cov, prev_cov, beta, spec.step.budgets);
        ThetaSet t = extrapolated(base_theta, prev_theta, beta, ctx.ao->set);
        EquivalentChannels ch = ctx.model->at(theta_to_vector(t, ctx.model->layout));
        RateBundle b = evaluate_rates(c, ch);
        ObjectiveValue v = evaluate_objective(spec, c, b);
        if (!improves(v, st.obj, false))
            break;
        st.cov = std::move(c);
        st.theta = std::move(t);
        st.ch = std::move(ch);
        st.bundle = std::move(b);
        st.obj = std::move(v);
        metric = st.obj.value;
    }
}

struct LoopOutcome
{
    bool converged = false;
    bool stopped = false;
    int iterations = 0;
};

LoopOutcome outer_loop(const ProblemSpec &spec, State &st, const Context &ctx, RunTrace &trace, StepType p_label,
                       const std::function<bool(const State &)> &stop)
{
    LoopOutcome out;
    const bool minimize = minimizing(spec);
    const bool theta_steps = ctx.model && ctx.ao && ctx.ao->optimize_theta && ctx.model->num_vars() > 0;
    double metric = theta_steps ? theta_metric(spec, st.cov, st.bundle) : 0.0;
    int failures = 0;

    for (int it = 1; it <= spec.convergence.max_iterations; ++it)
    {
        out.iterations = it;
        const double before = st.obj.value;
        const CovarianceSet cov_before = st.cov;
        const ThetaSet theta_before = st.theta;
        const double metric_before = metric;

        TraceEntry pe;
        pe.iteration = it;
        pe.step = p_label;
        const auto ep = CovarianceExpansion::at(st.cov, st.ch);
        const PStepResult res = solve_p_step(ep, spec.step);
        pe.status = res.report.status;
        pe.newton = res.report.newton_iterations;
        pe.accepted = false;
        pe.candidate = std::numeric_limits<double>::quiet_NaN();
        if (res.report.status == SolverStatus::optimal || res.report.status == SolverStatus::max_iterations)
        {
            const RateBundle b = evaluate_rates(res.cov, st.ch);
            const ObjectiveValue cand = evaluate_objective(spec, res.cov, b);
            pe.candidate = cand.value;
            const bool better = cand.feasible && (minimize ? cand.value <= st.obj.value : cand.value >= st.obj.value);
            if (better)
            {
                const CovarianceSet prev_cov = st.cov;
                st.cov = res.cov;
                st.bundle = b;
                st.obj = cand;
                pe.accepted = true;
                extrapolate_p(spec, prev_cov, st, minimize);
            }
        }
        failures = pe.status == SolverStatus::optimal ? 0 : failures + 1;
        pe.objective = st.obj.value;
        trace.entries.push_back(pe);
        if (stop && stop(st))
        {
            out.stopped = true;
            return out;
        }

        if (theta_steps && pe.accepted)
            metric = theta_metric(spec, st.cov, st.bundle);
        const int theta_repeats = spec.convergence.extrapolate ? kThetaRepeats : 1;
        for (int rep = 0; theta_steps && rep < theta_repeats; ++rep)
        {
            const double metric_rep = metric;
            TraceEntry te;
            te.iteration = it;
            te.step = StepType::theta_step;
            te.accepted = false;
            te.candidate = std::numeric_limits<double>::quiet_NaN();
            ThetaStepResult tr;
            try
            {
                tr = solve_theta_step(*ctx.model, st.cov, st.theta, ctx.ao->set, spec.step);
                te.status = tr.report.status;
                te.newton = tr.report.newton_iterations;
            }
            catch (const std::invalid_argument &)
            {
                te.status = SolverStatus::infeasible; // e.g. no user with a positive target
            }
            if (te.status == SolverStatus::optimal || te.status == SolverStatus::max_iterations)
            {
                const ThetaSet cand = project(tr.candidate, ctx.ao->set);
                const EquivalentChannels cand_ch = ctx.model->at(theta_to_vector(cand, ctx.model->layout));
                const RateBundle cand_bundle = evaluate_rates(st.cov, cand_ch);
                te.candidate = theta_metric(spec, st.cov, cand_bundle);
                auto f = [&](const ThetaSet &) { return te.candidate; };
                const MonotoneDecision d = monotone_update(f, st.theta, metric, cand);
                if (d.accepted)
                {
                    const ThetaSet prev_theta = st.theta;
                    st.theta = d.theta;
                    st.ch = cand_ch;
                    st.bundle = cand_bundle;
                    metric = d.value;
                    extrapolate_theta(spec, prev_theta, st, ctx, metric);
                    st.obj = evaluate_objective(spec, st.cov, st.bundle);
                    te.accepted = true;
                }
            }
            else
                failures += 1;
            te.objective = st.obj.value;
            trace.entries.push_back(te);
            if (stop && stop(st))
            {
                out.stopped = true;
                return out;
            }
            if (!te.accepted || relative_change(metric, metric_rep) < spec.convergence.rel_tol)
                break;
        }

        if (theta_steps && !minimize)
            extrapolate_joint(spec, cov_before, theta_before, st, ctx, metric);

        double change = relative_change(st.obj.value, before);
        if (theta_steps && minimize)
            change = std::max(change, relative_change(metric, metric_before));
        if (change < spec.convergence.rel_tol)
        {
            out.converged = true;
            return out;
        }
        if (failures >= 3)
            return out; // persistent solver failure
    }
    return out;
}

void finalize_trace(const ProblemSpec &spec, const State &st, RunTrace &trace)
{
    trace.cov = st.cov;
    trace.theta = st.theta;
    trace.bundle = st.bundle;
    trace.rc = st.obj.rc;
    trace.objective = st.obj.value;
    trace.feasible = trace.feasible && st.obj.feasible;
    trace.total_power = st.cov.total_power();
    trace.min_rate = std::numeric_limits<double>::infinity();
    trace.sum_rate = 0.0;
    for (int l = 0; l < st.cov.num_cells(); ++l)
        for (int k = 0; k < st.cov.num_users(l); ++k)
        {
            const double r = st.bundle.priv[l][k] + trace.rc[l][k];
            trace.min_rate = std::min(trace.min_rate, r);
            trace.sum_rate += r;
        }
    trace.gee_value = gee(st.cov, st.bundle, trace.rc, spec.step.power);
}

CovarianceSet initial_covariances(const ProblemSpec &spec, const EquivalentChannels &ch)
{
    return CovarianceSet::equal_split(ch, spec.step.budgets, spec.step.signaling, spec.step.has_common());
}

// Rate-profile iterations with lambda proportional to the targets until every
// target is met; used before objectives that carry rate constraints.
bool reach_targets(const ProblemSpec &spec, State &st, const Context &ctx, RunTrace &trace)
{
    ProblemSpec search = spec;
    search.step.objective = ObjectiveKind::mwrm;
    search.step.weights = resolved_thresholds(spec.step, user_counts(st.cov));
    search.step.thresholds.clear();
    auto ratio = [&](const State &s) {
        return allocate_common_maxmin(s.bundle, search.step.weights).value;
    };
    st.obj = evaluate_objective(search, st.cov, st.bundle);
    if (ratio(st) >= 1.0)
    {
        st.obj = evaluate_objective(spec, st.cov, st.bundle);
        return st.obj.feasible;
    }
    outer_loop(search, st, ctx, trace, StepType::feasibility, [&](const State &s) { return ratio(s) >= 1.0; });
    st.obj = evaluate_objective(spec, st.cov, st.bundle);
    return st.obj.feasible;
}

RunTrace drive(const ProblemSpec &spec, State st, const Context &ctx)
{
    RunTrace trace;
    if (has_targets(spec, st.cov))
    {
        if (!reach_targets(spec, st, ctx, trace))
        {
            trace.feasible = false;
            trace.message = "rate targets not reachable within the power budget";
            finalize_trace(spec, st, trace);
            return trace;
        }
    }
    else
        st.obj = evaluate_objective(spec, st.cov, st.bundle);

    TraceEntry init;
    init.step = StepType::init;
    init.objective = init.candidate = st.obj.value;
    trace.entries.push_back(init);

    const LoopOutcome o = outer_loop(spec, st, ctx, trace, StepType::p_step, nullptr);
    trace.converged = o.converged;
    trace.iterations = o.iterations;
    if (!o.converged)
        trace.message = "iteration cap or persistent solver failure";
    finalize_trace(spec, st, trace);
    return trace;
}

} // namespace

RunTrace run_mm(const ProblemSpec &spec, const EquivalentChannels &channels, const std::optional<CovarianceSet> &initial)
{
    spec.validate(channels.num_cells());
    State st;
    st.ch = channels;
    st.cov = initial ? *initial : initial_covariances(spec, channels);
    st.cov.validate(spec.step.budgets, 1e-6);
    st.bundle = evaluate_rates(st.cov, st.ch);
    return drive(spec, std::move(st), Context{});
}

RunTrace run_ao(const ProblemSpec &spec, const FadingSet &fading, const HardwareModel &hardware,
                const AoOptions &options)
{
    spec.validate(fading.num_cells());
    options.set.validate();
    const bool star = options.set.kind == SetKind::star_es;
    const UserSpaceMap map = options.space_map.empty() ? default_space_map(fading) : options.space_map;
    const HardwareModel design = spec.iqi_aware ? hardware : HardwareModel::ideal(fading);
    const ThetaModel model = ThetaModel::build(fading, map, design, star);

    State st;
    if (options.initial_theta)
        st.theta = project(*options.initial_theta, options.set);
    else
    {
        std::mt19937_64 rng(options.theta_seed);
        st.theta = random_theta(fading, options.set, rng);
    }
    st.ch = model.at(theta_to_vector(st.theta, model.layout));
    st.cov = options.initial_cov ? *options.initial_cov : initial_covariances(spec, st.ch);
    st.cov.validate(spec.step.budgets, 1e-6);
    st.bundle = evaluate_rates(st.cov, st.ch);

    Context ctx{&model, &options};
    RunTrace trace = drive(spec, std::move(st), ctx);
    if (!spec.iqi_aware)
    {
        // designed for ideal devices, scored on the impaired ones
        const EquivalentChannels truth = build_equivalent_channels(fading, trace.theta, map, hardware);
        State fin;
        fin.cov = trace.cov;
        fin.theta = trace.theta;
        fin.bundle = evaluate_rates(fin.cov, truth);
        fin.obj = evaluate_objective(spec, fin.cov, fin.bundle);
        finalize_trace(spec, fin, trace);
    }
    return trace;
}

std::vector<RunTrace> run_ao_nested(const ProblemSpec &spec, const FadingSet &fading,
                                    const HardwareModel &hardware, const AoOptions &options,
                                    const std::vector<RisSetParams> &sets)
{
    const std::size_t n = sets.size();
    auto inside = [&](std::size_t outer, std::size_t inner) {
        return outer != inner && set_contains(sets[outer], sets[inner]) && !set_contains(sets[inner], sets[outer]);
    };
    // smaller sets first: a set is ready once everything strictly inside it is done
    std::vector<std::optional<RunTrace>> done(n);
    for (std::size_t round = 0; round < n; ++round)
        for (std::size_t i = 0; i < n; ++i)
        {
            if (done[i])
                continue;
            bool ready = true;
            for (std::size_t j = 0; j < n; ++j)
                ready = ready && (!inside(i, j) || done[j]);
            if (!ready)
                continue;
            AoOptions opt = options;
            opt.set = sets[i];
            const RunTrace *best = nullptr;
            for (std::size_t j = 0; j < n; ++j)
                if (inside(i, j) && done[j]->feasible &&
                    (!best || (minimizing(spec) ? done[j]->objective < best->objective
                                                : done[j]->objective > best->objective)))
                    best = &*done[j];
            if (best)
            {
                opt.initial_theta = best->theta;
                opt.initial_cov = best->cov;
            }
            done[i] = run_ao(spec, fading, hardware, opt);
        }
    std::vector<RunTrace> out;
    for (auto &d : done)
        out.push_back(std::move(*d));
    return out;
}

std::vector<RatePoint> sweep_rate_region(const ProblemSpec &base, const EquivalentChannels &channels,
                                         const std::vector<UserWeights> &lambdas)
{
    std::vector<RatePoint> out;
    for (const auto &lambda : lambdas)
    {
        ProblemSpec spec = base;
        spec.step.objective = ObjectiveKind::mwrm;
        spec.step.weights = lambda;
        const RunTrace t = run_mm(spec, channels);
        RatePoint p;
        p.lambda = lambda;
        p.rates.resize(t.bundle.num_cells());
        for (int l = 0; l < t.bundle.num_cells(); ++l)
            for (int k = 0; k < t.bundle.num_users(l); ++k)
                p.rates[l].push_back(t.bundle.priv[l][k] + t.rc[l][k]);
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<RsMode> classify_rs_mode(const RateBundle &bundle, const CommonAllocation &rc, double tol)
{
    std::vector<RsMode> out;
    for (int l = 0; l < bundle.num_cells(); ++l)
    {
        const int users = bundle.num_users(l);
        double common = 0.0;
        bool no_private = true;
        for (int k = 0; k < users; ++k)
        {
            common += rc.at(l).at(k);
            no_private = no_private && bundle.priv[l][k] <= tol;
        }
        if (common <= tol)
            out.push_back(RsMode::tin);
        else if (no_private)
            out.push_back(RsMode::broadcast);
        else if (users == 2 && ((rc[l][0] <= tol && bundle.priv[l][1] <= tol) ||
                                (rc[l][1] <= tol && bundle.priv[l][0] <= tol)))
            out.push_back(RsMode::noma_like);
        else
            out.push_back(RsMode::general);
    }
    return out;
}

} // namespace rsris
