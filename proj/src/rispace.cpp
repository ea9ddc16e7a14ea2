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

#include "rsris/rispace.hpp"

#include <cmath>
#include <stdexcept>

namespace rsris
{

namespace
{
constexpr double kPi = std::numbers::pi;
}

void PhaseAmplitudeLaw::validate() const
{
    if (!(theta_min >= 0.0 && theta_min <= 1.0))
        throw std::invalid_argument("PhaseAmplitudeLaw: theta_min must lie in [0, 1]");
    if (!(alpha > 0.0))
        throw std::invalid_argument("PhaseAmplitudeLaw: alpha must be positive");
    if (!std::isfinite(phi))
        throw std::invalid_argument("PhaseAmplitudeLaw: phi must be finite");
}

double amplitude_law(double angle, const PhaseAmplitudeLaw &law)
{
    const double s = std::clamp((std::sin(angle - law.phi) + 1.0) / 2.0, 0.0, 1.0);
    return law.theta_min + (1.0 - law.theta_min) * std::pow(s, law.alpha);
}

void DiscretePhaseGrid::validate() const
{
    if (levels < 2)
        throw std::invalid_argument("DiscretePhaseGrid: need at least 2 levels");
}

double DiscretePhaseGrid::phase(int n) const { return 2.0 * kPi * n / levels - kPi; }

double DiscretePhaseGrid::nearest(double angle) const
{
    const double step = 2.0 * kPi / levels;
    // grid index measured from -pi, wrapped onto 0..N-1
    long n = std::lround((angle + kPi) / step);
    n %= levels;
    if (n < 0)
        n += levels;
    return phase(static_cast<int>(n));
}

void RelaxationParams::validate() const
{
    if (!(epsilon_relax > 0.0))
        throw std::invalid_argument("RelaxationParams: epsilon_relax must be positive");
}

void RisSetParams::validate() const
{
    law.validate();
    grid.validate();
    relax.validate();
}

double ElementConstraint::value(const RealVector &x) const
{
    RealVector xs(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i)
        xs(i) = x(vars[i]);
    return constant + linear.dot(xs) - xs.dot(quad * xs);
}

std::vector<ElementConstraint> convexified_constraints(const ThetaSet &prev, const ThetaLayout &layout,
                                                       const RisSetParams &params)
{
    params.validate();
    const bool star = params.kind == SetKind::star_es;
    if (star != layout.star)
        throw std::invalid_argument("convexified_constraints: layout does not match the set kind");
    const double eps = params.relax.epsilon_relax;
    std::vector<ElementConstraint> out;
    for (int m = 0; m < static_cast<int>(layout.elements.size()); ++m)
        for (int n = 0; n < layout.elements[m]; ++n)
        {
            const int r = layout.offset(m, n, UserSpace::reflection);
            const std::string tag = "[" + std::to_string(m) + "," + std::to_string(n) + "]";
            const Complex tr = prev.reflect.at(m)(n);
            if (!star)
            {
                ElementConstraint disk;
                disk.vars = {r, r + 1};
                disk.constant = 1.0;
                disk.linear = RealVector::Zero(2);
                disk.quad = RealMatrix::Identity(2, 2);
                disk.name = "disk" + tag;
                out.push_back(disk);
                if (params.kind == SetKind::unit_disk)
                    continue;
                // |theta|^2 >= |theta0|^2 + 2 Re(theta0^* (theta - theta0)) >= floor
                double floor = 1.0 - eps;
                if (params.kind == SetKind::coupled_phase)
                    floor = params.law.theta_min * params.law.theta_min;
                ElementConstraint lower;
                lower.vars = {r, r + 1};
                lower.linear = RealVector(2);
                lower.linear << 2.0 * tr.real(), 2.0 * tr.imag();
                lower.constant = -std::norm(tr) - floor;
                lower.quad = RealMatrix::Zero(2, 2);
                lower.name = "modulus-floor" + tag;
                out.push_back(lower);
                continue;
            }
            const int t = layout.offset(m, n, UserSpace::transmission);
            const Complex tt = prev.transmit.at(m)(n);
            ElementConstraint energy;
            energy.vars = {r, r + 1, t, t + 1};
            energy.constant = 1.0;
            energy.linear = RealVector::Zero(4);
            energy.quad = RealMatrix::Identity(4, 4);
            energy.name = "energy" + tag;
            out.push_back(energy);
            ElementConstraint lower;
            lower.vars = energy.vars;
            lower.linear = RealVector(4);
            lower.linear << 2.0 * tr.real(), 2.0 * tr.imag(), 2.0 * tt.real(), 2.0 * tt.imag();
            lower.constant = -std::norm(tr) - std::norm(tt) - (1.0 - eps);
            lower.quad = RealMatrix::Zero(4, 4);
            lower.name = "energy-floor" + tag;
            out.push_back(lower);
        }
    return out;
}

Complex project_coefficient(Complex theta, const RisSetParams &params)
{
    if (!std::isfinite(theta.real()) || !std::isfinite(theta.imag()))
        throw std::invalid_argument("project: non-finite coefficient");
    const double mag = std::abs(theta);
    // theta = 0 has no angle; it maps to angle 0
    const double angle = mag > 0.0 ? std::arg(theta) : 0.0;
    switch (params.kind)
    {
    case SetKind::unit_disk:
        return mag > 1.0 ? theta / mag : theta;
    case SetKind::unit_modulus:
        return mag > 0.0 ? theta / mag : Complex(1.0, 0.0);
    case SetKind::coupled_phase:
        return std::polar(amplitude_law(angle, params.law), angle);
    case SetKind::discrete_phase: {
        const double g = params.grid.nearest(angle);
        return {std::cos(g), std::sin(g)};
    }
    case SetKind::star_es:
        break;
    }
    throw std::invalid_argument("project_coefficient: STAR coefficients are projected in pairs");
}

ThetaSet project(const ThetaSet &hat, const RisSetParams &params)
{
    ThetaSet out = hat;
    out.kind = params.kind;
    if (params.kind != SetKind::star_es)
    {
        out.transmit.clear();
        for (auto &v : out.reflect)
            for (Eigen::Index n = 0; n < v.size(); ++n)
                v(n) = project_coefficient(v(n), params);
        return out;
    }
    if (out.transmit.size() != out.reflect.size())
        throw std::invalid_argument("project: STAR set needs transmit coefficients");
    for (std::size_t m = 0; m < out.reflect.size(); ++m)
        for (Eigen::Index n = 0; n < out.reflect[m].size(); ++n)
        {
            Complex &r = out.reflect[m](n);
            Complex &t = out.transmit[m](n);
            if (!std::isfinite(std::abs(r)) || !std::isfinite(std::abs(t)))
                throw std::invalid_argument("project: non-finite coefficient");
            const double e = std::sqrt(std::norm(r) + std::norm(t));
            if (e == 0.0)
            {
                r = 1.0;
                continue;
            }
            r /= e;
            t /= e;
        }
    return out;
}

bool is_member(const ThetaSet &t, const RisSetParams &params, double tol)
{
    for (std::size_t m = 0; m < t.reflect.size(); ++m)
        for (Eigen::Index n = 0; n < t.reflect[m].size(); ++n)
        {
            const Complex r = t.reflect[m](n);
            const double mag = std::abs(r);
            switch (params.kind)
            {
            case SetKind::unit_disk:
                if (mag > 1.0 + tol)
                    return false;
                break;
            case SetKind::unit_modulus:
                if (std::abs(mag - 1.0) > tol)
                    return false;
                break;
            case SetKind::coupled_phase:
                if (std::abs(mag - amplitude_law(std::arg(r), params.law)) > tol)
                    return false;
                break;
            case SetKind::discrete_phase: {
                const double a = std::arg(r);
                if (std::abs(mag - 1.0) > tol || std::abs(std::remainder(a - params.grid.nearest(a), 2.0 * kPi)) > tol)
                    return false;
                break;
            }
            case SetKind::star_es:
                if (std::abs(std::norm(r) + std::norm(t.transmit.at(m)(n)) - 1.0) > tol)
                    return false;
                break;
            }
        }
    return true;
}

bool set_contains(const RisSetParams &outer, const RisSetParams &inner)
{
    const bool inner_grid = inner.kind == SetKind::discrete_phase;
    switch (outer.kind)
    {
    case SetKind::unit_disk:
        return inner.kind != SetKind::star_es;
    case SetKind::unit_modulus:
        return inner.kind == SetKind::unit_modulus || inner_grid;
    case SetKind::coupled_phase:
        return inner.kind == SetKind::coupled_phase && inner.law.theta_min == outer.law.theta_min &&
               inner.law.alpha == outer.law.alpha && inner.law.phi == outer.law.phi;
    case SetKind::discrete_phase:
        return inner_grid && outer.grid.levels % inner.grid.levels == 0;
    case SetKind::star_es:
        return inner.kind == SetKind::star_es;
    }
    return false;
}

ThetaSet random_theta(const FadingSet &f, const RisSetParams &params, std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    ThetaSet t = ThetaSet::zeros(f, params.kind);
    // phases first, so every set kind sees the same angles for one seed
    std::vector<Eigen::VectorXd> angle(f.num_ris());
    for (int m = 0; m < f.num_ris(); ++m)
    {
        angle[m].resize(f.ris_elements(m));
        for (auto &a : angle[m])
            a = 2.0 * kPi * unif(rng) - kPi;
    }
    for (int m = 0; m < f.num_ris(); ++m)
        for (int n = 0; n < f.ris_elements(m); ++n)
        {
            const double a = angle[m](n);
            switch (params.kind)
            {
            case SetKind::unit_disk:
                t.reflect[m](n) = std::polar(std::sqrt(unif(rng)), a);
                break;
            case SetKind::unit_modulus:
                t.reflect[m](n) = std::polar(1.0, a);
                break;
            case SetKind::coupled_phase:
                t.reflect[m](n) = std::polar(amplitude_law(a, params.law), a);
                break;
            case SetKind::discrete_phase: // nearest level of a uniform angle is a uniform level
                t.reflect[m](n) = std::polar(1.0, params.grid.nearest(a));
                break;
            case SetKind::star_es: {
                const double split = unif(rng);
                t.reflect[m](n) = std::polar(std::sqrt(1.0 - split), a);
                t.transmit[m](n) = std::polar(std::sqrt(split), 2.0 * kPi * unif(rng) - kPi);
                break;
            }
            }
        }
    return t;
}

MonotoneDecision monotone_update(const std::function<double(const ThetaSet &)> &f, const ThetaSet &prev,
                                 double prev_value, const ThetaSet &candidate)
{
    MonotoneDecision d;
    const double cand = f(candidate);
    if (std::isfinite(cand) && cand >= prev_value)
    {
        d.theta = candidate;
        d.accepted = true;
        d.value = cand;
    }
    else
    {
        d.theta = prev;
        d.value = prev_value;
    }
    if (d.value < prev_value)
        throw std::logic_error("monotone_update: objective decreased");
    return d;
}

MonotoneDecision monotone_update(const std::function<double(const ThetaSet &)> &f, const ThetaSet &prev,
                                 const ThetaSet &candidate)
{
    return monotone_update(f, prev, f(prev), candidate);
}

} // namespace rsris
