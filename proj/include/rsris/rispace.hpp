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

#ifndef RSRIS_RISPACE_HPP
#define RSRIS_RISPACE_HPP

#include "rsris/channel.hpp"
#include "rsris/realdec.hpp"

#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace rsris
{

/// Amplitude as a function of phase for practical reflecting elements.
struct PhaseAmplitudeLaw
{
    double theta_min = 0.2;
    double alpha = 1.6;
    double phi = 0.43 * std::numbers::pi;

    void validate() const;
};

double amplitude_law(double angle, const PhaseAmplitudeLaw &law);

struct DiscretePhaseGrid
{
    int levels = 16;

    void validate() const;
    double phase(int n) const; // 2 pi n / N - pi
    // Closest grid phase (angular distance, wrapping at +-pi).
    double nearest(double angle) const;
};

struct RelaxationParams
{
    double epsilon_relax = 0.01;

    void validate() const;
};

struct RisSetParams
{
    SetKind kind = SetKind::unit_modulus;
    PhaseAmplitudeLaw law;
    DiscretePhaseGrid grid;
    RelaxationParams relax;

    void validate() const;
};

/// True when every point of `inner` lies in `outer` (U holds I, C and D; I holds D;
/// a finer grid holds a coarser one when the level counts divide).
bool set_contains(const RisSetParams &outer, const RisSetParams &inner);

// constant + linear' x_S - x_S' quad x_S >= 0 over the listed real coordinates.
struct ElementConstraint
{
    std::vector<int> vars;
    double constant = 0.0;
    RealVector linear;
    RealMatrix quad;
    std::string name;

    double value(const RealVector &x) const;
};

/// Convex inner approximation of the set around the (feasible) previous point.
std::vector<ElementConstraint> convexified_constraints(const ThetaSet &prev, const ThetaLayout &layout,
                                                       const RisSetParams &params);

Complex project_coefficient(Complex theta, const RisSetParams &params);
ThetaSet project(const ThetaSet &hat, const RisSetParams &params);

/// Exact membership within `tol` (grid membership for D is checked on the angle).
bool is_member(const ThetaSet &t, const RisSetParams &params, double tol = 1e-12);

/// Theta^0 drawn uniformly on the set.
ThetaSet random_theta(const FadingSet &f, const RisSetParams &params, std::mt19937_64 &rng);

struct MonotoneDecision
{
    ThetaSet theta;
    bool accepted = false;
    double value = 0.0;
};

/// Keeps the candidate only when the exact objective does not decrease.
MonotoneDecision monotone_update(const std::function<double(const ThetaSet &)> &f, const ThetaSet &prev,
                                 const ThetaSet &candidate);
MonotoneDecision monotone_update(const std::function<double(const ThetaSet &)> &f, const ThetaSet &prev,
                                 double prev_value, const ThetaSet &candidate);

} // namespace rsris

#endif
