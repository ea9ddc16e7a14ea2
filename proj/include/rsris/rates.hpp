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

#ifndef RSRIS_RATES_HPP
#define RSRIS_RATES_HPP

#include "rsris/channel.hpp"
#include "rsris/realdec.hpp"

#include <vector>

namespace rsris
{

enum class Signaling
{
    improper, // IGS: unstructured real PSD covariances
    proper    // PGS: proper-structured real covariances
};

const char *to_string(Signaling s);

// Real 2N_BS x 2N_BS transmit covariances of the private and common streams.
struct CovarianceSet
{
    std::vector<std::vector<RealMatrix>> priv; // [l][k]
    std::vector<RealMatrix> common;            // [l]
    Signaling signaling = Signaling::improper;

    int num_cells() const { return static_cast<int>(priv.size()); }
    int num_users(int l) const { return static_cast<int>(priv.at(l).size()); }

    RealMatrix total(int l) const;
    double power(int l) const;
    double total_power() const;

    // Throws if a block is not symmetric PSD (within tol), exceeds its budget,
    // or (PGS) breaks the proper structure.
    void validate(const std::vector<double> &budgets, double tol = 1e-8) const;

    static CovarianceSet zeros(const EquivalentChannels &ch, Signaling s);
    // Equal split of each budget over K private streams plus the common stream
    // (or over K streams only when `with_common` is false).
    static CovarianceSet equal_split(const EquivalentChannels &ch, const std::vector<double> &budgets, Signaling s,
                                     bool with_common = true);
};

struct PowerModel
{
    double static_power = 1.0;         // p_c, watts per served user
    double inv_efficiency = 1.0 / 0.35; // eta

    void validate() const;
};

// Rates in bits/s/Hz.
struct RateBundle
{
    std::vector<std::vector<double>> priv;            // r_{lk,p}
    std::vector<std::vector<double>> common_per_user; // rbar_{lk,c}
    std::vector<double> common_cap;                   // r_{l,c} = min_k rbar_{lk,c}
    std::vector<std::vector<RealMatrix>> interference; // D_lk

    int num_cells() const { return static_cast<int>(priv.size()); }
    int num_users(int l) const { return static_cast<int>(priv.at(l).size()); }
};

using CommonAllocation = std::vector<std::vector<double>>; // r_{lk,c}

/// log2 det of a symmetric positive definite matrix; throws if not PD.
double log2det_spd(const RealMatrix &m);

RealMatrix interference_matrix(int l, int k, const CovarianceSet &cov, const EquivalentChannels &ch);

double private_rate(int l, int k, const CovarianceSet &cov, const EquivalentChannels &ch);

struct CommonCap
{
    std::vector<double> per_user;
    double cap = 0.0;
};

CommonCap common_rate_cap(int l, const CovarianceSet &cov, const EquivalentChannels &ch);

RateBundle evaluate_rates(const CovarianceSet &cov, const EquivalentChannels &ch);

/// Throws std::invalid_argument unless r_c >= 0 and sum_k r_{lk,c} <= r_{l,c} (+ tol) for every cell.
void check_allocation(const RateBundle &bundle, const CommonAllocation &rc, double tol = 1e-9);

double user_rate(int l, int k, const RateBundle &bundle, const CommonAllocation &rc);

double gee(const CovarianceSet &cov, const RateBundle &bundle, const CommonAllocation &rc, const PowerModel &pm);

double ee_user(int l, int k, const CovarianceSet &cov, const RateBundle &bundle, const CommonAllocation &rc,
               const PowerModel &pm);

CommonAllocation zero_allocation(const RateBundle &bundle);

// Best common-rate split for  max_{r_c} min_{lk} (r_{lk,c} + r_{lk,p}) / lambda_lk
// (users with lambda == 0 are unconstrained). Returns the attained objective.
struct MaxMinAllocation
{
    CommonAllocation rc;
    double value = 0.0;
};
MaxMinAllocation allocate_common_maxmin(const RateBundle &bundle, const std::vector<std::vector<double>> &lambda);

// Any split meeting r_lk >= threshold_lk that hands out the full common cap.
// Empty optional-like result: `feasible == false`.
struct ThresholdAllocation
{
    CommonAllocation rc;
    bool feasible = false;
};
ThresholdAllocation allocate_common_thresholds(const RateBundle &bundle,
                                               const std::vector<std::vector<double>> &thresholds);

} // namespace rsris

#endif
