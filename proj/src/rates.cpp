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

#include "rsris/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rsris
{

const char *to_string(Signaling s) { return s == Signaling::improper ? "IGS" : "PGS"; }

RealMatrix CovarianceSet::total(int l) const
{
    RealMatrix p = common.at(l);
    for (const auto &pk : priv.at(l))
        p += pk;
    return p;
}

double CovarianceSet::power(int l) const { return total(l).trace(); }

double CovarianceSet::total_power() const
{
    double p = 0.0;
    for (int l = 0; l < num_cells(); ++l)
        p += power(l);
    return p;
}

namespace
{

void check_block(const RealMatrix &p, Signaling s, double tol, const std::string &name)
{
    if (p.rows() != p.cols() || p.rows() % 2 != 0)
        throw std::invalid_argument(name + ": covariance must be square with even dimension");
    const double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
    if ((p - p.transpose()).cwiseAbs().maxCoeff() > tol * scale)
        throw std::invalid_argument(name + ": covariance is not symmetric");
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (p + p.transpose()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol * scale)
        throw std::invalid_argument(name + ": covariance is not PSD");
    if (s == Signaling::proper && !is_proper_structured(p, tol))
        throw std::invalid_argument(name + ": PGS covariance is not proper-structured");
}

} // namespace

void CovarianceSet::validate(const std::vector<double> &budgets, double tol) const
{
    if (static_cast<int>(common.size()) != num_cells() || static_cast<int>(budgets.size()) != num_cells())
        throw std::invalid_argument("CovarianceSet: cell count mismatch");
    for (int l = 0; l < num_cells(); ++l)
    {
        for (int k = 0; k < num_users(l); ++k)
            check_block(priv[l][k], signaling, tol, "P[" + std::to_string(l) + "][" + std::to_string(k) + "]");
        check_block(common[l], signaling, tol, "Pc[" + std::to_string(l) + "]");
        if (power(l) > budgets[l] * (1.0 + tol) + tol)
            throw std::invalid_argument("CovarianceSet: cell " + std::to_string(l) + " exceeds its power budget");
    }
}

CovarianceSet CovarianceSet::zeros(const EquivalentChannels &ch, Signaling s)
{
    CovarianceSet c;
    c.signaling = s;
    c.priv.resize(ch.num_cells());
    for (int l = 0; l < ch.num_cells(); ++l)
    {
        const int n = ch.tx_dim(l);
        c.priv[l].assign(ch.num_users(l), RealMatrix::Zero(n, n));
        c.common.push_back(RealMatrix::Zero(n, n));
    }
    return c;
}

CovarianceSet CovarianceSet::equal_split(const EquivalentChannels &ch, const std::vector<double> &budgets,
                                         Signaling s, bool with_common)
{
    CovarianceSet c = zeros(ch, s);
    for (int l = 0; l < ch.num_cells(); ++l)
    {
        const int n = ch.tx_dim(l);
        const int layers = ch.num_users(l) + (with_common ? 1 : 0);
        const RealMatrix block = RealMatrix::Identity(n, n) * (budgets.at(l) / layers / n);
        for (auto &p : c.priv[l])
            p = block;
        if (with_common)
            c.common[l] = block;
    }
    return c;
}

void PowerModel::validate() const
{
    if (!(static_power > 0.0))
        throw std::invalid_argument("PowerModel: p_c must be positive");
    if (!(inv_efficiency >= 1.0))
        throw std::invalid_argument("PowerModel: eta must be >= 1");
}

double log2det_spd(const RealMatrix &m)
{
    Eigen::LLT<RealMatrix> llt(0.5 * (m + m.transpose()));
    if (llt.info() != Eigen::Success)
        throw std::domain_error("log2det_spd: matrix is not positive definite");
    const auto d = llt.matrixLLT().diagonal().array().log();
    return 2.0 * d.sum() / std::log(2.0);
}

namespace
{

void require_psd(const RealMatrix &p)
{
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (p + p.transpose()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().size() > 0 && es.eigenvalues().minCoeff() < -1e-9 * std::max(1.0, p.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("interference_matrix: input covariance is not PSD");
}

} // namespace

RealMatrix interference_matrix(int l, int k, const CovarianceSet &cov, const EquivalentChannels &ch)
{
    for (int i = 0; i < cov.num_cells(); ++i)
    {
        require_psd(cov.common[i]);
        for (const auto &p : cov.priv[i])
            require_psd(p);
    }
    RealMatrix d = ch.noise.at(l).at(k);
    for (int i = 0; i < ch.num_cells(); ++i)
    {
        const RealMatrix &h = ch.h[l][k][i];
        if (i != l)
            d.noalias() += h * cov.total(i) * h.transpose();
    }
    const RealMatrix &h = ch.h[l][k][l];
    for (int j = 0; j < cov.num_users(l); ++j)
        if (j != k)
            d.noalias() += h * cov.priv[l][j] * h.transpose();
    return 0.5 * (d + d.transpose());
}

double private_rate(int l, int k, const CovarianceSet &cov, const EquivalentChannels &ch)
{
    const RealMatrix d = interference_matrix(l, k, cov, ch);
    const RealMatrix &h = ch.h[l][k][l];
    const RealMatrix signal = h * cov.priv[l][k] * h.transpose();
    // 1/2 log2 |I + D^{-1} S| = 1/2 (log2|D + S| - log2|D|)
    return std::max(0.0, 0.5 * (log2det_spd(d + signal) - log2det_spd(d)));
}

CommonCap common_rate_cap(int l, const CovarianceSet &cov, const EquivalentChannels &ch)
{
    CommonCap out;
    out.cap = std::numeric_limits<double>::infinity();
    for (int k = 0; k < ch.num_users(l); ++k)
    {
        const RealMatrix &h = ch.h[l][k][l];
        const RealMatrix base = interference_matrix(l, k, cov, ch) + h * cov.priv[l][k] * h.transpose();
        const RealMatrix with_common = base + h * cov.common[l] * h.transpose();
        const double r = std::max(0.0, 0.5 * (log2det_spd(with_common) - log2det_spd(base)));
        out.per_user.push_back(r);
        out.cap = std::min(out.cap, r);
    }
    return out;
}

RateBundle evaluate_rates(const CovarianceSet &cov, const EquivalentChannels &ch)
{
    RateBundle b;
    const int L = ch.num_cells();
    b.priv.resize(L);
    b.interference.resize(L);
    for (int l = 0; l < L; ++l)
    {
        for (int k = 0; k < ch.num_users(l); ++k)
        {
            b.interference[l].push_back(interference_matrix(l, k, cov, ch));
            b.priv[l].push_back(private_rate(l, k, cov, ch));
        }
        auto cap = common_rate_cap(l, cov, ch);
        b.common_per_user.push_back(std::move(cap.per_user));
        b.common_cap.push_back(cap.cap);
    }
    return b;
}

void check_allocation(const RateBundle &bundle, const CommonAllocation &rc, double tol)
{
    if (static_cast<int>(rc.size()) != bundle.num_cells())
        throw std::invalid_argument("common allocation: cell count mismatch");
    for (int l = 0; l < bundle.num_cells(); ++l)
    {
        if (static_cast<int>(rc[l].size()) != bundle.num_users(l))
            throw std::invalid_argument("common allocation: user count mismatch in cell " + std::to_string(l));
        double sum = 0.0;
        for (double r : rc[l])
        {
            if (r < -tol)
                throw std::invalid_argument("common allocation: negative share in cell " + std::to_string(l));
            sum += r;
        }
        if (sum > bundle.common_cap[l] + tol)
            throw std::invalid_argument("common allocation: cell " + std::to_string(l) +
                                        " exceeds the decodable common rate");
    }
}

double user_rate(int l, int k, const RateBundle &bundle, const CommonAllocation &rc)
{
    check_allocation(bundle, rc);
    return std::max(0.0, rc[l][k]) + bundle.priv[l][k];
}

double gee(const CovarianceSet &cov, const RateBundle &bundle, const CommonAllocation &rc, const PowerModel &pm)
{
    check_allocation(bundle, rc);
    double sum_rate = 0.0;
    int users = 0;
    for (int l = 0; l < bundle.num_cells(); ++l)
        for (int k = 0; k < bundle.num_users(l); ++k)
        {
            sum_rate += std::max(0.0, rc[l][k]) + bundle.priv[l][k];
            ++users;
        }
    return sum_rate / (users * pm.static_power + pm.inv_efficiency * cov.total_power());
}

double ee_user(int l, int k, const CovarianceSet &cov, const RateBundle &bundle, const CommonAllocation &rc,
               const PowerModel &pm)
{
    const double r = user_rate(l, k, bundle, rc);
    const double K = bundle.num_users(l);
    return r / (pm.static_power + pm.inv_efficiency * cov.priv[l][k].trace() +
                pm.inv_efficiency / K * cov.common[l].trace());
}

CommonAllocation zero_allocation(const RateBundle &bundle)
{
    CommonAllocation rc(bundle.num_cells());
    for (int l = 0; l < bundle.num_cells(); ++l)
        rc[l].assign(bundle.num_users(l), 0.0);
    return rc;
}

MaxMinAllocation allocate_common_maxmin(const RateBundle &bundle, const std::vector<std::vector<double>> &lambda)
{
    MaxMinAllocation out;
    out.rc = zero_allocation(bundle);
    out.value = std::numeric_limits<double>::infinity();
    for (int l = 0; l < bundle.num_cells(); ++l)
    {
        struct Item
        {
            int k;
            double breakpoint;
        };
        std::vector<Item> items;
        for (int k = 0; k < bundle.num_users(l); ++k)
            if (lambda[l][k] > 0.0)
                items.push_back({k, bundle.priv[l][k] / lambda[l][k]});
        if (items.empty())
            continue;
        std::sort(items.begin(), items.end(), [](const Item &a, const Item &b) { return a.breakpoint < b.breakpoint; });
        // water-fill the common cap over the users with the smallest private rate / weight
        const double cap = bundle.common_cap[l];
        double sum_lambda = 0.0, sum_rate = 0.0, level = 0.0;
        for (std::size_t j = 0; j < items.size(); ++j)
        {
            sum_lambda += lambda[l][items[j].k];
            sum_rate += bundle.priv[l][items[j].k];
            level = (cap + sum_rate) / sum_lambda;
            if (j + 1 == items.size() || level <= items[j + 1].breakpoint)
                break;
        }
        for (const auto &it : items)
            out.rc[l][it.k] = std::max(0.0, lambda[l][it.k] * level - bundle.priv[l][it.k]);
        // guard round-off against the decodability cap
        const double used = std::accumulate(out.rc[l].begin(), out.rc[l].end(), 0.0);
        if (used > cap && used > 0.0)
            for (auto &r : out.rc[l])
                r *= cap / used;
        for (const auto &it : items)
            out.value = std::min(out.value, (out.rc[l][it.k] + bundle.priv[l][it.k]) / lambda[l][it.k]);
    }
    return out;
}

ThresholdAllocation allocate_common_thresholds(const RateBundle &bundle,
                                               const std::vector<std::vector<double>> &thresholds)
{
    ThresholdAllocation out;
    out.rc = zero_allocation(bundle);
    out.feasible = true;
    for (int l = 0; l < bundle.num_cells(); ++l)
    {
        double need = 0.0;
        for (int k = 0; k < bundle.num_users(l); ++k)
        {
            out.rc[l][k] = std::max(0.0, thresholds[l][k] - bundle.priv[l][k]);
            need += out.rc[l][k];
        }
        const double cap = bundle.common_cap[l];
        if (need > cap + 1e-9 * (1.0 + cap))
        {
            out.feasible = false;
            continue;
        }
        if (need > cap)
        {
            // round-off shortfall at an active target
            for (auto &r : out.rc[l])
                r *= cap / need;
            continue;
        }
        const double share = (cap - need) / bundle.num_users(l);
        for (auto &r : out.rc[l])
            r += share;
    }
    return out;
}

} // namespace rsris
