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

#ifndef RSRIS_SURROGATES_HPP
#define RSRIS_SURROGATES_HPP

// Minorizers of the rates used by the MM iterations.
//
// Covariance step: the rates are differences of concave log-dets; the
// subtracted one is replaced by its tangent plane. RIS step: the rate is
// bounded from below by a concave quadratic of the real RIS coefficient vector.

#include "rsris/channel.hpp"
#include "rsris/rates.hpp"
#include "rsris/realdec.hpp"

#include <vector>

namespace rsris
{

inline constexpr double kHalfLog2e = 0.72134752044448170368; // 1 / (2 ln 2)

// Numerical jitter added before inverting D or Ybar.
inline constexpr double kInverseJitter = 1e-10;

/// Addresses one covariance block: private stream `user` of `cell`, or the
/// common stream when `user < 0`.
struct BlockRef
{
    int cell = 0;
    int user = -1;

    bool is_common() const { return user < 0; }
    bool operator==(const BlockRef &) const = default;
};

const RealMatrix &block_of(const CovarianceSet &cov, BlockRef b);
RealMatrix &block_of(CovarianceSet &cov, BlockRef b);
/// Every block of every cell, private blocks first, then the common block.
std::vector<BlockRef> all_blocks(const CovarianceSet &cov);

// ln|A + sum_i B_i P_i B_i'| <= value + sum_i tr(G_i (P_i - P_i^t)).
struct LinearizedLogDet
{
    double value = 0.0;
    std::vector<RealMatrix> gradient;  // G_i = B_i' M^-1 B_i
    std::vector<RealMatrix> expansion; // P_i^t

    double evaluate(const std::vector<RealMatrix> &p) const;
};

LinearizedLogDet logdet_linear_upper(const RealMatrix &a, const std::vector<RealMatrix> &b,
                                     const std::vector<RealMatrix> &p_t);

struct CovTerm
{
    BlockRef block;
    RealMatrix h; // contributes h P h'
};

// constant + ln det(base + sum h P h') / (2 ln 2) - sum tr(C P), in bits.
struct ConcaveRateSurrogate
{
    double constant = 0.0;
    RealMatrix base;
    std::vector<CovTerm> logdet_terms;
    std::vector<std::pair<BlockRef, RealMatrix>> linear;

    double evaluate(const CovarianceSet &cov) const;
};

// Snapshot {P^(t-1)} with the quantities every covariance surrogate reuses.
struct CovarianceExpansion
{
    CovarianceSet cov;
    EquivalentChannels channels;
    std::vector<std::vector<RealMatrix>> d;          // D_lk
    std::vector<std::vector<RealMatrix>> d_with_own; // D_lk + H P_lk H'

    static CovarianceExpansion at(const CovarianceSet &cov, const EquivalentChannels &ch);
};

ConcaveRateSurrogate private_rate_surrogate(int l, int k, const CovarianceExpansion &ep);
ConcaveRateSurrogate common_rate_surrogate(int l, int k, const CovarianceExpansion &ep);

/// The RIS-dependent system: channels affine in the real coefficient vector.
struct ThetaModel
{
    ThetaLayout layout;
    std::vector<std::vector<std::vector<AffineRealChannel>>> h; // [l][k][i]
    std::vector<std::vector<RealMatrix>> noise;                 // [l][k]

    static ThetaModel build(const FadingSet &f, const UserSpaceMap &map, const HardwareModel &hw, bool star);
    EquivalentChannels at(const RealVector &x) const;
    int num_vars() const { return layout.size(); }
};

enum class RateKind
{
    private_rate,
    common_rate
};

// constant + linear' x - x' quad x (quad symmetric PSD), in bits.
struct QuadraticSurrogate
{
    double constant = 0.0;
    RealVector linear;
    RealMatrix quad;

    double value(const RealVector &x) const { return constant + linear.dot(x) - x.dot(quad * x); }
    RealVector gradient(const RealVector &x) const { return linear - 2.0 * quad * x; }
};

/// Lower bound on r_{lk,p} (or rbar_{lk,c}) as a function of the RIS vector,
/// tight at `x_bar` for the fixed covariances `cov`.
QuadraticSurrogate theta_rate_surrogate(int l, int k, RateKind kind, const ThetaModel &model,
                                        const CovarianceSet &cov, const RealVector &x_bar);

// sum |t_i|^2 >= constant + 2 Re(coef^H t), tight at t = t^(n).
struct ModulusLowerBound
{
    double constant = 0.0;
    ComplexVector coef;

    double evaluate(const ComplexVector &t) const;
};

ModulusLowerBound quadratic_modulus_lower(const ComplexVector &t_n);

} // namespace rsris

#endif
