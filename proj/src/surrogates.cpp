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

#include "rsris/surrogates.hpp"

#include <cmath>
#include <stdexcept>

namespace rsris
{

const RealMatrix &block_of(const CovarianceSet &cov, BlockRef b)
{
    return b.is_common() ? cov.common.at(b.cell) : cov.priv.at(b.cell).at(b.user);
}

RealMatrix &block_of(CovarianceSet &cov, BlockRef b)
{
    return b.is_common() ? cov.common.at(b.cell) : cov.priv.at(b.cell).at(b.user);
}

std::vector<BlockRef> all_blocks(const CovarianceSet &cov)
{
    std::vector<BlockRef> out;
    for (int l = 0; l < cov.num_cells(); ++l)
    {
        for (int k = 0; k < cov.num_users(l); ++k)
            out.push_back({l, k});
        out.push_back({l, -1});
    }
    return out;
}

namespace
{

double ln_det(const RealMatrix &m)
{
    Eigen::LLT<RealMatrix> llt(m);
    if (llt.info() != Eigen::Success)
        throw std::domain_error("log-det argument is not positive definite");
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

RealMatrix jittered_inverse(const RealMatrix &m)
{
    const RealMatrix j = m + kInverseJitter * RealMatrix::Identity(m.rows(), m.cols());
    Eigen::LLT<RealMatrix> llt(j);
    if (llt.info() != Eigen::Success)
        throw std::domain_error("expansion point: singular interference-plus-noise matrix");
    return llt.solve(RealMatrix::Identity(m.rows(), m.cols()));
}

RealMatrix sym(const RealMatrix &m) { return 0.5 * (m + m.transpose()); }

// Blocks seen by user (l,k) after removing its own common layer, with the
// private block of (l,k) optionally excluded.
std::vector<CovTerm> private_side_terms(int l, int k, const CovarianceSet &cov, const EquivalentChannels &ch,
                                        bool include_own)
{
    std::vector<CovTerm> terms;
    for (int i = 0; i < cov.num_cells(); ++i)
    {
        const RealMatrix &h = ch.h[l][k][i];
        for (int j = 0; j < cov.num_users(i); ++j)
            if (i != l || j != k || include_own)
                terms.push_back({{i, j}, h});
        if (i != l)
            terms.push_back({{i, -1}, h});
    }
    return terms;
}

// tangent-plane bound of  ln|noise + sum h P h'|  rewritten as constant + linear terms
void subtract_linearized(ConcaveRateSurrogate &s, const RealMatrix &noise, const std::vector<CovTerm> &terms,
                         const CovarianceSet &at)
{
    std::vector<RealMatrix> b, p;
    for (const auto &t : terms)
    {
        b.push_back(t.h);
        p.push_back(block_of(at, t.block));
    }
    const auto lin = logdet_linear_upper(noise, b, p);
    s.constant -= kHalfLog2e * lin.value;
    for (std::size_t i = 0; i < terms.size(); ++i)
    {
        s.constant += kHalfLog2e * (lin.gradient[i].cwiseProduct(lin.expansion[i])).sum();
        s.linear.emplace_back(terms[i].block, kHalfLog2e * lin.gradient[i]);
    }
}

} // namespace

double LinearizedLogDet::evaluate(const std::vector<RealMatrix> &p) const
{
    if (p.size() != gradient.size())
        throw std::invalid_argument("LinearizedLogDet::evaluate: block count mismatch");
    double v = value;
    for (std::size_t i = 0; i < p.size(); ++i)
        v += gradient[i].cwiseProduct(p[i] - expansion[i]).sum();
    return v;
}

LinearizedLogDet logdet_linear_upper(const RealMatrix &a, const std::vector<RealMatrix> &b,
                                     const std::vector<RealMatrix> &p_t)
{
    if (b.size() != p_t.size())
        throw std::invalid_argument("logdet_linear_upper: block count mismatch");
    RealMatrix m = a;
    for (std::size_t i = 0; i < b.size(); ++i)
    {
        if (b[i].cols() != p_t[i].rows() || b[i].rows() != a.rows())
            throw std::invalid_argument("logdet_linear_upper: dimension mismatch");
        m += b[i] * p_t[i] * b[i].transpose();
    }
    m = sym(m);
    LinearizedLogDet out;
    out.value = ln_det(m);
    const RealMatrix inv = jittered_inverse(m);
    for (std::size_t i = 0; i < b.size(); ++i)
    {
        out.gradient.push_back(sym(b[i].transpose() * inv * b[i]));
        out.expansion.push_back(p_t[i]);
    }
    return out;
}

double ConcaveRateSurrogate::evaluate(const CovarianceSet &cov) const
{
    RealMatrix m = base;
    for (const auto &t : logdet_terms)
        m += t.h * block_of(cov, t.block) * t.h.transpose();
    double v = constant + kHalfLog2e * ln_det(sym(m));
    for (const auto &[b, c] : linear)
        v -= c.cwiseProduct(block_of(cov, b)).sum();
    return v;
}

CovarianceExpansion CovarianceExpansion::at(const CovarianceSet &cov, const EquivalentChannels &ch)
{
    CovarianceExpansion ep;
    ep.cov = cov;
    ep.channels = ch;
    ep.d.resize(cov.num_cells());
    ep.d_with_own.resize(cov.num_cells());
    for (int l = 0; l < cov.num_cells(); ++l)
        for (int k = 0; k < cov.num_users(l); ++k)
        {
            RealMatrix d = interference_matrix(l, k, cov, ch);
            const RealMatrix &h = ch.h[l][k][l];
            RealMatrix dp = sym(d + h * cov.priv[l][k] * h.transpose());
            jittered_inverse(d); // fails early on a singular expansion point
            ep.d[l].push_back(std::move(d));
            ep.d_with_own[l].push_back(std::move(dp));
        }
    return ep;
}

ConcaveRateSurrogate private_rate_surrogate(int l, int k, const CovarianceExpansion &ep)
{
    ConcaveRateSurrogate s;
    s.base = ep.channels.noise[l][k];
    s.logdet_terms = private_side_terms(l, k, ep.cov, ep.channels, true);
    subtract_linearized(s, ep.channels.noise[l][k], private_side_terms(l, k, ep.cov, ep.channels, false), ep.cov);
    return s;
}

ConcaveRateSurrogate common_rate_surrogate(int l, int k, const CovarianceExpansion &ep)
{
    ConcaveRateSurrogate s;
    s.base = ep.channels.noise[l][k];
    s.logdet_terms = private_side_terms(l, k, ep.cov, ep.channels, true);
    s.logdet_terms.push_back({{l, -1}, ep.channels.h[l][k][l]});
    subtract_linearized(s, ep.channels.noise[l][k], private_side_terms(l, k, ep.cov, ep.channels, true), ep.cov);
    return s;
}

ThetaModel ThetaModel::build(const FadingSet &f, const UserSpaceMap &map, const HardwareModel &hw, bool star)
{
    ThetaModel m;
    m.layout = ThetaLayout::of(f, star);
    m.h = build_affine_channels(f, m.layout, map, hw);
    m.noise.resize(f.num_cells());
    for (int l = 0; l < f.num_cells(); ++l)
        for (int k = 0; k < f.num_users(l); ++k)
            m.noise[l].push_back(noise_covariance(NoiseModel{1.0, hw.user[l][k]}, f.user_antennas(l, k)));
    return m;
}

EquivalentChannels ThetaModel::at(const RealVector &x) const
{
    EquivalentChannels ch;
    ch.noise = noise;
    ch.h.resize(h.size());
    for (std::size_t l = 0; l < h.size(); ++l)
        for (const auto &links : h[l])
        {
            std::vector<RealMatrix> row;
            for (const auto &a : links)
                row.push_back(a.at(x));
            ch.h[l].push_back(std::move(row));
        }
    return ch;
}

namespace
{

// Adds  -tr(W H(x) P H(x)')  to the surrogate, H(x) = base + sum x_a S_a.
void subtract_trace_quadratic(QuadraticSurrogate &s, const RealMatrix &w, const AffineRealChannel &h,
                              const RealMatrix &p)
{
    if (p.cwiseAbs().maxCoeff() == 0.0)
        return;
    const RealMatrix wp_base = w * h.base * p;
    s.constant -= wp_base.cwiseProduct(h.base).sum();
    const std::size_t n = h.slopes.size();
    if (n == 0)
        return;
    const Eigen::Index d = h.base.size();
    RealMatrix svec(d, static_cast<Eigen::Index>(n)), xvec(d, static_cast<Eigen::Index>(n));
    for (std::size_t a = 0; a < n; ++a)
    {
        const RealMatrix &sa = h.slopes[a].second;
        s.linear(h.slopes[a].first) -= 2.0 * sa.cwiseProduct(wp_base).sum();
        svec.col(static_cast<Eigen::Index>(a)) = Eigen::Map<const RealVector>(sa.data(), d);
        const RealMatrix x = w * sa * p;
        xvec.col(static_cast<Eigen::Index>(a)) = Eigen::Map<const RealVector>(x.data(), d);
    }
    const RealMatrix q = xvec.transpose() * svec; // q(a,b) = <S_b, W S_a P>
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            s.quad(h.slopes[a].first, h.slopes[b].first) += 0.5 * (q(a, b) + q(b, a));
}

} // namespace

QuadraticSurrogate theta_rate_surrogate(int l, int k, RateKind kind, const ThetaModel &model,
                                        const CovarianceSet &cov, const RealVector &x_bar)
{
    const int n = model.num_vars();
    if (x_bar.size() != n)
        throw std::invalid_argument("theta_rate_surrogate: expansion vector has wrong size");
    const auto &links = model.h.at(l).at(k);
    const RealMatrix &noise = model.noise[l][k];

    // Y (interference-plus-noise) and the stream covariance carried by V.
    std::vector<RealMatrix> y_cov(cov.num_cells()), all_cov(cov.num_cells());
    for (int i = 0; i < cov.num_cells(); ++i)
        all_cov[i] = i == l ? RealMatrix(cov.total(i) - cov.common[i]) : cov.total(i);
    RealMatrix v_cov;
    y_cov = all_cov;
    if (kind == RateKind::private_rate)
    {
        y_cov[l] -= cov.priv[l][k];
        v_cov = cov.priv[l][k];
    }
    else
    {
        all_cov[l] += cov.common[l];
        v_cov = cov.common[l];
    }

    RealMatrix y_bar = noise;
    for (int i = 0; i < cov.num_cells(); ++i)
    {
        const RealMatrix hi = links[i].at(x_bar);
        y_bar += hi * y_cov[i] * hi.transpose();
    }
    y_bar = sym(y_bar);
    const RealMatrix r = psd_sqrt(v_cov);
    const RealMatrix v_bar = links[l].at(x_bar) * r;
    const RealMatrix y_inv = jittered_inverse(y_bar);
    const RealMatrix total_inv = jittered_inverse(sym(y_bar + v_bar * v_bar.transpose()));
    const RealMatrix w = sym(y_inv - total_inv);

    QuadraticSurrogate s;
    s.linear = RealVector::Zero(n);
    s.quad = RealMatrix::Zero(n, n);
    const RealMatrix vyv = v_bar.transpose() * y_inv * v_bar;
    s.constant = ln_det(sym(RealMatrix::Identity(vyv.rows(), vyv.cols()) + vyv)) - vyv.trace();

    // 2 tr(Vbar' Ybar^-1 V(x)) = 2 <H_l(x), Ybar^-1 Vbar R>
    const RealMatrix g = y_inv * v_bar * r;
    s.constant += 2.0 * links[l].base.cwiseProduct(g).sum();
    for (const auto &[a, sa] : links[l].slopes)
        s.linear(a) += 2.0 * sa.cwiseProduct(g).sum();

    // - tr(W (V V' + Y))
    s.constant -= w.cwiseProduct(noise).sum();
    for (int i = 0; i < cov.num_cells(); ++i)
        subtract_trace_quadratic(s, w, links[i], all_cov[i]);

    s.constant *= kHalfLog2e;
    s.linear *= kHalfLog2e;
    s.quad = sym(s.quad) * kHalfLog2e;
    return s;
}

double ModulusLowerBound::evaluate(const ComplexVector &t) const
{
    if (t.size() != coef.size())
        throw std::invalid_argument("ModulusLowerBound::evaluate: size mismatch");
    return constant + 2.0 * coef.dot(t).real(); // Eigen's dot conjugates the first argument
}

ModulusLowerBound quadratic_modulus_lower(const ComplexVector &t_n)
{
    ModulusLowerBound b;
    b.coef = t_n;
    b.constant = -t_n.squaredNorm();
    return b;
}

} // namespace rsris
