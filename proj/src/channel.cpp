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

#include "rsris/channel.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace rsris
{

namespace
{

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double path_gain(double reference_loss_db, double exponent, double d)
{
    return db_to_linear(reference_loss_db) * std::pow(d, -exponent);
}

ComplexMatrix complex_gaussian(std::mt19937_64 &gen, int rows, int cols)
{
    std::normal_distribution<double> n01(0.0, std::sqrt(0.5));
    ComplexMatrix m(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r)
        {
            const double re = n01(gen);
            const double im = n01(gen);
            m(r, c) = Complex(re, im);
        }
    return m;
}

// Half-wavelength ULA along the x axis.
ComplexVector steering(int n, double azimuth)
{
    ComplexVector a(n);
    for (int i = 0; i < n; ++i)
        a(i) = std::polar(1.0, std::numbers::pi * i * std::sin(azimuth));
    return a;
}

double azimuth(const Position &from, const Position &to) { return std::atan2(to.y - from.y, to.x - from.x); }

// Rician link from `tx` (n_tx antennas) to `rx` (n_rx antennas).
ComplexMatrix rician_link(std::mt19937_64 &gen, const Position &tx, int n_tx, const Position &rx, int n_rx,
                          double gain, double kappa)
{
    const ComplexMatrix los = steering(n_rx, azimuth(rx, tx)) * steering(n_tx, azimuth(tx, rx)).adjoint();
    const ComplexMatrix nlos = complex_gaussian(gen, n_rx, n_tx);
    return std::sqrt(gain) * (std::sqrt(kappa / (1.0 + kappa)) * los + std::sqrt(1.0 / (1.0 + kappa)) * nlos);
}

} // namespace

double distance(const Position &a, const Position &b)
{
    return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

int Topology::total_users() const
{
    int n = 0;
    for (int k : users_per_cell)
        n += k;
    return n;
}

void Topology::validate() const
{
    const int L = num_cells();
    if (L < 1)
        throw std::invalid_argument("topology: at least one BS is required");
    if (static_cast<int>(bs_antennas.size()) != L)
        throw std::invalid_argument("topology: bs_antennas size mismatch");
    if (num_ris() < L)
        throw std::invalid_argument("topology: at least one RIS per cell is required (M >= L)");
    if (static_cast<int>(ris_elements.size()) != num_ris())
        throw std::invalid_argument("topology: ris_elements size mismatch");
    if (static_cast<int>(users_per_cell.size()) != L || static_cast<int>(user_antennas.size()) != L)
        throw std::invalid_argument("topology: per-cell user lists size mismatch");
    for (int l = 0; l < L; ++l)
    {
        if (users_per_cell[l] < 1)
            throw std::invalid_argument("topology: K must be >= 1 in cell " + std::to_string(l));
        if (static_cast<int>(user_antennas[l].size()) != users_per_cell[l])
            throw std::invalid_argument("topology: user_antennas size mismatch in cell " + std::to_string(l));
        for (int n : user_antennas[l])
            if (n < 1)
                throw std::invalid_argument("topology: user antennas must be >= 1");
        if (bs_antennas[l] < 1)
            throw std::invalid_argument("topology: BS antennas must be >= 1");
    }
    for (int n : ris_elements)
        if (n < 0)
            throw std::invalid_argument("topology: RIS elements must be >= 0");
    for (const auto &p : bs_positions)
        if (!(p.z > 0.0))
            throw std::invalid_argument("topology: BS heights must be positive");
    for (const auto &p : ris_positions)
        if (!(p.z > 0.0))
            throw std::invalid_argument("topology: RIS heights must be positive");
    if (!(user_height > 0.0) || !(user_square_side > 0.0))
        throw std::invalid_argument("topology: user height and square side must be positive");
}

Topology Topology::two_cell(int users_per_cell, int n_bs, int n_user, int n_ris)
{
    Topology t;
    t.bs_positions = {{0.0, 0.0, 25.0}, {400.0, 0.0, 25.0}};
    t.bs_antennas = {n_bs, n_bs};
    t.ris_positions = {{180.0, 0.0, 15.0}, {220.0, 0.0, 15.0}};
    t.ris_elements = {n_ris, n_ris};
    t.users_per_cell = {users_per_cell, users_per_cell};
    t.user_antennas.assign(2, std::vector<int>(std::max(users_per_cell, 0), n_user));
    return t;
}

Topology Topology::single_cell(int users, int n_bs, int n_user, int n_ris)
{
    Topology t;
    t.bs_positions = {{0.0, 0.0, 25.0}};
    t.bs_antennas = {n_bs};
    t.ris_positions = {{180.0, 0.0, 15.0}};
    t.ris_elements = {n_ris};
    t.users_per_cell = {users};
    t.user_antennas.assign(1, std::vector<int>(std::max(users, 0), n_user));
    return t;
}

void FadingParams::validate() const
{
    if (!(direct_exponent > 0.0) || !(ris_exponent > 0.0))
        throw std::invalid_argument("fading: path-loss exponents must be positive");
    if (transmission_side_users < 0)
        throw std::invalid_argument("fading: transmission_side_users must be >= 0");
}

FadingSet FadingSet::without_ris() const
{
    FadingSet out = *this;
    for (auto &cell : out.ris_rx)
        for (auto &user : cell)
            for (auto &g : user)
                g.setZero();
    for (auto &ris : out.ris_tx)
        for (auto &g : ris)
            g.setZero();
    return out;
}

FadingSet FadingSet::block_transmission_side(const std::vector<std::vector<bool>> &transmission_side) const
{
    FadingSet out = *this;
    for (int l = 0; l < num_cells(); ++l)
        for (int k = 0; k < num_users(l); ++k)
            if (transmission_side.at(l).at(k))
                for (auto &g : out.ris_rx[l][k])
                    g.setZero();
    return out;
}

bool bitwise_equal(const FadingSet &a, const FadingSet &b)
{
    auto same = [](const ComplexMatrix &x, const ComplexMatrix &y) {
        return x.rows() == y.rows() && x.cols() == y.cols() && (x.array() == y.array()).all();
    };
    if (a.noise_power != b.noise_power || a.num_cells() != b.num_cells() || a.num_ris() != b.num_ris())
        return false;
    for (int l = 0; l < a.num_cells(); ++l)
    {
        if (a.num_users(l) != b.num_users(l))
            return false;
        for (int k = 0; k < a.num_users(l); ++k)
        {
            for (int i = 0; i < a.num_cells(); ++i)
                if (!same(a.direct[l][k][i], b.direct[l][k][i]))
                    return false;
            for (int m = 0; m < a.num_ris(); ++m)
                if (!same(a.ris_rx[l][k][m], b.ris_rx[l][k][m]))
                    return false;
        }
    }
    for (int m = 0; m < a.num_ris(); ++m)
        for (int i = 0; i < a.num_cells(); ++i)
            if (!same(a.ris_tx[m][i], b.ris_tx[m][i]))
                return false;
    return true;
}

FadingSet sample_scenario(const Topology &topology, const FadingParams &params, std::uint64_t seed)
{
    topology.validate();
    params.validate();
    std::mt19937_64 gen(seed);
    const int L = topology.num_cells();
    const int M = topology.num_ris();
    const double kappa = db_to_linear(params.rician_k_db);
    const double half = 0.5 * topology.user_square_side;

    FadingSet f;
    f.noise_power = db_to_linear(params.noise_power_dbm) * 1e-3;

    std::uniform_real_distribution<double> offset(-half, half);
    f.user_positions.resize(L);
    for (int l = 0; l < L; ++l)
        for (int k = 0; k < topology.num_users(l); ++k)
        {
            const Position &c = topology.ris_positions[l];
            const double dx = offset(gen);
            const double dy = offset(gen);
            f.user_positions[l].push_back({c.x + dx, c.y + dy, topology.user_height});
        }

    f.direct.resize(L);
    for (int l = 0; l < L; ++l)
        for (int k = 0; k < topology.num_users(l); ++k)
        {
            std::vector<ComplexMatrix> links;
            for (int i = 0; i < L; ++i)
            {
                const double d = distance(topology.bs_positions[i], f.user_positions[l][k]);
                const double g = path_gain(params.reference_loss_db, params.direct_exponent, d);
                links.push_back(std::sqrt(g) *
                                complex_gaussian(gen, topology.user_antennas[l][k], topology.bs_antennas[i]));
            }
            f.direct[l].push_back(std::move(links));
        }

    f.ris_tx.resize(M);
    for (int m = 0; m < M; ++m)
        for (int i = 0; i < L; ++i)
        {
            const double d = distance(topology.bs_positions[i], topology.ris_positions[m]);
            const double g = path_gain(params.reference_loss_db, params.ris_exponent, d);
            f.ris_tx[m].push_back(rician_link(gen, topology.bs_positions[i], topology.bs_antennas[i],
                                              topology.ris_positions[m], topology.ris_elements[m], g, kappa));
        }

    f.ris_rx.resize(L);
    for (int l = 0; l < L; ++l)
        for (int k = 0; k < topology.num_users(l); ++k)
        {
            std::vector<ComplexMatrix> links;
            for (int m = 0; m < M; ++m)
            {
                const double d = distance(topology.ris_positions[m], f.user_positions[l][k]);
                const double g = path_gain(params.reference_loss_db, params.ris_exponent, d);
                links.push_back(rician_link(gen, topology.ris_positions[m], topology.ris_elements[m],
                                            f.user_positions[l][k], topology.user_antennas[l][k], g, kappa));
            }
            f.ris_rx[l].push_back(std::move(links));
        }

    return params.ris_enabled ? f : f.without_ris();
}

const char *to_string(SetKind kind)
{
    switch (kind)
    {
    case SetKind::unit_disk:
        return "U";
    case SetKind::unit_modulus:
        return "I";
    case SetKind::coupled_phase:
        return "C";
    case SetKind::discrete_phase:
        return "D";
    case SetKind::star_es:
        return "STAR";
    }
    return "?";
}

ThetaSet ThetaSet::zeros(const FadingSet &f, SetKind kind)
{
    ThetaSet t;
    t.kind = kind;
    for (int m = 0; m < f.num_ris(); ++m)
    {
        t.reflect.push_back(ComplexVector::Zero(f.ris_elements(m)));
        if (kind == SetKind::star_es)
            t.transmit.push_back(ComplexVector::Zero(f.ris_elements(m)));
    }
    return t;
}

UserSpaceMap default_space_map(const FadingSet &f, int transmission_side_users)
{
    UserSpaceMap map(f.num_cells());
    for (int l = 0; l < f.num_cells(); ++l)
    {
        const int K = f.num_users(l);
        for (int k = 0; k < K; ++k)
            map[l].push_back(k >= K - transmission_side_users ? UserSpace::transmission : UserSpace::reflection);
    }
    return map;
}

namespace
{

void check_link_indices(const FadingSet &f, int l, int k, int i)
{
    if (l < 0 || l >= f.num_cells() || k < 0 || k >= f.num_users(l) || i < 0 || i >= f.num_cells())
        throw std::out_of_range("channel: link index out of range");
}

ComplexMatrix through_ris(const FadingSet &f, const std::vector<ComplexVector> &coeffs, int l, int k, int i)
{
    ComplexMatrix h = f.direct[l][k][i];
    if (static_cast<int>(coeffs.size()) != f.num_ris())
        throw std::invalid_argument("channel: coefficient set has " + std::to_string(coeffs.size()) +
                                    " RIS entries, fading has " + std::to_string(f.num_ris()));
    for (int m = 0; m < f.num_ris(); ++m)
    {
        if (coeffs[m].size() != f.ris_elements(m))
            throw std::invalid_argument("channel: RIS " + std::to_string(m) + " coefficient length mismatch");
        h.noalias() += f.ris_rx[l][k][m] * coeffs[m].asDiagonal() * f.ris_tx[m][i];
    }
    return h;
}

} // namespace

ComplexMatrix assemble_effective_channel(const FadingSet &f, const ThetaSet &t, int l, int k, int i)
{
    check_link_indices(f, l, k, i);
    return through_ris(f, t.reflect, l, k, i);
}

ComplexMatrix assemble_star_channel(const FadingSet &f, const ThetaSet &t, const UserSpaceMap &map, int l, int k,
                                    int i)
{
    check_link_indices(f, l, k, i);
    if (!t.is_star())
        throw std::invalid_argument("assemble_star_channel: coefficient set is not STAR");
    if (l >= static_cast<int>(map.size()) || k >= static_cast<int>(map[l].size()))
        throw std::invalid_argument("assemble_star_channel: user (" + std::to_string(l) + "," + std::to_string(k) +
                                    ") missing from the space map");
    return through_ris(f, map[l][k] == UserSpace::reflection ? t.reflect : t.transmit, l, k, i);
}

HardwareModel HardwareModel::ideal(const FadingSet &f) { return uniform(f, 1.0, 0.0); }

HardwareModel HardwareModel::uniform(const FadingSet &f, double epsilon, double phi)
{
    HardwareModel hw;
    for (int i = 0; i < f.num_cells(); ++i)
        hw.bs.push_back(IqiParams::uniform(f.bs_antennas(i), epsilon, phi, DeviceSide::transmitter));
    hw.user.resize(f.num_cells());
    for (int l = 0; l < f.num_cells(); ++l)
        for (int k = 0; k < f.num_users(l); ++k)
            hw.user[l].push_back(IqiParams::uniform(f.user_antennas(l, k), epsilon, phi, DeviceSide::receiver));
    return hw;
}

EquivalentChannels build_equivalent_channels(const FadingSet &f, const ThetaSet &t, const UserSpaceMap &map,
                                             const HardwareModel &hw)
{
    const double scale = 1.0 / std::sqrt(f.noise_power);
    std::vector<RealMatrix> tx_maps;
    for (const auto &p : hw.bs)
        tx_maps.push_back(iqi_real_map(p));

    EquivalentChannels ch;
    ch.h.resize(f.num_cells());
    ch.noise.resize(f.num_cells());
    for (int l = 0; l < f.num_cells(); ++l)
        for (int k = 0; k < f.num_users(l); ++k)
        {
            const RealMatrix rx_map = iqi_real_map(hw.user[l][k]);
            std::vector<RealMatrix> links;
            for (int i = 0; i < f.num_cells(); ++i)
            {
                const ComplexMatrix h = t.is_star() ? assemble_star_channel(f, t, map, l, k, i)
                                                    : assemble_effective_channel(f, t, l, k, i);
                links.push_back(iqi_equivalent_channel(scale * h, tx_maps[i], rx_map));
            }
            ch.h[l].push_back(std::move(links));
            ch.noise[l].push_back(noise_covariance(NoiseModel{1.0, hw.user[l][k]}, f.user_antennas(l, k)));
        }
    return ch;
}

ThetaLayout ThetaLayout::of(const FadingSet &f, bool star)
{
    ThetaLayout layout;
    layout.star = star;
    for (int m = 0; m < f.num_ris(); ++m)
        layout.elements.push_back(f.ris_elements(m));
    return layout;
}

int ThetaLayout::size() const
{
    int n = 0;
    for (int e : elements)
        n += e;
    return n * (star ? 4 : 2);
}

int ThetaLayout::offset(int m, int n, UserSpace space) const
{
    const int stride = star ? 4 : 2;
    int base = 0;
    for (int j = 0; j < m; ++j)
        base += elements[j] * stride;
    return base + n * stride + (star && space == UserSpace::transmission ? 2 : 0);
}

RealVector theta_to_vector(const ThetaSet &t, const ThetaLayout &layout)
{
    RealVector x(layout.size());
    for (int m = 0; m < static_cast<int>(layout.elements.size()); ++m)
        for (int n = 0; n < layout.elements[m]; ++n)
        {
            const int r = layout.offset(m, n, UserSpace::reflection);
            x(r) = t.reflect[m](n).real();
            x(r + 1) = t.reflect[m](n).imag();
            if (layout.star)
            {
                const int s = layout.offset(m, n, UserSpace::transmission);
                x(s) = t.transmit[m](n).real();
                x(s + 1) = t.transmit[m](n).imag();
            }
        }
    return x;
}

ThetaSet vector_to_theta(const RealVector &x, const ThetaLayout &layout, SetKind kind)
{
    if (x.size() != layout.size())
        throw std::invalid_argument("vector_to_theta: length mismatch");
    ThetaSet t;
    t.kind = kind;
    for (int m = 0; m < static_cast<int>(layout.elements.size()); ++m)
    {
        ComplexVector r(layout.elements[m]), s(layout.elements[m]);
        for (int n = 0; n < layout.elements[m]; ++n)
        {
            const int i = layout.offset(m, n, UserSpace::reflection);
            r(n) = Complex(x(i), x(i + 1));
            if (layout.star)
            {
                const int j = layout.offset(m, n, UserSpace::transmission);
                s(n) = Complex(x(j), x(j + 1));
            }
        }
        t.reflect.push_back(r);
        if (layout.star)
            t.transmit.push_back(s);
    }
    return t;
}

RealMatrix AffineRealChannel::at(const RealVector &x) const
{
    RealMatrix h = base;
    for (const auto &[index, slope] : slopes)
        h += x(index) * slope;
    return h;
}

std::vector<std::vector<std::vector<AffineRealChannel>>> build_affine_channels(const FadingSet &f,
                                                                               const ThetaLayout &layout,
                                                                               const UserSpaceMap &map,
                                                                               const HardwareModel &hw)
{
    const double scale = 1.0 / std::sqrt(f.noise_power);
    std::vector<RealMatrix> tx_maps;
    for (const auto &p : hw.bs)
        tx_maps.push_back(iqi_real_map(p));

    std::vector<std::vector<std::vector<AffineRealChannel>>> out(f.num_cells());
    for (int l = 0; l < f.num_cells(); ++l)
        for (int k = 0; k < f.num_users(l); ++k)
        {
            const RealMatrix rx_map = iqi_real_map(hw.user[l][k]);
            const UserSpace space = layout.star ? map.at(l).at(k) : UserSpace::reflection;
            std::vector<AffineRealChannel> links;
            for (int i = 0; i < f.num_cells(); ++i)
            {
                AffineRealChannel a;
                a.base = iqi_equivalent_channel(scale * f.direct[l][k][i], tx_maps[i], rx_map);
                for (int m = 0; m < f.num_ris(); ++m)
                    for (int n = 0; n < f.ris_elements(m); ++n)
                    {
                        const ComplexMatrix outer = scale * f.ris_rx[l][k][m].col(n) * f.ris_tx[m][i].row(n);
                        if (outer.cwiseAbs().maxCoeff() == 0.0)
                            continue;
                        const int idx = layout.offset(m, n, space);
                        a.slopes.emplace_back(idx, iqi_equivalent_channel(outer, tx_maps[i], rx_map));
                        a.slopes.emplace_back(idx + 1,
                                              iqi_equivalent_channel(Complex(0.0, 1.0) * outer, tx_maps[i], rx_map));
                    }
                links.push_back(std::move(a));
            }
            out[l].push_back(std::move(links));
        }
    return out;
}

} // namespace rsris
