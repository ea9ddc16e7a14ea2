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

#ifndef RSRIS_CHANNEL_HPP
#define RSRIS_CHANNEL_HPP

#include "rsris/realdec.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace rsris
{

struct Position
{
    double x = 0.0, y = 0.0, z = 0.0;
};

double distance(const Position &a, const Position &b);

// Node placement and antenna counts. Users of cell l are dropped uniformly in a
// square of side `user_square_side` centred (in x-y) on RIS l at `user_height`.
struct Topology
{
    std::vector<Position> bs_positions;
    std::vector<int> bs_antennas;
    std::vector<Position> ris_positions;
    std::vector<int> ris_elements;
    std::vector<int> users_per_cell;
    std::vector<std::vector<int>> user_antennas; // [cell][user]
    double user_square_side = 20.0;
    double user_height = 1.5;

    int num_cells() const { return static_cast<int>(bs_positions.size()); }
    int num_ris() const { return static_cast<int>(ris_positions.size()); }
    int num_users(int cell) const { return users_per_cell.at(cell); }
    int total_users() const;
    void validate() const;

    // Two BSs at (0,0,25) and (400,0,25), RISs at (180,0,15) and (220,0,15).
    static Topology two_cell(int users_per_cell, int n_bs, int n_user, int n_ris);
    // One BS at (0,0,25) with one RIS at (180,0,15).
    static Topology single_cell(int users, int n_bs, int n_user, int n_ris);
};

struct FadingParams
{
    double reference_loss_db = -30.0; // at 1 m
    double direct_exponent = 3.75;
    double ris_exponent = 2.2;
    double rician_k_db = 3.0;
    double noise_power_dbm = -94.0;
    // Users k >= K - n sit in the transmission space of a STAR-RIS. With
    // `block_transmission_side` a conventional RIS cannot reach them; the
    // blockage is applied per scheme so paired runs share one realization.
    int transmission_side_users = 0;
    bool block_transmission_side = false;
    bool ris_enabled = true;

    void validate() const;
};

struct FadingSet
{
    std::vector<std::vector<std::vector<ComplexMatrix>>> direct; // F[l][k][i]: N_u x N_BS
    std::vector<std::vector<std::vector<ComplexMatrix>>> ris_rx; // G[l][k][m]: N_u x N_RIS
    std::vector<std::vector<ComplexMatrix>> ris_tx;              // G[m][i]:    N_RIS x N_BS
    std::vector<std::vector<Position>> user_positions;
    double noise_power = 1.0; // watts

    int num_cells() const { return static_cast<int>(direct.size()); }
    int num_users(int cell) const { return static_cast<int>(direct.at(cell).size()); }
    int num_ris() const { return static_cast<int>(ris_tx.size()); }
    int ris_elements(int m) const { return static_cast<int>(ris_tx.at(m).at(0).rows()); }
    int bs_antennas(int i) const { return static_cast<int>(direct.at(0).at(0).at(i).cols()); }
    int user_antennas(int l, int k) const { return static_cast<int>(direct.at(l).at(k).at(0).rows()); }

    // Zeroes every RIS link (direct-only system).
    FadingSet without_ris() const;
    // Zeroes the RIS-to-user links of the transmission-space users (a
    // conventional RIS only serves its reflection side).
    FadingSet block_transmission_side(const std::vector<std::vector<bool>> &transmission_side) const;
};

/// Exact (bitwise) equality of two realizations.
bool bitwise_equal(const FadingSet &a, const FadingSet &b);

/// Deterministic given (topology, params, seed).
FadingSet sample_scenario(const Topology &topology, const FadingParams &params, std::uint64_t seed);

enum class SetKind
{
    unit_disk,      // U: |theta| <= 1
    unit_modulus,   // I: |theta| == 1
    coupled_phase,  // C: |theta| == F(angle theta)
    discrete_phase, // D: |theta| == 1, angle on grid
    star_es         // STAR energy splitting: |t|^2 + |r|^2 == 1
};

const char *to_string(SetKind kind);

struct ThetaSet
{
    SetKind kind = SetKind::unit_modulus;
    std::vector<ComplexVector> reflect;  // per RIS
    std::vector<ComplexVector> transmit; // per RIS, STAR only

    int num_ris() const { return static_cast<int>(reflect.size()); }
    bool is_star() const { return kind == SetKind::star_es; }
    static ThetaSet zeros(const FadingSet &f, SetKind kind);
};

enum class UserSpace
{
    reflection,
    transmission
};

using UserSpaceMap = std::vector<std::vector<UserSpace>>;

/// All users in the reflection space, except the last `transmission_side_users` of each cell.
UserSpaceMap default_space_map(const FadingSet &f, int transmission_side_users = 0);

/// H_{lk,i} = sum_m G_{lk,m} diag(theta_m) G_{m,i} + F_{lk,i}, using the reflect coefficients.
ComplexMatrix assemble_effective_channel(const FadingSet &f, const ThetaSet &t, int l, int k, int i);

/// STAR variant: reflection-space users see theta^r, transmission-space users theta^t.
ComplexMatrix assemble_star_channel(const FadingSet &f, const ThetaSet &t, const UserSpaceMap &map, int l, int k,
                                    int i);

/// Device impairments of every node. Noise is expressed per unit of `FadingSet::noise_power`.
struct HardwareModel
{
    std::vector<IqiParams> bs;                // [i]
    std::vector<std::vector<IqiParams>> user; // [l][k]

    static HardwareModel ideal(const FadingSet &f);
    static HardwareModel uniform(const FadingSet &f, double epsilon, double phi);
};

/// Equivalent real channels H_{lk,i} and noise covariances, normalized so the
/// receiver noise power is 1 (rates are invariant under this scaling).
struct EquivalentChannels
{
    std::vector<std::vector<std::vector<RealMatrix>>> h; // [l][k][i]: 2N_u x 2N_BS
    std::vector<std::vector<RealMatrix>> noise;          // [l][k]

    int num_cells() const { return static_cast<int>(h.size()); }
    int num_users(int l) const { return static_cast<int>(h.at(l).size()); }
    int tx_dim(int i) const { return static_cast<int>(h.at(0).at(0).at(i).cols()); }
    int rx_dim(int l, int k) const { return static_cast<int>(h.at(l).at(k).at(0).rows()); }
};

EquivalentChannels build_equivalent_channels(const FadingSet &f, const ThetaSet &t, const UserSpaceMap &map,
                                             const HardwareModel &hw);

// Real vector layout of the RIS coefficients: per RIS m, per element n,
// [Re theta^r, Im theta^r] followed (STAR) by [Re theta^t, Im theta^t].
struct ThetaLayout
{
    std::vector<int> elements; // per RIS
    bool star = false;

    static ThetaLayout of(const FadingSet &f, bool star);
    int size() const;
    int offset(int m, int n, UserSpace space) const; // index of the real part
};

RealVector theta_to_vector(const ThetaSet &t, const ThetaLayout &layout);
ThetaSet vector_to_theta(const RealVector &x, const ThetaLayout &layout, SetKind kind);

/// Real channel affine in the RIS coefficient vector: H(x) = base + sum_a x_a slope_a.
struct AffineRealChannel
{
    RealMatrix base;
    std::vector<std::pair<int, RealMatrix>> slopes;

    RealMatrix at(const RealVector &x) const;
};

std::vector<std::vector<std::vector<AffineRealChannel>>> build_affine_channels(const FadingSet &f,
                                                                               const ThetaLayout &layout,
                                                                               const UserSpaceMap &map,
                                                                               const HardwareModel &hw);

} // namespace rsris

#endif
