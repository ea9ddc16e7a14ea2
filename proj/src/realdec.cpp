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

#include "rsris/realdec.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace rsris
{

IqiParams IqiParams::ideal(Eigen::Index antennas, DeviceSide side)
{
    return uniform(antennas, 1.0, 0.0, side);
}

IqiParams IqiParams::uniform(Eigen::Index antennas, double epsilon, double phi, DeviceSide side)
{
    IqiParams p;
    p.epsilon = RealVector::Constant(antennas, epsilon);
    p.phi = RealVector::Constant(antennas, phi);
    p.side = side;
    p.validate();
    return p;
}

bool IqiParams::is_ideal() const
{
    return (epsilon.array() == 1.0).all() && (phi.array() == 0.0).all();
}

void IqiParams::validate() const
{
    if (epsilon.size() != phi.size())
        throw std::invalid_argument("IqiParams: epsilon and phi lengths differ");
    if (epsilon.size() == 0)
        throw std::invalid_argument("IqiParams: no antennas");
    for (Eigen::Index i = 0; i < epsilon.size(); ++i)
    {
        if (!(epsilon(i) > 0.0) || !std::isfinite(epsilon(i)))
            throw std::invalid_argument("IqiParams: epsilon must be positive, antenna " + std::to_string(i));
        if (!(std::abs(phi(i)) < std::numbers::pi / 2))
            throw std::invalid_argument("IqiParams: |phi| must be below pi/2, antenna " + std::to_string(i));
    }
}

WidelyLinearCoeffs widely_linear_coeffs(const IqiParams &p)
{
    p.validate();
    const Eigen::Index n = p.antennas();
    WidelyLinearCoeffs c{ComplexVector(n), ComplexVector(n)};
    for (Eigen::Index i = 0; i < n; ++i)
    {
        c.mu(i) = 0.5 * (1.0 + std::polar(p.epsilon(i), p.phi(i)));
        c.nu(i) = 0.5 * (1.0 - std::polar(p.epsilon(i), -p.phi(i)));
    }
    return c;
}

RealMatrix iqi_real_map(const IqiParams &p)
{
    const auto c = widely_linear_coeffs(p);
    return widely_linear_real(ComplexMatrix(c.mu.asDiagonal()), ComplexMatrix(c.nu.asDiagonal()));
}

RealMatrix iqi_equivalent_channel(const ComplexMatrix &h, const IqiParams &tx, const IqiParams &rx)
{
    require_finite(h, "iqi_equivalent_channel");
    if (tx.antennas() != h.cols())
        throw std::invalid_argument("iqi_equivalent_channel: tx IQI has " + std::to_string(tx.antennas()) +
                                    " antennas, channel has " + std::to_string(h.cols()) + " columns");
    if (rx.antennas() != h.rows())
        throw std::invalid_argument("iqi_equivalent_channel: rx IQI has " + std::to_string(rx.antennas()) +
                                    " antennas, channel has " + std::to_string(h.rows()) + " rows");
    return iqi_equivalent_channel(h, iqi_real_map(tx), iqi_real_map(rx));
}

RealMatrix iqi_equivalent_channel(const ComplexMatrix &h, const RealMatrix &tx_map, const RealMatrix &rx_map)
{
    return rx_map * to_real_composite(h) * tx_map;
}

RealMatrix noise_covariance(const NoiseModel &nm, Eigen::Index rx_antennas)
{
    if (!(nm.sigma2 > 0.0))
        throw std::invalid_argument("noise_covariance: sigma2 must be positive");
    if (nm.rx_iqi.antennas() != rx_antennas)
        throw std::invalid_argument("noise_covariance: rx IQI antenna count mismatch");
    const RealMatrix gamma = iqi_real_map(nm.rx_iqi);
    // circularly symmetric CN(0, sigma2 I): real and imaginary parts each carry sigma2/2
    RealMatrix cn = (0.5 * nm.sigma2) * gamma * gamma.transpose();
    return 0.5 * (cn + cn.transpose());
}

RealMatrix psd_sqrt(const RealMatrix &m, double floor)
{
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (m + m.transpose()));
    RealVector ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        ev(i) = ev(i) < floor ? 0.0 : std::sqrt(ev(i));
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

void require_finite(const ComplexMatrix &m, const char *what)
{
    if (!m.allFinite())
        throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

void require_finite(const RealMatrix &m, const char *what)
{
    if (!m.allFinite())
        throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

} // namespace rsris
