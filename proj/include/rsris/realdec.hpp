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

#ifndef RSRIS_REALDEC_HPP
#define RSRIS_REALDEC_HPP

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <utility>

namespace rsris
{

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Real composite ("underlined") form of a complex matrix:
//     [ Re M  -Im M ]
//     [ Im M   Re M ]
// Acts on stacked [Re x; Im x] vectors, so it is a ring homomorphism.
template <typename Derived>
Eigen::Matrix<typename Derived::RealScalar, Eigen::Dynamic, Eigen::Dynamic>
to_real_composite(const Eigen::MatrixBase<Derived> &m)
{
    using Real = typename Derived::RealScalar;
    const Eigen::Index r = m.rows(), c = m.cols();
    Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> out(2 * r, 2 * c);
    out.topLeftCorner(r, c) = m.real();
    out.topRightCorner(r, c) = -m.imag();
    out.bottomLeftCorner(r, c) = m.imag();
    out.bottomRightCorner(r, c) = m.real();
    return out;
}

// Real form of the widely linear map  x -> A x + B x*.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::RealScalar, Eigen::Dynamic, Eigen::Dynamic>
widely_linear_real(const Eigen::MatrixBase<DerivedA> &a, const Eigen::MatrixBase<DerivedB> &b)
{
    using Real = typename DerivedA::RealScalar;
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("widely_linear_real: A and B dimension mismatch");
    const Eigen::Index r = a.rows(), c = a.cols();
    Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> out(2 * r, 2 * c);
    out.topLeftCorner(r, c) = (a + b).real();
    out.topRightCorner(r, c) = -(a - b).imag();
    out.bottomLeftCorner(r, c) = (a + b).imag();
    out.bottomRightCorner(r, c) = (a - b).real();
    return out;
}

// Stacks [Re v; Im v].
template <typename Derived>
Eigen::Matrix<typename Derived::RealScalar, Eigen::Dynamic, 1>
to_real_vector(const Eigen::MatrixBase<Derived> &v)
{
    Eigen::Matrix<typename Derived::RealScalar, Eigen::Dynamic, 1> out(2 * v.size());
    out << v.real(), v.imag();
    return out;
}

// True when the 2n x 2n blocks obey TL == BR and TR == -BL within tol.
template <typename Derived>
bool is_proper_structured(const Eigen::MatrixBase<Derived> &m, double tol = 1e-12)
{
    if (m.rows() % 2 != 0 || m.cols() % 2 != 0)
        return false;
    const Eigen::Index r = m.rows() / 2, c = m.cols() / 2;
    const double scale = std::max(1.0, static_cast<double>(m.cwiseAbs().maxCoeff()));
    const double d1 = (m.topLeftCorner(r, c) - m.bottomRightCorner(r, c)).cwiseAbs().maxCoeff();
    const double d2 = (m.topRightCorner(r, c) + m.bottomLeftCorner(r, c)).cwiseAbs().maxCoeff();
    return std::max(d1, d2) <= tol * scale;
}

enum class DeviceSide
{
    transmitter,
    receiver
};

/// Per-antenna I/Q imbalance. `epsilon` is the amplitude mismatch (ideal 1) and
/// `phi` the phase mismatch in radians (ideal 0).
struct IqiParams
{
    RealVector epsilon;
    RealVector phi;
    DeviceSide side = DeviceSide::transmitter;

    static IqiParams ideal(Eigen::Index antennas, DeviceSide side = DeviceSide::transmitter);
    static IqiParams uniform(Eigen::Index antennas, double epsilon, double phi,
                             DeviceSide side = DeviceSide::transmitter);

    Eigen::Index antennas() const { return epsilon.size(); }
    bool is_ideal() const;
    void validate() const;
};

struct WidelyLinearCoeffs
{
    ComplexVector mu; // direct branch
    ComplexVector nu; // conjugate branch
};

// mu = (1 + eps e^{j phi}) / 2,  nu = (1 - eps e^{-j phi}) / 2, per antenna.
WidelyLinearCoeffs widely_linear_coeffs(const IqiParams &p);

/// Real 2N x 2N map of the device distortion  x -> diag(mu) x + diag(nu) x*.
RealMatrix iqi_real_map(const IqiParams &p);

/// Equivalent real channel of  y = G_r1 [H (G_t1 x + G_t2 x*) + r] + G_r2 [...]*.
RealMatrix iqi_equivalent_channel(const ComplexMatrix &h, const IqiParams &tx, const IqiParams &rx);

/// Same as above with precomputed device maps (hot path in the optimizer).
RealMatrix iqi_equivalent_channel(const ComplexMatrix &h, const RealMatrix &tx_map, const RealMatrix &rx_map);

struct NoiseModel
{
    double sigma2 = 1.0;
    IqiParams rx_iqi;
};

/// Covariance of the real-decomposed receiver noise after the receive IQI.
RealMatrix noise_covariance(const NoiseModel &nm, Eigen::Index rx_antennas);

/// Symmetric PSD square root; eigenvalues below `floor` are clamped to zero.
RealMatrix psd_sqrt(const RealMatrix &m, double floor = 1e-12);

void require_finite(const ComplexMatrix &m, const char *what);
void require_finite(const RealMatrix &m, const char *what);

} // namespace rsris

#endif
