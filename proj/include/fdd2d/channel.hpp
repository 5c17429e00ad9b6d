// SPDX-License-Identifier: Apache-2.0
//
// fdd2d: system-level simulation and joint beamforming / power allocation
// for massive-MIMO downlink networks with underlaid full-duplex D2D links
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

#ifndef FDD2D_CHANNEL_HPP
#define FDD2D_CHANNEL_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "fdd2d/rng.hpp"
#include "fdd2d/topology.hpp"

namespace fdd2d {

// Finite-angular-dimension ULA model at the base stations: every BS channel
// lies in the span of P steering vectors at fixed uniformly spaced angles.
struct SteeringConfig {
    int num_antennas = 1;       // A
    int angular_dims = 1;       // P, 1 <= P <= A
    double antenna_spacing = 0.3; // w, in wavelengths

    void validate() const
    {
        if (num_antennas < 1)
            throw std::invalid_argument("SteeringConfig: num_antennas must be >= 1");
        if (angular_dims < 1 || angular_dims > num_antennas)
            throw std::invalid_argument("SteeringConfig: need 1 <= angular_dims <= num_antennas");
        if (!(antenna_spacing > 0.0))
            throw std::invalid_argument("SteeringConfig: antenna_spacing must be > 0");
    }

    // Conventional choice P = A/2 (at least 1).
    static SteeringConfig for_antennas(int num_antennas, double antenna_spacing = 0.3)
    {
        SteeringConfig cfg;
        cfg.num_antennas = num_antennas;
        cfg.angular_dims = std::max(1, num_antennas / 2);
        cfg.antenna_spacing = antenna_spacing;
        return cfg;
    }
};

// ULA steering vector: element k = exp(-i 2 pi w k sin(phi)) / sqrt(P).
// The 1/sqrt(P) normalization belongs to the angular model, so the vector's
// Euclidean norm is sqrt(A/P).
inline Eigen::VectorXcd steering_vector(double phi, const SteeringConfig& cfg)
{
    cfg.validate();
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.angular_dims));
    const double step = -2.0 * M_PI * cfg.antenna_spacing * std::sin(phi);
    Eigen::VectorXcd a(cfg.num_antennas);
    for (int k = 0; k < cfg.num_antennas; ++k)
        a(k) = std::polar(scale, step * k);
    return a;
}

// A x P steering matrix with columns at phi_p = -pi/2 + (p-1) pi / P,
// p = 1..P.
inline Eigen::MatrixXcd steering_matrix(const SteeringConfig& cfg)
{
    cfg.validate();
    Eigen::MatrixXcd mat(cfg.num_antennas, cfg.angular_dims);
    for (int p = 0; p < cfg.angular_dims; ++p) {
        const double phi = -M_PI / 2.0 + p * M_PI / cfg.angular_dims;
        mat.col(p) = steering_vector(phi, cfg);
    }
    return mat;
}

// Fading vector of a BS link: steering * h_P with h_P i.i.d. CN(0,1). This
// is the rank-P model written without the A-P dead dimensions.
inline Eigen::VectorXcd sample_bs_channel(const Eigen::MatrixXcd& steering, Rng& rng)
{
    Eigen::VectorXcd h(steering.cols());
    for (Eigen::Index p = 0; p < h.size(); ++p)
        h(p) = rng.cgaussian();
    return steering * h;
}

// Scalar Rayleigh-fading channel between single-antenna nodes: CN(0,1).
inline std::complex<double> sample_scalar_channel(Rng& rng) { return rng.cgaussian(); }

// All composite channel gains of one drop. Composite means the Rayleigh /
// steering fading scaled by sqrt(path loss), so E |gain|^2 equals the linear
// path-loss power gain. The diagonal of d2d_to_d2d is never read: a
// transceiver's self-channel is modeled by the SIPR term, not by fading.
struct ChannelSet {
    int num_antennas = 1;   // A
    int num_cells = 0;      // B
    int users_per_cell = 0; // M
    std::vector<int> partner;

    std::vector<Eigen::MatrixXcd> bs_to_cell; // [l] is A x (B*M): BS l -> user (b,m)
    std::vector<Eigen::MatrixXcd> bs_to_d2d;  // [b] is A x D:     BS b -> transceiver n
    Eigen::MatrixXcd d2d_to_cell;             // (j, b*M+m)
    Eigen::MatrixXcd d2d_to_d2d;              // (j, n), diag zero

    int num_cellular() const { return num_cells * users_per_cell; }
    int num_transceivers() const { return static_cast<int>(partner.size()); }
};

// Draws every fading realization of a drop and combines it with the
// scenario's path losses. Block fading: one draw per link per drop.
//
// Draw order is part of the determinism contract. BS->cellular channels come
// from the cellular fading substream; everything D2D-related comes from the
// D2D substream, so the cellular channels of a drop do not depend on N.
// With a single BS antenna (A = 1) the steering model is bypassed and BS
// links fade as plain CN(0,1) scalars.
inline ChannelSet build_channel_set(const NetworkScenario& sc, const SteeringConfig& cfg,
                                    const Rng& base)
{
    cfg.validate();
    const int B = sc.num_cells();
    const int K = sc.num_cellular();
    const int D = sc.num_transceivers();
    const int A = cfg.num_antennas;
    const bool omni = (A == 1);
    const Eigen::MatrixXcd steering = omni ? Eigen::MatrixXcd() : steering_matrix(cfg);

    ChannelSet ch;
    ch.num_antennas = A;
    ch.num_cells = B;
    ch.users_per_cell = sc.users_per_cell;
    ch.partner = sc.partner;

    Rng cell_rng = base.substream(kStreamCellularFading);
    ch.bs_to_cell.assign(B, Eigen::MatrixXcd(A, K));
    for (int l = 0; l < B; ++l)
        for (int k = 0; k < K; ++k) {
            const double amp = std::sqrt(sc.pl_bs_to_cell(l, k));
            if (omni)
                ch.bs_to_cell[l](0, k) = amp * sample_scalar_channel(cell_rng);
            else
                ch.bs_to_cell[l].col(k) = amp * sample_bs_channel(steering, cell_rng);
        }

    Rng d2d_rng = base.substream(kStreamD2dFading);
    ch.bs_to_d2d.assign(B, Eigen::MatrixXcd(A, D));
    for (int b = 0; b < B; ++b)
        for (int n = 0; n < D; ++n) {
            const double amp = std::sqrt(sc.pl_bs_to_d2d(b, n));
            if (omni)
                ch.bs_to_d2d[b](0, n) = amp * sample_scalar_channel(d2d_rng);
            else
                ch.bs_to_d2d[b].col(n) = amp * sample_bs_channel(steering, d2d_rng);
        }

    ch.d2d_to_cell.resize(D, K);
    for (int j = 0; j < D; ++j)
        for (int k = 0; k < K; ++k)
            ch.d2d_to_cell(j, k) = std::sqrt(sc.pl_d2d_to_cell(j, k)) * sample_scalar_channel(d2d_rng);

    // Both directions of a pair are drawn independently; the self entry
    // stays zero.
    ch.d2d_to_d2d.setZero(D, D);
    for (int j = 0; j < D; ++j)
        for (int n = 0; n < D; ++n)
            if (n != j)
                ch.d2d_to_d2d(j, n) = std::sqrt(sc.pl_d2d_to_d2d(j, n)) * sample_scalar_channel(d2d_rng);

    return ch;
}

} // namespace fdd2d

#endif
