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

#ifndef FDD2D_METRICS_HPP
#define FDD2D_METRICS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "fdd2d/channel.hpp"

namespace fdd2d {

// Downlink beamformers, one complex A-vector per (cell, user). Per-BS power
// feasibility is reported, never silently enforced.
struct BeamformerSet {
    Eigen::MatrixXcd v;     // A x (B*M), column b*M + m
    int users_per_cell = 0; // M

    int num_cells() const
    {
        return users_per_cell > 0 ? static_cast<int>(v.cols()) / users_per_cell : 0;
    }

    Eigen::VectorXcd beam(int b, int m) const { return v.col(b * users_per_cell + m); }

    double bs_power(int b) const
    {
        return v.middleCols(b * users_per_cell, users_per_cell).squaredNorm();
    }

    bool feasible(double max_bs_power, double tol = 1e-9) const
    {
        for (int b = 0; b < num_cells(); ++b)
            if (bs_power(b) > max_bs_power * (1.0 + tol))
                return false;
        return true;
    }

    static BeamformerSet zero(int num_antennas, int num_cells, int users_per_cell)
    {
        BeamformerSet V;
        V.users_per_cell = users_per_cell;
        V.v.setZero(num_antennas, num_cells * users_per_cell);
        return V;
    }
};

struct NoiseModel {
    double sigma2 = 0.0; // thermal noise power, watts
    double beta = 0.0;   // SIPR: residual self-interference power = beta * own Tx power

    void validate() const
    {
        if (!(sigma2 > 0.0))
            throw std::invalid_argument("NoiseModel: sigma2 must be > 0");
        if (beta < 0.0)
            throw std::invalid_argument("NoiseModel: beta must be >= 0");
    }
};

// Which transmit power feeds the desired-signal term of a D2D receive
// direction. Physically the signal arriving at n was sent by the partner;
// `Own` reproduces the printed shorthand where both the signal and the
// self-interference carry the receiver's own power index.
enum class D2dSignalPower { Partner, Own };

namespace detail {

inline void check_dimensions(const ChannelSet& ch, const BeamformerSet& V,
                             const Eigen::VectorXd& p)
{
    if (V.users_per_cell != ch.users_per_cell ||
        V.v.cols() != static_cast<Eigen::Index>(ch.num_cellular()) ||
        (ch.num_cellular() > 0 && V.v.rows() != ch.num_antennas))
        throw std::invalid_argument("beamformer set does not match channel set");
    if (p.size() != static_cast<Eigen::Index>(ch.num_transceivers()))
        throw std::invalid_argument("power vector does not match channel set");
}

} // namespace detail

// Aggregate interference power at cellular user (b, m): every beam except
// its own, from every BS, plus all D2D transmissions.
inline double cellular_interference(const ChannelSet& ch, const BeamformerSet& V,
                                    const Eigen::VectorXd& p, int b, int m)
{
    detail::check_dimensions(ch, V, p);
    const int M = ch.users_per_cell;
    const int k = b * M + m;
    double acc = 0.0;
    for (int i = 0; i < ch.num_cells; ++i) {
        const Eigen::VectorXcd g = ch.bs_to_cell[i].col(k);
        for (int j = 0; j < M; ++j) {
            if (i == b && j == m)
                continue;
            acc += std::norm(g.dot(V.v.col(i * M + j)));
        }
    }
    for (int j = 0; j < ch.num_transceivers(); ++j)
        acc += p(j) * std::norm(ch.d2d_to_cell(j, k));
    return acc;
}

inline double cellular_sinr(const ChannelSet& ch, const BeamformerSet& V,
                            const Eigen::VectorXd& p, const NoiseModel& noise, int b, int m)
{
    const int k = b * ch.users_per_cell + m;
    const double signal = std::norm(ch.bs_to_cell[b].col(k).dot(V.v.col(k)));
    return signal / (cellular_interference(ch, V, p, b, m) + noise.sigma2);
}

// Interference at D2D transceiver n from all BS beams and all transceivers
// outside its own pair.
inline double d2d_interference(const ChannelSet& ch, const BeamformerSet& V,
                               const Eigen::VectorXd& p, int n)
{
    detail::check_dimensions(ch, V, p);
    double acc = 0.0;
    for (int b = 0; b < ch.num_cells; ++b) {
        const Eigen::VectorXcd g = ch.bs_to_d2d[b].col(n);
        for (int m = 0; m < ch.users_per_cell; ++m)
            acc += std::norm(g.dot(V.v.col(b * ch.users_per_cell + m)));
    }
    const int mate = ch.partner[n];
    for (int j = 0; j < ch.num_transceivers(); ++j)
        if (j != n && j != mate)
            acc += p(j) * std::norm(ch.d2d_to_d2d(j, n));
    return acc;
}

// SINR of the receive direction at transceiver n. The desired signal uses
// the partner->n gain; the denominator carries the residual
// self-interference beta * P_n of n's own full-duplex transmission.
inline double d2d_sinr(const ChannelSet& ch, const BeamformerSet& V, const Eigen::VectorXd& p,
                       const NoiseModel& noise, int n,
                       D2dSignalPower convention = D2dSignalPower::Partner)
{
    if (n < 0 || n >= ch.num_transceivers() || ch.partner[n] < 0)
        throw std::invalid_argument("d2d_sinr: transceiver has no partner");
    const int mate = ch.partner[n];
    const double tx_power = (convention == D2dSignalPower::Partner) ? p(mate) : p(n);
    const double signal = tx_power * std::norm(ch.d2d_to_d2d(mate, n));
    const double denom = d2d_interference(ch, V, p, n) + noise.beta * p(n) + noise.sigma2;
    return signal / denom;
}

// Shannon rates, bits/s/Hz. A full-duplex D2D link's rate is the sum over
// its two simultaneous directions.
struct LinkRates {
    Eigen::VectorXd cellular;      // B*M entries
    Eigen::VectorXd d2d_direction; // D entries, receive direction at n

    double d2d_link(int link) const
    {
        return d2d_direction(2 * link) + d2d_direction(2 * link + 1);
    }
    int num_links() const { return static_cast<int>(d2d_direction.size()) / 2; }
};

inline LinkRates link_rates(const ChannelSet& ch, const BeamformerSet& V,
                            const Eigen::VectorXd& p, const NoiseModel& noise,
                            D2dSignalPower convention = D2dSignalPower::Partner)
{
    detail::check_dimensions(ch, V, p);
    noise.validate();
    LinkRates rates;
    rates.cellular.resize(ch.num_cellular());
    for (int b = 0; b < ch.num_cells; ++b)
        for (int m = 0; m < ch.users_per_cell; ++m)
            rates.cellular(b * ch.users_per_cell + m) =
                std::log2(1.0 + cellular_sinr(ch, V, p, noise, b, m));
    rates.d2d_direction.resize(ch.num_transceivers());
    for (int n = 0; n < ch.num_transceivers(); ++n)
        rates.d2d_direction(n) = std::log2(1.0 + d2d_sinr(ch, V, p, noise, n, convention));
    return rates;
}

// Per-cell network sum-rate: (sum of cellular rates + sum of D2D link
// rates) / B. Summing the per-direction rates visits each link's two
// directions exactly once.
inline double network_sum_rate(const ChannelSet& ch, const BeamformerSet& V,
                               const Eigen::VectorXd& p, const NoiseModel& noise,
                               D2dSignalPower convention = D2dSignalPower::Partner)
{
    const LinkRates rates = link_rates(ch, V, p, noise, convention);
    return (rates.cellular.sum() + rates.d2d_direction.sum()) / ch.num_cells;
}

} // namespace fdd2d

#endif
