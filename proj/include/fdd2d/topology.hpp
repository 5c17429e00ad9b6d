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

#ifndef FDD2D_TOPOLOGY_HPP
#define FDD2D_TOPOLOGY_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fdd2d/rng.hpp"

namespace fdd2d {

// Substream tags used when a scenario is assembled from one base seed.
// Keeping position and fading draws on separate streams makes the cellular
// part of a drop independent of the number of D2D links.
enum : std::uint64_t {
    kStreamCellularPositions = 1,
    kStreamD2dPositions = 2,
    kStreamCellularFading = 3,
    kStreamD2dFading = 4,
};

// Hexagonal cell grid. `cell_radius` is the center-to-vertex distance;
// adjacent cell centers are sqrt(3) * cell_radius apart. Hexagons are
// flat-topped (vertices at angles k * 60 deg).
struct CellLayout {
    std::vector<Eigen::Vector2d> centers;
    double cell_radius = 0.0;

    int num_cells() const { return static_cast<int>(centers.size()); }
};

// Cell centers are enumerated on a hexagonal spiral: the origin first, then
// rings of 6k cells walked in adjacency order, so any prefix of the spiral is
// a connected cluster and the first three cells are mutually adjacent.
inline CellLayout generate_layout(int num_cells, double cell_radius)
{
    if (num_cells < 1)
        throw std::invalid_argument("generate_layout: num_cells must be >= 1");
    if (!(cell_radius > 0.0))
        throw std::invalid_argument("generate_layout: cell_radius must be > 0");

    const double R = cell_radius;
    // Axial basis for flat-topped hexagons with center spacing sqrt(3) R.
    const Eigen::Vector2d e_q(1.5 * R, std::sqrt(3.0) * R / 2.0);
    const Eigen::Vector2d e_r(0.0, std::sqrt(3.0) * R);

    CellLayout layout;
    layout.cell_radius = R;
    layout.centers.reserve(num_cells);
    layout.centers.emplace_back(0.0, 0.0);

    // Ring walk directions in axial coordinates, starting from (k, 0).
    static const int dirs[6][2] = {{-1, 1}, {-1, 0}, {0, -1}, {1, -1}, {1, 0}, {0, 1}};
    for (int ring = 1; static_cast<int>(layout.centers.size()) < num_cells; ++ring) {
        int q = ring, r = 0;
        for (const auto& d : dirs) {
            for (int step = 0; step < ring; ++step) {
                if (static_cast<int>(layout.centers.size()) >= num_cells)
                    break;
                layout.centers.emplace_back(q * e_q + r * e_r);
                q += d[0];
                r += d[1];
            }
        }
    }
    return layout;
}

// Point-in-hexagon test for a flat-topped hexagon of center-to-vertex
// distance R: inside iff the projection on each of the three edge normals
// (at 30, 90, 150 deg) is at most the apothem sqrt(3) R / 2.
inline bool point_in_hexagon(const Eigen::Vector2d& p, const Eigen::Vector2d& center, double R)
{
    const Eigen::Vector2d d = p - center;
    const double apothem = std::sqrt(3.0) * R / 2.0;
    const double c30 = std::sqrt(3.0) / 2.0;
    return std::abs(c30 * d.x() + 0.5 * d.y()) <= apothem &&
           std::abs(d.y()) <= apothem &&
           std::abs(-c30 * d.x() + 0.5 * d.y()) <= apothem;
}

// Uniform point in a cell's hexagon by rejection from the bounding box
// (acceptance ratio 3/4).
inline Eigen::Vector2d sample_point_in_hexagon(const Eigen::Vector2d& center, double R, Rng& rng)
{
    const double apothem = std::sqrt(3.0) * R / 2.0;
    for (;;) {
        const Eigen::Vector2d p(center.x() + rng.uniform(-R, R),
                                center.y() + rng.uniform(-apothem, apothem));
        if (point_in_hexagon(p, center, R))
            return p;
    }
}

// Drops `users_per_cell` cellular users uniformly in every cell's hexagon.
// Returned order: cell 0's users first, then cell 1's, ...
inline std::vector<Eigen::Vector2d> drop_cellular_users(const CellLayout& layout,
                                                        int users_per_cell, Rng& rng)
{
    if (users_per_cell < 1)
        throw std::invalid_argument("drop_cellular_users: users_per_cell must be >= 1");
    std::vector<Eigen::Vector2d> positions;
    positions.reserve(static_cast<std::size_t>(layout.num_cells()) * users_per_cell);
    for (const auto& c : layout.centers)
        for (int m = 0; m < users_per_cell; ++m)
            positions.push_back(sample_point_in_hexagon(c, layout.cell_radius, rng));
    return positions;
}

struct D2dPlacement {
    std::vector<Eigen::Vector2d> positions; // 2 B N transceivers, pair-contiguous
    std::vector<int> partner;               // fixed-point-free involution
};

// Drops `links_per_cell` D2D pairs per cell: the first transceiver of a pair
// is uniform in the cell hexagon, its partner sits at exactly
// `link_distance` away in an isotropic direction (and may leave the hexagon).
inline D2dPlacement drop_d2d_pairs(const CellLayout& layout, int links_per_cell,
                                   double link_distance, Rng& rng)
{
    if (links_per_cell < 0)
        throw std::invalid_argument("drop_d2d_pairs: links_per_cell must be >= 0");
    if (!(link_distance > 0.0))
        throw std::invalid_argument("drop_d2d_pairs: link_distance must be > 0");

    D2dPlacement out;
    const int total = 2 * layout.num_cells() * links_per_cell;
    out.positions.reserve(total);
    out.partner.reserve(total);
    for (const auto& c : layout.centers) {
        for (int k = 0; k < links_per_cell; ++k) {
            const Eigen::Vector2d first = sample_point_in_hexagon(c, layout.cell_radius, rng);
            const double theta = rng.uniform(0.0, 2.0 * M_PI);
            const Eigen::Vector2d second =
                first + link_distance * Eigen::Vector2d(std::cos(theta), std::sin(theta));
            const int i = static_cast<int>(out.positions.size());
            out.positions.push_back(first);
            out.positions.push_back(second);
            out.partner.push_back(i + 1);
            out.partner.push_back(i);
        }
    }
    return out;
}

// Distance-based path loss L = C * d^(-alpha), a linear power gain.
inline double path_loss(double distance_m, double ref_gain, double exponent)
{
    if (!(distance_m > 0.0))
        throw std::domain_error("path_loss: distance must be > 0");
    if (!(ref_gain > 0.0))
        throw std::invalid_argument("path_loss: reference gain must be > 0");
    if (!(exponent > 2.0))
        throw std::invalid_argument("path_loss: exponent must be > 2");
    return ref_gain * std::pow(distance_m, -exponent);
}

struct PathLossParams {
    double ref_gain = 0.0;     // linear C
    double exponent = 0.0;     // alpha
    double min_distance = 1.0; // meters; distances are clamped below at this
};

// One random drop: geometry plus every pairwise path loss the SINR terms
// consume. Path losses are linear power gains; distances are clamped below
// at PathLossParams::min_distance so a drop can never produce a singular
// gain.
struct NetworkScenario {
    CellLayout layout;
    int users_per_cell = 0; // M
    int links_per_cell = 0; // N

    std::vector<Eigen::Vector2d> cellular_positions; // B*M, index b*M + m
    std::vector<Eigen::Vector2d> d2d_positions;      // 2*B*N
    std::vector<int> partner;

    Eigen::MatrixXd pl_bs_to_cell;  // (B, B*M): BS l -> cellular user (b,m)
    Eigen::MatrixXd pl_bs_to_d2d;   // (B, D):   BS b -> D2D transceiver n
    Eigen::MatrixXd pl_d2d_to_cell; // (D, B*M): transceiver j -> user (b,m)
    Eigen::MatrixXd pl_d2d_to_d2d;  // (D, D):   transceiver j -> transceiver n; diag unused

    int num_cells() const { return layout.num_cells(); }
    int num_cellular() const { return num_cells() * users_per_cell; }
    int num_transceivers() const { return static_cast<int>(d2d_positions.size()); }
};

// Assembles a full drop from one base random source. Cellular and D2D
// positions come from separate substreams, so scenarios with different N
// share the cellular part bit for bit.
inline NetworkScenario make_scenario(const CellLayout& layout, int users_per_cell,
                                     int links_per_cell, double link_distance,
                                     const PathLossParams& pl, const Rng& base)
{
    NetworkScenario sc;
    sc.layout = layout;
    sc.users_per_cell = users_per_cell;
    sc.links_per_cell = links_per_cell;

    Rng cell_rng = base.substream(kStreamCellularPositions);
    sc.cellular_positions = drop_cellular_users(layout, users_per_cell, cell_rng);
    if (links_per_cell > 0) {
        Rng d2d_rng = base.substream(kStreamD2dPositions);
        D2dPlacement d2d = drop_d2d_pairs(layout, links_per_cell, link_distance, d2d_rng);
        sc.d2d_positions = std::move(d2d.positions);
        sc.partner = std::move(d2d.partner);
    }

    const int B = sc.num_cells();
    const int K = sc.num_cellular();
    const int D = sc.num_transceivers();
    const auto gain = [&pl](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
        const double d = std::max((a - b).norm(), pl.min_distance);
        return path_loss(d, pl.ref_gain, pl.exponent);
    };

    sc.pl_bs_to_cell.resize(B, K);
    sc.pl_bs_to_d2d.resize(B, D);
    for (int l = 0; l < B; ++l) {
        for (int k = 0; k < K; ++k)
            sc.pl_bs_to_cell(l, k) = gain(layout.centers[l], sc.cellular_positions[k]);
        for (int n = 0; n < D; ++n)
            sc.pl_bs_to_d2d(l, n) = gain(layout.centers[l], sc.d2d_positions[n]);
    }
    sc.pl_d2d_to_cell.resize(D, K);
    sc.pl_d2d_to_d2d.setZero(D, D);
    for (int j = 0; j < D; ++j) {
        for (int k = 0; k < K; ++k)
            sc.pl_d2d_to_cell(j, k) = gain(sc.d2d_positions[j], sc.cellular_positions[k]);
        for (int n = 0; n < D; ++n)
            if (n != j)
                sc.pl_d2d_to_d2d(j, n) = gain(sc.d2d_positions[j], sc.d2d_positions[n]);
    }
    return sc;
}

} // namespace fdd2d

#endif
