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

#include <catch2/catch_amalgamated.hpp>

#include "fdd2d/topology.hpp"
#include "fdd2d/units.hpp"
#include "oracles.hpp"

using namespace fdd2d;

TEST_CASE("single-cell layout is centered at the origin", "[topology]")
{
    const CellLayout layout = generate_layout(1, 500.0);
    REQUIRE(layout.num_cells() == 1);
    CHECK(layout.centers[0].norm() == 0.0);
    CHECK(layout.cell_radius == 500.0);
}

TEST_CASE("three cells are mutually adjacent at spacing sqrt(3) R", "[topology]")
{
    const CellLayout layout = generate_layout(3, 500.0);
    const double expected = std::sqrt(3.0) * 500.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            const double d = (layout.centers[i] - layout.centers[j]).norm();
            CHECK(d == Catch::Approx(expected).epsilon(1e-12));
        }
}

TEST_CASE("larger layouts keep the packing spacing as a minimum", "[topology]")
{
    const CellLayout layout = generate_layout(9, 200.0);
    REQUIRE(layout.num_cells() == 9);
    const double spacing = std::sqrt(3.0) * 200.0;
    double min_d = 1e300;
    for (int i = 0; i < 9; ++i)
        for (int j = i + 1; j < 9; ++j)
            min_d = std::min(min_d, (layout.centers[i] - layout.centers[j]).norm());
    CHECK(min_d == Catch::Approx(spacing).epsilon(1e-12));
}

TEST_CASE("layout rejects non-positive inputs", "[topology]")
{
    CHECK_THROWS_AS(generate_layout(0, 500.0), std::invalid_argument);
    CHECK_THROWS_AS(generate_layout(3, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(generate_layout(3, -1.0), std::invalid_argument);
}

TEST_CASE("cellular drops are deterministic, contained and counted", "[topology]")
{
    const CellLayout layout = generate_layout(3, 500.0);
    Rng rng_a(42), rng_b(42);
    const auto pos_a = drop_cellular_users(layout, 4, rng_a);
    const auto pos_b = drop_cellular_users(layout, 4, rng_b);
    REQUIRE(pos_a.size() == 12);
    for (std::size_t i = 0; i < pos_a.size(); ++i) {
        CHECK(pos_a[i] == pos_b[i]);
        CHECK(point_in_hexagon(pos_a[i], layout.centers[i / 4], layout.cell_radius));
    }
    CHECK_THROWS_AS(drop_cellular_users(layout, 0, rng_a), std::invalid_argument);
}

TEST_CASE("hexagon sampling is uniform: empirical mean sits on the center", "[topology]")
{
    const CellLayout layout = generate_layout(1, 500.0);
    Rng rng(7);
    Eigen::Vector2d mean(0.0, 0.0);
    const int n = 100000;
    for (int i = 0; i < n; ++i)
        mean += sample_point_in_hexagon(layout.centers[0], layout.cell_radius, rng);
    mean /= n;
    CHECK(mean.norm() < 0.01 * layout.cell_radius);
}

TEST_CASE("D2D pairs: exact link distance, isotropic direction, involution", "[topology]")
{
    const CellLayout layout = generate_layout(3, 500.0);
    Rng rng(11);

    SECTION("zero links")
    {
        const D2dPlacement none = drop_d2d_pairs(layout, 0, 50.0, rng);
        CHECK(none.positions.empty());
        CHECK(none.partner.empty());
    }

    SECTION("distance and pairing")
    {
        const D2dPlacement d2d = drop_d2d_pairs(layout, 10, 50.0, rng);
        REQUIRE(d2d.positions.size() == 60);
        for (std::size_t n = 0; n < d2d.positions.size(); ++n) {
            const int mate = d2d.partner[n];
            CHECK(mate != static_cast<int>(n));
            CHECK(d2d.partner[mate] == static_cast<int>(n));
            const double dist = (d2d.positions[n] - d2d.positions[mate]).norm();
            CHECK(dist == Catch::Approx(50.0).epsilon(1e-12));
        }
        // first transceiver of each pair lies in its cell
        for (int cell = 0; cell < 3; ++cell)
            for (int k = 0; k < 10; ++k)
                CHECK(point_in_hexagon(d2d.positions[2 * (cell * 10 + k)],
                                       layout.centers[cell], layout.cell_radius));
    }

    SECTION("partner directions are isotropic")
    {
        const CellLayout one = generate_layout(1, 500.0);
        Rng rng2(13);
        std::vector<double> angles;
        const int pairs = 100000;
        const D2dPlacement d2d = drop_d2d_pairs(one, pairs, 50.0, rng2);
        for (int k = 0; k < pairs; ++k) {
            const Eigen::Vector2d d = d2d.positions[2 * k + 1] - d2d.positions[2 * k];
            double a = std::atan2(d.y(), d.x());
            if (a < 0.0)
                a += 2.0 * M_PI;
            angles.push_back(a);
        }
        // chi-square with 36 bins, df=35: 99.9% critical value is 66.6
        CHECK(oracles::chi_square_uniform(angles, 0.0, 2.0 * M_PI, 36) < 66.6);
    }
}

TEST_CASE("path loss follows the power law", "[topology]")
{
    const double C = db_to_linear(-15.3);
    CHECK(path_loss(1.0, C, 3.76) == Catch::Approx(C).epsilon(1e-15));
    CHECK(path_loss(50.0, C, 3.76) ==
          Catch::Approx(C * std::pow(50.0, -3.76)).epsilon(1e-15));
    CHECK(path_loss(100.0, C, 3.76) / path_loss(50.0, C, 3.76) ==
          Catch::Approx(std::pow(2.0, -3.76)).epsilon(1e-12));

    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const double d1 = rng.uniform(0.5, 2000.0);
        const double d2 = d1 * rng.uniform(1.0001, 3.0);
        CHECK(path_loss(d1, C, 3.76) > 0.0);
        CHECK(path_loss(d1, C, 3.76) > path_loss(d2, C, 3.76));
    }

    CHECK_THROWS_AS(path_loss(0.0, C, 3.76), std::domain_error);
    CHECK_THROWS_AS(path_loss(-1.0, C, 3.76), std::domain_error);
    CHECK_THROWS_AS(path_loss(10.0, C, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(path_loss(10.0, 0.0, 3.76), std::invalid_argument);
}

TEST_CASE("scenarios are bit-identical across reruns", "[topology]")
{
    const CellLayout layout = generate_layout(3, 550.0);
    const PathLossParams pl{db_to_linear(-15.3), 3.76, 1.0};
    const NetworkScenario a = make_scenario(layout, 4, 5, 50.0, pl, Rng(99));
    const NetworkScenario b = make_scenario(layout, 4, 5, 50.0, pl, Rng(99));
    REQUIRE(a.cellular_positions.size() == b.cellular_positions.size());
    for (std::size_t i = 0; i < a.cellular_positions.size(); ++i)
        CHECK(a.cellular_positions[i] == b.cellular_positions[i]);
    CHECK(a.pl_bs_to_cell == b.pl_bs_to_cell);
    CHECK(a.pl_d2d_to_d2d == b.pl_d2d_to_d2d);
    CHECK(a.partner == b.partner);
}

TEST_CASE("cellular part of a scenario does not depend on N", "[topology]")
{
    const CellLayout layout = generate_layout(3, 550.0);
    const PathLossParams pl{db_to_linear(-15.3), 3.76, 1.0};
    const NetworkScenario with = make_scenario(layout, 4, 8, 50.0, pl, Rng(5));
    const NetworkScenario without = make_scenario(layout, 4, 0, 50.0, pl, Rng(5));
    CHECK(with.pl_bs_to_cell == without.pl_bs_to_cell);
    CHECK(without.num_transceivers() == 0);
}

TEST_CASE("pairwise distances are clamped below at the minimum distance", "[topology]")
{
    const CellLayout layout = generate_layout(1, 500.0);
    const PathLossParams pl{db_to_linear(-15.3), 3.76, 1.0};
    // a 0.4 m link distance is below the clamp, so the pair gain equals L(1 m)
    const NetworkScenario sc = make_scenario(layout, 1, 3, 0.4, pl, Rng(21));
    for (int n = 0; n < sc.num_transceivers(); ++n) {
        const int mate = sc.partner[n];
        CHECK(sc.pl_d2d_to_d2d(mate, n) ==
              Catch::Approx(path_loss(1.0, pl.ref_gain, pl.exponent)).epsilon(1e-15));
    }
}
