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

#include "oracles.hpp"

using namespace fdd2d;

namespace {

// Empty channel set with the right shapes, for hand-crafted cases.
ChannelSet manual_channels(int A, int B, int M, int links_total)
{
    ChannelSet ch;
    ch.num_antennas = A;
    ch.num_cells = B;
    ch.users_per_cell = M;
    const int D = 2 * links_total;
    ch.partner.resize(D);
    for (int k = 0; k < links_total; ++k) {
        ch.partner[2 * k] = 2 * k + 1;
        ch.partner[2 * k + 1] = 2 * k;
    }
    ch.bs_to_cell.assign(B, Eigen::MatrixXcd::Zero(A, B * M));
    ch.bs_to_d2d.assign(B, Eigen::MatrixXcd::Zero(A, D));
    ch.d2d_to_cell = Eigen::MatrixXcd::Zero(D, B * M);
    ch.d2d_to_d2d = Eigen::MatrixXcd::Zero(D, D);
    return ch;
}

const NoiseModel kNoise{1e-12, 0.0};

} // namespace

TEST_CASE("cellular interference sums exactly the foreign terms", "[metrics]")
{
    SECTION("no interferers at all")
    {
        ChannelSet ch = manual_channels(2, 1, 1, 0);
        BeamformerSet V = BeamformerSet::zero(2, 1, 1);
        V.v(0, 0) = 1.0;
        CHECK(cellular_interference(ch, V, Eigen::VectorXd(0), 0, 0) == 0.0);
    }

    SECTION("a single D2D interferer contributes P |g|^2")
    {
        ChannelSet ch = manual_channels(2, 1, 1, 1);
        ch.d2d_to_cell(0, 0) = std::sqrt(1e-9);
        BeamformerSet V = BeamformerSet::zero(2, 1, 1);
        Eigen::VectorXd p(2);
        p << 1.0, 0.0;
        CHECK(cellular_interference(ch, V, p, 0, 0) == Catch::Approx(1e-9).epsilon(1e-12));
    }

    SECTION("random two-cell instance matches the naive re-summation")
    {
        const oracles::Instance inst = oracles::make_instance(2, 2, 2, 4, 7);
        Rng rng(1234);
        const auto [V, p] = oracles::random_point(inst.channels, 10.0, 0.2, rng);
        for (int b = 0; b < 2; ++b)
            for (int m = 0; m < 2; ++m) {
                const double mine = cellular_sinr(inst.channels, V, p, inst.noise, b, m);
                const double oracle =
                    oracles::cellular_sinr_naive(inst.channels, V, p, inst.noise, b, m);
                CHECK(mine == Catch::Approx(oracle).epsilon(1e-12));
            }
    }
}

TEST_CASE("cellular SINR basics", "[metrics]")
{
    ChannelSet ch = manual_channels(2, 1, 1, 0);
    ch.bs_to_cell[0](0, 0) = 1.0;
    BeamformerSet V = BeamformerSet::zero(2, 1, 1);
    const Eigen::VectorXd p(0);

    CHECK(cellular_sinr(ch, V, p, kNoise, 0, 0) == 0.0); // zero beamformer

    V.v(0, 0) = std::sqrt(kNoise.sigma2); // |g^H v|^2 = sigma^2, no interference
    CHECK(cellular_sinr(ch, V, p, kNoise, 0, 0) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("D2D SINR basics", "[metrics]")
{
    ChannelSet ch = manual_channels(2, 1, 1, 1);
    BeamformerSet V = BeamformerSet::zero(2, 1, 1);
    Eigen::VectorXd p(2);
    p << 0.5, 0.25;

    SECTION("unit SINR when the desired power equals the noise floor")
    {
        ch.d2d_to_d2d(1, 0) = std::sqrt(kNoise.sigma2 / p(1)); // direction 0: tx is 1
        CHECK(d2d_sinr(ch, V, p, kNoise, 0) == Catch::Approx(1.0).epsilon(1e-12));
    }

    SECTION("zero desired gain gives zero SINR regardless of beta")
    {
        NoiseModel noisy = kNoise;
        noisy.beta = 0.3;
        CHECK(d2d_sinr(ch, V, p, noisy, 0) == 0.0);
    }

    SECTION("numerator convention switches the transmit power")
    {
        ch.d2d_to_d2d(1, 0) = 1.0;
        const double partner_mode = d2d_sinr(ch, V, p, kNoise, 0, D2dSignalPower::Partner);
        const double own_mode = d2d_sinr(ch, V, p, kNoise, 0, D2dSignalPower::Own);
        CHECK(partner_mode == Catch::Approx(p(1) / kNoise.sigma2).epsilon(1e-12));
        CHECK(own_mode == Catch::Approx(p(0) / kNoise.sigma2).epsilon(1e-12));
    }

    SECTION("missing partner is an error")
    {
        ch.partner[0] = -1;
        CHECK_THROWS_AS(d2d_sinr(ch, V, p, kNoise, 0), std::invalid_argument);
    }

    SECTION("random instance matches the naive oracle, both conventions")
    {
        const oracles::Instance inst = oracles::make_instance(2, 1, 2, 2, 11);
        Rng rng(99);
        const auto [Vr, pr] = oracles::random_point(inst.channels, 10.0, 0.2, rng);
        for (int n = 0; n < inst.channels.num_transceivers(); ++n)
            for (auto conv : {D2dSignalPower::Partner, D2dSignalPower::Own}) {
                const double mine = d2d_sinr(inst.channels, Vr, pr, inst.noise, n, conv);
                const double oracle =
                    oracles::d2d_sinr_naive(inst.channels, Vr, pr, inst.noise, n, conv);
                CHECK(mine == Catch::Approx(oracle).epsilon(1e-12));
            }
    }
}

TEST_CASE("link rates and the per-cell sum", "[metrics]")
{
    SECTION("unit SINR gives one bit, and a link sums its two directions")
    {
        ChannelSet ch = manual_channels(2, 1, 1, 1);
        ch.bs_to_cell[0](0, 0) = 1.0;
        BeamformerSet V = BeamformerSet::zero(2, 1, 1);
        V.v(0, 0) = std::sqrt(kNoise.sigma2);
        Eigen::VectorXd p(2);
        p << 1.0, 1.0;
        // both D2D directions at SINR 3
        ch.d2d_to_d2d(1, 0) = std::sqrt(3.0 * kNoise.sigma2);
        ch.d2d_to_d2d(0, 1) = std::sqrt(3.0 * kNoise.sigma2);
        // cancel the cross interference the cellular beam would cause
        ch.bs_to_d2d[0].setZero();

        const LinkRates rates = link_rates(ch, V, p, kNoise);
        CHECK(rates.cellular(0) == Catch::Approx(1.0).epsilon(1e-9));
        CHECK(rates.d2d_direction(0) == Catch::Approx(2.0).epsilon(1e-9));
        CHECK(rates.d2d_link(0) == Catch::Approx(4.0).epsilon(1e-9));

        // network sum over one cell: 1 + 4 = 5 ... but the cellular SINR sees
        // D2D-to-cellular interference only through d2d_to_cell, still zero here
        CHECK(network_sum_rate(ch, V, p, kNoise) == Catch::Approx(5.0).epsilon(1e-9));
    }

    SECTION("one user at SINR 3 in one cell rates 2 bits")
    {
        ChannelSet ch = manual_channels(2, 1, 1, 0);
        ch.bs_to_cell[0](0, 0) = 1.0;
        BeamformerSet V = BeamformerSet::zero(2, 1, 1);
        V.v(0, 0) = std::sqrt(3.0 * kNoise.sigma2);
        CHECK(network_sum_rate(ch, V, Eigen::VectorXd(0), kNoise) ==
              Catch::Approx(2.0).epsilon(1e-12));
    }

    SECTION("identical per-cell totals average to the per-cell total")
    {
        // three isolated copies of the same cell
        ChannelSet ch = manual_channels(1, 3, 1, 0);
        BeamformerSet V = BeamformerSet::zero(1, 3, 1);
        for (int b = 0; b < 3; ++b) {
            ch.bs_to_cell[b](0, b) = 1.0;
            V.v(0, b) = std::sqrt(3.0 * kNoise.sigma2);
        }
        CHECK(network_sum_rate(ch, V, Eigen::VectorXd(0), kNoise) ==
              Catch::Approx(2.0).epsilon(1e-9));
    }

    SECTION("sum rate composes from link rates")
    {
        const oracles::Instance inst = oracles::make_instance(2, 2, 2, 4, 13);
        Rng rng(5);
        const auto [V, p] = oracles::random_point(inst.channels, 10.0, 0.2, rng);
        const LinkRates rates = link_rates(inst.channels, V, p, inst.noise);
        double total = rates.cellular.sum();
        for (int link = 0; link < rates.num_links(); ++link)
            total += rates.d2d_link(link);
        CHECK(network_sum_rate(inst.channels, V, p, inst.noise) ==
              Catch::Approx(total / 2.0).epsilon(1e-12));
    }
}

TEST_CASE("metric monotonicity properties", "[metrics]")
{
    const oracles::Instance inst = oracles::make_instance(2, 2, 2, 4, 17);
    Rng rng(77);
    auto [V, p] = oracles::random_point(inst.channels, 10.0, 0.2, rng);

    SECTION("boosting a direction's desired gain raises only that rate")
    {
        ChannelSet boosted = inst.channels;
        const int n = 1, mate = boosted.partner[n];
        boosted.d2d_to_d2d(mate, n) *= 2.0;
        CHECK(d2d_sinr(boosted, V, p, inst.noise, n) >
              d2d_sinr(inst.channels, V, p, inst.noise, n));
        for (int other = 0; other < boosted.num_transceivers(); ++other)
            if (other != n)
                CHECK(d2d_sinr(boosted, V, p, inst.noise, other) ==
                      d2d_sinr(inst.channels, V, p, inst.noise, other));
        for (int b = 0; b < 2; ++b)
            for (int m = 0; m < 2; ++m)
                CHECK(cellular_sinr(boosted, V, p, inst.noise, b, m) ==
                      cellular_sinr(inst.channels, V, p, inst.noise, b, m));
    }

    SECTION("raising interfering powers weakly decreases SINRs")
    {
        Eigen::VectorXd p2 = p * 2.0;
        for (int b = 0; b < 2; ++b)
            for (int m = 0; m < 2; ++m)
                CHECK(cellular_sinr(inst.channels, V, p2, inst.noise, b, m) <=
                      cellular_sinr(inst.channels, V, p, inst.noise, b, m));
        // for a D2D receiver, raise only the powers outside its own pair
        const int n = 0, mate = inst.channels.partner[n];
        Eigen::VectorXd p3 = p;
        for (int j = 0; j < p3.size(); ++j)
            if (j != n && j != mate)
                p3(j) *= 2.0;
        CHECK(d2d_sinr(inst.channels, V, p3, inst.noise, n) <=
              d2d_sinr(inst.channels, V, p, inst.noise, n));
    }

    SECTION("all SINRs and rates are nonnegative")
    {
        const LinkRates rates = link_rates(inst.channels, V, p, inst.noise);
        CHECK(rates.cellular.minCoeff() >= 0.0);
        CHECK(rates.d2d_direction.minCoeff() >= 0.0);
    }
}

TEST_CASE("a pure cellular drop ignores beta and the D2D model", "[metrics]")
{
    const oracles::Instance inst = oracles::make_instance(2, 2, 0, 4, 19);
    Rng rng(7);
    const auto [V, p] = oracles::random_point(inst.channels, 10.0, 0.2, rng);
    NoiseModel a = inst.noise, b = inst.noise;
    a.beta = 0.0;
    b.beta = 0.7;
    CHECK(network_sum_rate(inst.channels, V, p, a) == network_sum_rate(inst.channels, V, p, b));
}

TEST_CASE("consistent rescaling of gains, noise and beta is exactly neutral", "[metrics]")
{
    const oracles::Instance inst = oracles::make_instance(2, 2, 2, 4, 23, -90.0);
    Rng rng(13);
    const auto [V, p] = oracles::random_point(inst.channels, 10.0, 0.2, rng);

    auto rescale = [&](double s) {
        ChannelSet scaled = inst.channels;
        const double amp = std::sqrt(s);
        for (auto& m : scaled.bs_to_cell)
            m *= amp;
        for (auto& m : scaled.bs_to_d2d)
            m *= amp;
        scaled.d2d_to_cell *= amp;
        scaled.d2d_to_d2d *= amp;
        NoiseModel noise = inst.noise;
        noise.sigma2 *= s;
        noise.beta *= s;
        return std::make_pair(std::move(scaled), noise);
    };

    SECTION("power-of-two scale is bitwise neutral")
    {
        const auto [scaled, noise] = rescale(1024.0);
        for (int b = 0; b < 2; ++b)
            for (int m = 0; m < 2; ++m)
                CHECK(cellular_sinr(scaled, V, p, noise, b, m) ==
                      cellular_sinr(inst.channels, V, p, inst.noise, b, m));
        for (int n = 0; n < inst.channels.num_transceivers(); ++n)
            CHECK(d2d_sinr(scaled, V, p, noise, n) ==
                  d2d_sinr(inst.channels, V, p, inst.noise, n));
    }

    SECTION("arbitrary scale is neutral to rounding")
    {
        const auto [scaled, noise] = rescale(3.7);
        CHECK(network_sum_rate(scaled, V, p, noise) ==
              Catch::Approx(network_sum_rate(inst.channels, V, p, inst.noise)).epsilon(1e-12));
    }
}

TEST_CASE("dimension mismatches are rejected", "[metrics]")
{
    const oracles::Instance inst = oracles::make_instance(1, 2, 1, 2, 29);
    Rng rng(3);
    auto [V, p] = oracles::random_point(inst.channels, 10.0, 0.2, rng);
    Eigen::VectorXd bad_p(p.size() + 1);
    bad_p.setZero();
    CHECK_THROWS_AS(network_sum_rate(inst.channels, V, bad_p, inst.noise),
                    std::invalid_argument);
    BeamformerSet bad_V = V;
    bad_V.v.conservativeResize(Eigen::NoChange, V.v.cols() - 1);
    CHECK_THROWS_AS(network_sum_rate(inst.channels, bad_V, p, inst.noise),
                    std::invalid_argument);
}

TEST_CASE("per-BS power feasibility is reported, not enforced", "[metrics]")
{
    BeamformerSet V = BeamformerSet::zero(2, 1, 2);
    V.v(0, 0) = 3.0;
    V.v(0, 1) = 4.0; // total power 25
    CHECK(V.bs_power(0) == Catch::Approx(25.0));
    CHECK(V.feasible(25.0));
    CHECK(V.feasible(25.0 + 1e-6));
    CHECK_FALSE(V.feasible(24.0));
}
