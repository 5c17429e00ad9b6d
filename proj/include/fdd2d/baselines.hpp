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

#ifndef FDD2D_BASELINES_HPP
#define FDD2D_BASELINES_HPP

#include <algorithm>

#include "fdd2d/fp_solver.hpp"

namespace fdd2d {

enum class DuplexMode { FullDuplex, HalfDuplex, CellularOnly };

inline const char* to_string(DuplexMode mode)
{
    switch (mode) {
    case DuplexMode::FullDuplex: return "FD";
    case DuplexMode::HalfDuplex: return "HD";
    case DuplexMode::CellularOnly: return "CellularOnly";
    }
    return "?";
}

// The same drop with every D2D link removed: identical cellular channels,
// zero transceivers.
inline ChannelSet strip_d2d(const ChannelSet& ch)
{
    ChannelSet out;
    out.num_antennas = ch.num_antennas;
    out.num_cells = ch.num_cells;
    out.users_per_cell = ch.users_per_cell;
    out.bs_to_cell = ch.bs_to_cell;
    out.bs_to_d2d.assign(ch.num_cells, Eigen::MatrixXcd(ch.num_antennas, 0));
    out.d2d_to_cell.resize(0, ch.num_cellular());
    out.d2d_to_d2d.resize(0, 0);
    return out;
}

// Pure massive-MIMO benchmark: the FP solve on the D2D-stripped view of the
// same realization. Independent of beta and of every D2D gain.
inline SolveResult run_pure_cellular(const ChannelSet& ch, const NoiseModel& noise,
                                     const SolverConfig& cfg)
{
    SolverConfig cc_cfg = cfg;
    cc_cfg.d2d_power_caps.resize(0);
    return run_fp(strip_d2d(ch), noise, cc_cfg);
}

// Half-duplex D2D benchmark: synchronized two-slot TDD. In slot 1 the first
// transceiver of every pair transmits, in slot 2 the second; each slot is
// the full-duplex problem with the idle side's power capped at zero and no
// self-interference (beta = 0), optimized independently. The reported rate
// is the arithmetic mean of the two slot sum-rates (the 1/2 time share).
//
// The returned beamformers/powers are slot 1's operating point; the
// objective trace is the elementwise mean of the slot traces (the shorter
// one padded with its final value), so it stays nondecreasing and ends at
// the reported rate.
inline SolveResult run_hd(const ChannelSet& ch, const NoiseModel& noise,
                          const SolverConfig& cfg)
{
    NoiseModel hd_noise = noise;
    hd_noise.beta = 0.0;

    const int D = ch.num_transceivers();
    const Eigen::VectorXd caps = cfg.power_caps(D);
    auto slot_solve = [&](int transmit_parity) {
        SolverConfig slot_cfg = cfg;
        slot_cfg.d2d_power_caps = caps;
        for (int n = 0; n < D; ++n)
            if (n % 2 != transmit_parity)
                slot_cfg.d2d_power_caps(n) = 0.0;
        return run_fp(ch, hd_noise, slot_cfg);
    };
    SolveResult slot1 = slot_solve(0);
    const SolveResult slot2 = slot_solve(1);

    SolveResult res = std::move(slot1);
    res.final_sum_rate = 0.5 * (res.final_sum_rate + slot2.final_sum_rate);
    res.converged = res.converged && slot2.converged;
    res.iterations = std::max(res.iterations, slot2.iterations);
    res.inner_warning = res.inner_warning || slot2.inner_warning;
    if (res.status == SolveStatus::Converged)
        res.status = slot2.status;
    res.qos_violations += slot2.qos_violations;

    const auto& t1 = res.objective_trace;
    const auto& t2 = slot2.objective_trace;
    std::vector<double> trace(std::max(t1.size(), t2.size()));
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const double a = i < t1.size() ? t1[i] : t1.back();
        const double b = i < t2.size() ? t2[i] : t2.back();
        trace[i] = 0.5 * (a + b);
    }
    res.objective_trace = std::move(trace);
    return res;
}

// Dispatch for the experiment driver.
inline SolveResult run_mode(DuplexMode mode, const ChannelSet& ch, const NoiseModel& noise,
                            const SolverConfig& cfg)
{
    switch (mode) {
    case DuplexMode::FullDuplex: return run_fp(ch, noise, cfg);
    case DuplexMode::HalfDuplex: return run_hd(ch, noise, cfg);
    case DuplexMode::CellularOnly: return run_pure_cellular(ch, noise, cfg);
    }
    throw std::logic_error("run_mode: unknown mode");
}

} // namespace fdd2d

#endif
