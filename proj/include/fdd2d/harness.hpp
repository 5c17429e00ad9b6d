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

#ifndef FDD2D_HARNESS_HPP
#define FDD2D_HARNESS_HPP

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "fdd2d/baselines.hpp"
#include "fdd2d/channel.hpp"
#include "fdd2d/topology.hpp"

namespace fdd2d {

enum class SweepKind { Beta, NLinks, Gain };

inline const char* to_string(SweepKind kind)
{
    switch (kind) {
    case SweepKind::Beta: return "beta";
    case SweepKind::NLinks: return "nlinks";
    case SweepKind::Gain: return "gain";
    }
    return "?";
}

// Experiment parameters: the simulation table plus Monte Carlo control. dB
// and dBm fields keep their configured units here and are converted to
// linear exactly once, in the derived accessors.
struct ExperimentConfig {
    double cell_radius_m = 500.0; // circular-equivalent radius; cells are equal-area hexagons
    int num_cells = 3;
    int num_antennas = 16;
    int angular_dims = 0; // 0 derives P = max(1, A/2)
    double antenna_spacing = 0.3;
    int users_per_cell = 4;
    int links_per_cell = 14;
    double d2d_distance_m = 50.0;
    double pathloss_exponent = 3.76;
    double pathloss_ref_db = -15.3;
    double min_distance_m = 1.0;
    double bs_power_dbm = 46.0;
    double d2d_power_dbm = 23.0;
    double carrier_freq_ghz = 2.0; // informational: the gain model is distance + fading
    double bandwidth_mhz = 10.0;
    double noise_psd_dbm_hz = -174.0;
    double noise_figure_db = 9.0;
    double sipr_db = -100.0;
    double target_sinr_cell_db = 0.0;
    double target_sinr_d2d_db = 0.0;
    double epsilon = 1e-5;
    int max_outer_iters = 200;

    int num_drops = 100;
    std::uint64_t base_seed = 1;
    SweepKind sweep = SweepKind::Beta;
    std::vector<double> beta_sweep_db = {-110, -105, -100, -95, -90, -85, -80};
    std::vector<double> nlinks_sweep = {10, 15, 20, 25, 30, 35, 40};
    std::vector<DuplexMode> modes = {DuplexMode::FullDuplex, DuplexMode::HalfDuplex};
    ConstraintMode constraint_mode = ConstraintMode::PowerOnly;
    D2dSignalPower d2d_numerator = D2dSignalPower::Partner;
    int threads = 0; // 0: FDD2D_THREADS env var, then hardware concurrency

    // Center-to-vertex radius of the hexagon whose area equals the
    // configured circular cell area.
    double hex_radius() const
    {
        return cell_radius_m * std::sqrt(2.0 * M_PI / (3.0 * std::sqrt(3.0)));
    }

    double noise_watts() const
    {
        return noise_power_watts(noise_psd_dbm_hz, bandwidth_mhz * 1e6, noise_figure_db);
    }

    NoiseModel noise() const { return {noise_watts(), db_to_linear(sipr_db)}; }

    SteeringConfig steering() const
    {
        SteeringConfig cfg = SteeringConfig::for_antennas(num_antennas, antenna_spacing);
        if (angular_dims > 0)
            cfg.angular_dims = angular_dims;
        return cfg;
    }

    PathLossParams pathloss() const
    {
        return {db_to_linear(pathloss_ref_db), pathloss_exponent, min_distance_m};
    }

    SolverConfig solver() const
    {
        SolverConfig cfg;
        cfg.epsilon = epsilon;
        cfg.max_outer_iters = max_outer_iters;
        cfg.constraint_mode = constraint_mode;
        cfg.gamma_cell = db_to_linear(target_sinr_cell_db);
        cfg.gamma_d2d = db_to_linear(target_sinr_d2d_db);
        cfg.bs_power = dbm_to_watts(bs_power_dbm);
        cfg.d2d_power = dbm_to_watts(d2d_power_dbm);
        cfg.signal_power = d2d_numerator;
        return cfg;
    }

    const std::vector<double>& sweep_values() const
    {
        return sweep == SweepKind::Beta ? beta_sweep_db : nlinks_sweep;
    }

    const char* sweep_variable() const
    {
        return sweep == SweepKind::Beta ? "beta_db" : "n_links";
    }

    ExperimentConfig at_sweep_value(double value) const
    {
        ExperimentConfig cfg = *this;
        if (sweep == SweepKind::Beta) {
            cfg.sipr_db = value;
        } else {
            cfg.links_per_cell = static_cast<int>(value);
            if (cfg.links_per_cell < 0 || cfg.links_per_cell != value)
                throw std::invalid_argument("sweep: link counts must be nonnegative integers");
        }
        return cfg;
    }

    void validate() const
    {
        if (num_drops < 1)
            throw std::invalid_argument("ExperimentConfig: num_drops must be >= 1");
        if (num_cells < 1 || users_per_cell < 1 || links_per_cell < 0)
            throw std::invalid_argument("ExperimentConfig: bad network size");
        if (num_antennas < 1)
            throw std::invalid_argument("ExperimentConfig: num_antennas must be >= 1");
        if (sweep_values().empty())
            throw std::invalid_argument("ExperimentConfig: empty sweep");
        if (modes.empty())
            throw std::invalid_argument("ExperimentConfig: no modes requested");
        steering().validate();
        solver().validate();
    }
};

inline int resolve_threads(int requested)
{
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("FDD2D_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0)
            return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// Every requested mode solved on one shared realization (paired design).
struct DropResult {
    std::map<DuplexMode, SolveResult> per_mode;
};

// Per-drop summary kept by the sweep driver.
struct ModeOutcome {
    double rate = 0.0;
    bool converged = false;
    int iterations = 0;
    int qos_violations = 0;
};

struct DropRecord {
    std::map<DuplexMode, ModeOutcome> modes;
};

// One Monte Carlo drop: derive the drop seed, build a scenario and channel
// set, and solve every requested mode on that same realization.
inline DropResult run_drop(const ExperimentConfig& cfg, int drop_index)
{
    cfg.validate();
    const Rng base(hash_seed(cfg.base_seed, static_cast<std::uint64_t>(drop_index)));
    const CellLayout layout = generate_layout(cfg.num_cells, cfg.hex_radius());
    const NetworkScenario scenario = make_scenario(layout, cfg.users_per_cell,
                                                   cfg.links_per_cell, cfg.d2d_distance_m,
                                                   cfg.pathloss(), base);
    const ChannelSet channels = build_channel_set(scenario, cfg.steering(), base);
    const NoiseModel nm = cfg.noise();
    const SolverConfig solver_cfg = cfg.solver();

    DropResult out;
    for (DuplexMode mode : cfg.modes)
        out.per_mode.emplace(mode, run_mode(mode, channels, nm, solver_cfg));
    return out;
}

struct ModeStats {
    double mean_rate = std::numeric_limits<double>::quiet_NaN();
    double std_error = std::numeric_limits<double>::quiet_NaN();
    int n_converged = 0;
    double mean_iters = std::numeric_limits<double>::quiet_NaN();
    double qos_violations_per_drop = std::numeric_limits<double>::quiet_NaN();
    bool missing = true; // no converged drop at this point
};

struct RatioStats {
    double mean = std::numeric_limits<double>::quiet_NaN();       // mean of per-drop ratios
    double std_error = std::numeric_limits<double>::quiet_NaN();
    double ratio_of_means = std::numeric_limits<double>::quiet_NaN();
    int n_pairs = 0;
};

struct SweepPoint {
    double value = 0.0;
    std::vector<std::pair<DuplexMode, ModeStats>> mode_stats;
    std::vector<std::tuple<DuplexMode, DuplexMode, RatioStats>> ratios;
};

struct ExperimentResult {
    std::string sweep_variable;
    std::vector<SweepPoint> points;
};

namespace detail {

inline std::pair<double, double> mean_and_se(const std::vector<double>& xs)
{
    const int n = static_cast<int>(xs.size());
    double mean = 0.0;
    for (double x : xs)
        mean += x;
    mean /= n;
    if (n < 2)
        return {mean, 0.0};
    double var = 0.0;
    for (double x : xs)
        var += (x - mean) * (x - mean);
    var /= (n - 1);
    return {mean, std::sqrt(var / n)};
}

} // namespace detail

// Order-independent reduction of per-drop outcomes into means, standard
// errors and paired ratio series. Means cover converged drops only; a point
// with no converged drop stays flagged missing rather than fabricated.
inline ExperimentResult aggregate(const std::string& sweep_variable,
                                  const std::vector<double>& values,
                                  const std::vector<DuplexMode>& modes,
                                  const std::vector<std::vector<DropRecord>>& per_point)
{
    ExperimentResult result;
    result.sweep_variable = sweep_variable;
    for (std::size_t pi = 0; pi < values.size(); ++pi) {
        SweepPoint point;
        point.value = values[pi];
        const auto& drops = per_point[pi];
        for (DuplexMode mode : modes) {
            ModeStats stats;
            std::vector<double> rates;
            double iters = 0.0, viols = 0.0;
            for (const auto& drop : drops) {
                const auto it = drop.modes.find(mode);
                if (it == drop.modes.end() || !it->second.converged)
                    continue;
                rates.push_back(it->second.rate);
                iters += it->second.iterations;
                viols += it->second.qos_violations;
            }
            stats.n_converged = static_cast<int>(rates.size());
            if (stats.n_converged > 0) {
                const auto [mean, se] = detail::mean_and_se(rates);
                stats.mean_rate = mean;
                stats.std_error = se;
                stats.mean_iters = iters / stats.n_converged;
                stats.qos_violations_per_drop = viols / stats.n_converged;
                stats.missing = false;
            }
            point.mode_stats.emplace_back(mode, stats);
        }

        static constexpr std::pair<DuplexMode, DuplexMode> kRatioPairs[] = {
            {DuplexMode::FullDuplex, DuplexMode::HalfDuplex},
            {DuplexMode::FullDuplex, DuplexMode::CellularOnly},
            {DuplexMode::HalfDuplex, DuplexMode::CellularOnly},
        };
        for (const auto& [num, den] : kRatioPairs) {
            bool have_num = false, have_den = false;
            for (DuplexMode m : modes) {
                have_num |= (m == num);
                have_den |= (m == den);
            }
            if (!have_num || !have_den)
                continue;
            std::vector<double> ratios;
            double num_sum = 0.0, den_sum = 0.0;
            for (const auto& drop : drops) {
                const auto in = drop.modes.find(num);
                const auto id = drop.modes.find(den);
                if (in == drop.modes.end() || id == drop.modes.end())
                    continue;
                if (!in->second.converged || !id->second.converged)
                    continue;
                ratios.push_back(in->second.rate / id->second.rate);
                num_sum += in->second.rate;
                den_sum += id->second.rate;
            }
            RatioStats rs;
            rs.n_pairs = static_cast<int>(ratios.size());
            if (rs.n_pairs > 0) {
                const auto [mean, se] = detail::mean_and_se(ratios);
                rs.mean = mean;
                rs.std_error = se;
                rs.ratio_of_means = num_sum / den_sum;
            }
            point.ratios.emplace_back(num, den, rs);
        }
        result.points.push_back(std::move(point));
    }
    return result;
}

// Full sweep: every (sweep value, drop) pair is an independent work unit
// dispatched to a small worker pool; results land in preallocated slots, so
// the aggregate is identical no matter how the pool schedules them.
inline ExperimentResult run_sweep(const ExperimentConfig& cfg)
{
    cfg.validate();
    const std::vector<double>& values = cfg.sweep_values();
    std::vector<ExperimentConfig> point_cfgs;
    point_cfgs.reserve(values.size());
    for (double v : values)
        point_cfgs.push_back(cfg.at_sweep_value(v));

    std::vector<std::vector<DropRecord>> table(values.size());
    for (auto& row : table)
        row.resize(cfg.num_drops);

    const std::size_t total = values.size() * static_cast<std::size_t>(cfg.num_drops);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total)
                return;
            const std::size_t pi = i / cfg.num_drops;
            const int di = static_cast<int>(i % cfg.num_drops);
            const DropResult full = run_drop(point_cfgs[pi], di);
            DropRecord rec;
            for (const auto& [mode, solve] : full.per_mode) {
                ModeOutcome oc;
                oc.rate = solve.final_sum_rate;
                oc.converged = solve.converged;
                oc.iterations = solve.iterations;
                oc.qos_violations = solve.qos_violations;
                rec.modes.emplace(mode, oc);
            }
            table[pi][di] = std::move(rec);
        }
    };

    const int nthreads = std::min<int>(resolve_threads(cfg.threads), static_cast<int>(total));
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    return aggregate(cfg.sweep_variable(), values, cfg.modes, table);
}

// --- output -----------------------------------------------------------

namespace detail {

inline std::string fmt_number(double x)
{
    if (!std::isfinite(x))
        return ""; // missing cell
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

} // namespace detail

// CSV schema: <sweep variable>,mode,mean_rate,stderr,n_converged,mean_iters,
// ratio_of_means. Ratio series appear as pseudo-mode rows "A/B" whose
// mean_rate column is the mean of per-drop ratios and whose last column is
// the ratio of the two mode means.
inline void write_csv(const ExperimentResult& result, std::ostream& os)
{
    os << result.sweep_variable
       << ",mode,mean_rate,stderr,n_converged,mean_iters,ratio_of_means\n";
    for (const auto& point : result.points) {
        const std::string value = detail::fmt_number(point.value);
        for (const auto& [mode, stats] : point.mode_stats) {
            os << value << ',' << to_string(mode) << ',' << detail::fmt_number(stats.mean_rate)
               << ',' << detail::fmt_number(stats.std_error) << ',' << stats.n_converged << ','
               << detail::fmt_number(stats.mean_iters) << ",\n";
        }
        for (const auto& [num, den, rs] : point.ratios) {
            os << value << ',' << to_string(num) << '/' << to_string(den) << ','
               << detail::fmt_number(rs.mean) << ',' << detail::fmt_number(rs.std_error) << ','
               << rs.n_pairs << ",," << detail::fmt_number(rs.ratio_of_means) << '\n';
        }
    }
}

// Human-readable per-point table with convergence statistics.
inline void write_summary(const ExperimentConfig& cfg, const ExperimentResult& result,
                          std::ostream& os)
{
    os << "sweep " << to_string(cfg.sweep) << " over " << result.sweep_variable << ", "
       << cfg.num_drops << " drops, seed " << cfg.base_seed << "\n";
    char line[256];
    for (const auto& point : result.points) {
        for (const auto& [mode, stats] : point.mode_stats) {
            if (stats.missing) {
                std::snprintf(line, sizeof(line), "%s=%-8g %-12s MISSING (0 converged)\n",
                              result.sweep_variable.c_str(), point.value, to_string(mode));
                os << line;
                continue;
            }
            std::snprintf(line, sizeof(line),
                          "%s=%-8g %-12s mean=%-10.4f se=%-8.4f converged=%d/%d "
                          "iters=%.1f qos_viol=%.2f\n",
                          result.sweep_variable.c_str(), point.value, to_string(mode),
                          stats.mean_rate, stats.std_error, stats.n_converged, cfg.num_drops,
                          stats.mean_iters, stats.qos_violations_per_drop);
            os << line;
        }
        for (const auto& [num, den, rs] : point.ratios) {
            std::snprintf(line, sizeof(line),
                          "%s=%-8g %s/%-10s mean=%-10.4f se=%-8.4f pairs=%d "
                          "ratio_of_means=%.4f\n",
                          result.sweep_variable.c_str(), point.value, to_string(num),
                          to_string(den), rs.mean, rs.std_error, rs.n_pairs, rs.ratio_of_means);
            os << line;
        }
    }
}

} // namespace fdd2d

#endif
