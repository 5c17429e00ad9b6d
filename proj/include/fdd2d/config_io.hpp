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

#ifndef FDD2D_CONFIG_IO_HPP
#define FDD2D_CONFIG_IO_HPP

#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdd2d/harness.hpp"

namespace fdd2d {

namespace detail {

inline std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::string unquote(const std::string& s)
{
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

inline std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!trim(item).empty())
            out.push_back(trim(item));
    return out;
}

inline double parse_double(const std::string& key, const std::string& value)
{
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number for '" + key + "': " + value);
    }
    if (pos != value.size())
        throw std::invalid_argument("config: bad number for '" + key + "': " + value);
    return v;
}

inline int parse_int(const std::string& key, const std::string& value)
{
    const double v = parse_double(key, value);
    const int i = static_cast<int>(v);
    if (i != v)
        throw std::invalid_argument("config: '" + key + "' must be an integer");
    return i;
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& value)
{
    std::vector<double> out;
    for (const auto& item : split_list(value))
        out.push_back(parse_double(key, item));
    if (out.empty())
        throw std::invalid_argument("config: empty list for '" + key + "'");
    return out;
}

} // namespace detail

inline SweepKind parse_sweep_kind(const std::string& name)
{
    if (name == "beta")
        return SweepKind::Beta;
    if (name == "nlinks")
        return SweepKind::NLinks;
    if (name == "gain")
        return SweepKind::Gain;
    throw std::invalid_argument("unknown sweep '" + name + "' (expected beta|nlinks|gain)");
}

inline DuplexMode parse_duplex_mode(const std::string& name)
{
    if (name == "FD")
        return DuplexMode::FullDuplex;
    if (name == "HD")
        return DuplexMode::HalfDuplex;
    if (name == "CellularOnly")
        return DuplexMode::CellularOnly;
    throw std::invalid_argument("unknown mode '" + name + "' (expected FD|HD|CellularOnly)");
}

// Applies one key=value setting. Used both for config file lines and for
// --set command-line overrides; unknown keys throw.
inline void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                               const std::string& raw_value)
{
    using namespace detail;
    const std::string value = unquote(trim(raw_value));
    if (key == "cell_radius_m")
        cfg.cell_radius_m = parse_double(key, value);
    else if (key == "num_cells")
        cfg.num_cells = parse_int(key, value);
    else if (key == "num_antennas" || key == "A")
        cfg.num_antennas = parse_int(key, value);
    else if (key == "angular_dims" || key == "P")
        cfg.angular_dims = parse_int(key, value);
    else if (key == "antenna_spacing")
        cfg.antenna_spacing = parse_double(key, value);
    else if (key == "users_per_cell" || key == "M")
        cfg.users_per_cell = parse_int(key, value);
    else if (key == "links_per_cell" || key == "N")
        cfg.links_per_cell = parse_int(key, value);
    else if (key == "d2d_distance_m")
        cfg.d2d_distance_m = parse_double(key, value);
    else if (key == "pathloss_exponent")
        cfg.pathloss_exponent = parse_double(key, value);
    else if (key == "pathloss_ref_db")
        cfg.pathloss_ref_db = parse_double(key, value);
    else if (key == "min_distance_m")
        cfg.min_distance_m = parse_double(key, value);
    else if (key == "bs_power_dbm")
        cfg.bs_power_dbm = parse_double(key, value);
    else if (key == "d2d_power_dbm")
        cfg.d2d_power_dbm = parse_double(key, value);
    else if (key == "carrier_freq_ghz")
        cfg.carrier_freq_ghz = parse_double(key, value);
    else if (key == "bandwidth_mhz")
        cfg.bandwidth_mhz = parse_double(key, value);
    else if (key == "noise_psd_dbm_hz")
        cfg.noise_psd_dbm_hz = parse_double(key, value);
    else if (key == "noise_figure_db")
        cfg.noise_figure_db = parse_double(key, value);
    else if (key == "sipr_db" || key == "beta_db")
        cfg.sipr_db = parse_double(key, value);
    else if (key == "target_sinr_cell_db")
        cfg.target_sinr_cell_db = parse_double(key, value);
    else if (key == "target_sinr_d2d_db")
        cfg.target_sinr_d2d_db = parse_double(key, value);
    else if (key == "epsilon")
        cfg.epsilon = parse_double(key, value);
    else if (key == "max_outer_iters")
        cfg.max_outer_iters = parse_int(key, value);
    else if (key == "num_drops")
        cfg.num_drops = parse_int(key, value);
    else if (key == "base_seed")
        cfg.base_seed = static_cast<std::uint64_t>(parse_double(key, value));
    else if (key == "sweep")
        cfg.sweep = parse_sweep_kind(value);
    else if (key == "beta_sweep_db")
        cfg.beta_sweep_db = parse_double_list(key, value);
    else if (key == "nlinks_sweep")
        cfg.nlinks_sweep = parse_double_list(key, value);
    else if (key == "modes") {
        cfg.modes.clear();
        for (const auto& item : split_list(value))
            cfg.modes.push_back(parse_duplex_mode(item));
    } else if (key == "constraint_mode") {
        if (value == "power_only")
            cfg.constraint_mode = ConstraintMode::PowerOnly;
        else if (value == "power_qos")
            cfg.constraint_mode = ConstraintMode::PowerAndQos;
        else
            throw std::invalid_argument("config: constraint_mode must be power_only|power_qos");
    } else if (key == "d2d_numerator") {
        if (value == "partner")
            cfg.d2d_numerator = D2dSignalPower::Partner;
        else if (value == "own")
            cfg.d2d_numerator = D2dSignalPower::Own;
        else
            throw std::invalid_argument("config: d2d_numerator must be partner|own");
    } else if (key == "threads")
        cfg.threads = parse_int(key, value);
    else
        throw std::invalid_argument("config: unknown key '" + key + "'");
}

// Flat key = value file; '#' starts a comment, strings may be quoted.
inline ExperimentConfig load_config(std::istream& is)
{
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        try {
            apply_config_entry(cfg, key, value);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " +
                                        e.what());
        }
    }
    return cfg;
}

inline ExperimentConfig load_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file: " + path);
    return load_config(in);
}

} // namespace fdd2d

#endif
