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
//
// Command-line front end. Exit codes: 0 success, 1 runtime/I-O failure,
// 2 usage error.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "fdd2d/fdd2d.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

int run_command(const std::string& config_path, const std::string& sweep_name,
                const std::vector<std::string>& overrides, const std::string& output_dir,
                int drops, long long seed, int threads)
{
    namespace fs = std::filesystem;
    if (!fs::exists(config_path)) {
        std::cerr << "error: config file does not exist: " << config_path << "\n";
        return kExitUsage;
    }

    fdd2d::ExperimentConfig cfg;
    try {
        cfg = fdd2d::load_config_file(config_path);
        if (!sweep_name.empty())
            cfg.sweep = fdd2d::parse_sweep_kind(sweep_name);
        for (const auto& ov : overrides) {
            const auto eq = ov.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("--set expects key=value, got '" + ov + "'");
            fdd2d::apply_config_entry(cfg, ov.substr(0, eq), ov.substr(eq + 1));
        }
        if (drops > 0)
            cfg.num_drops = drops;
        if (seed >= 0)
            cfg.base_seed = static_cast<std::uint64_t>(seed);
        if (threads > 0)
            cfg.threads = threads;
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        const fdd2d::ExperimentResult result = fdd2d::run_sweep(cfg);

        fs::create_directories(output_dir);
        const fs::path csv_path = fs::path(output_dir) / (std::string(to_string(cfg.sweep)) + ".csv");
        const fs::path summary_path = fs::path(output_dir) / "summary.txt";
        {
            std::ofstream csv(csv_path, std::ios::binary);
            if (!csv)
                throw std::runtime_error("cannot write " + csv_path.string());
            fdd2d::write_csv(result, csv);
        }
        {
            std::ofstream summary(summary_path, std::ios::binary);
            if (!summary)
                throw std::runtime_error("cannot write " + summary_path.string());
            fdd2d::write_summary(cfg, result, summary);
        }

        int unconverged_points = 0;
        for (const auto& point : result.points)
            for (const auto& [mode, stats] : point.mode_stats) {
                if (stats.missing) {
                    std::cerr << "warning: no converged drops at " << result.sweep_variable
                              << "=" << point.value << " mode " << to_string(mode) << "\n";
                    ++unconverged_points;
                } else if (stats.n_converged < cfg.num_drops) {
                    std::cerr << "warning: " << (cfg.num_drops - stats.n_converged)
                              << " unconverged drops at " << result.sweep_variable << "="
                              << point.value << " mode " << to_string(mode) << "\n";
                    ++unconverged_points;
                }
            }
        std::cout << "wrote " << csv_path.string() << " and " << summary_path.string() << "\n";
        if (unconverged_points > 0)
            std::cout << "completed with " << unconverged_points
                      << " point(s) carrying unconverged drops\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"fdd2d: Monte Carlo sweeps for massive-MIMO downlink with underlaid "
                 "full-duplex D2D"};
    app.require_subcommand(1);

    std::string config_path;
    std::string sweep_name;
    std::string output_dir = ".";
    std::vector<std::string> overrides;
    int drops = 0;
    long long seed = -1;
    int threads = 0;

    CLI::App* run = app.add_subcommand("run", "run a sweep and write CSV + summary");
    run->add_option("--config", config_path, "config file (flat key = value)")->required();
    run->add_option("--sweep", sweep_name, "sweep to run: beta|nlinks|gain");
    run->add_option("--set", overrides, "override a config key, e.g. --set A=32");
    run->add_option("--output-dir", output_dir, "output directory (default: .)");
    run->add_option("--drops", drops, "number of Monte Carlo drops");
    run->add_option("--seed", seed, "base seed");
    run->add_option("--threads", threads, "worker threads (also env FDD2D_THREADS)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints usage, exit 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    return run_command(config_path, sweep_name, overrides, output_dir, drops, seed, threads);
}
