// SPDX-License-Identifier: Apache-2.0
//
// ramix - rotatable-antenna multi-cell mixed-field simulator
// Copyright (C) 2026 The ramix authors
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

#include "ramix/ramix.h"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>

namespace
{
    int report(ramix_status st, const char *what)
    {
        std::fprintf(stderr, "ramix: %s: %s (%s)\n", what, ramix_last_error(), ramix_status_string(st));
        return 2;
    }

    int pool_size(int requested)
    {
        int threads = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
        if (threads < 1)
            threads = 1;
        if (const char *env = std::getenv("SIM_THREADS"))
        {
            const int cap = std::atoi(env);
            if (cap >= 1 && cap < threads)
                threads = cap;
        }
        return threads;
    }

    std::string join(const char *const *names)
    {
        std::string out;
        for (; *names != nullptr; ++names)
            out += std::string(out.empty() ? "" : ", ") + *names;
        return out;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"ramix: rotatable-antenna multi-cell mixed-field simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", ramix_version());

    std::string preset;
    std::string scenario;
    std::string schemes;
    std::string out_dir = "out";
    int drops = 0;
    std::uint64_t seed = 1;
    bool small = false;
    int threads = 0;

    auto *sim = app.add_subcommand("simulate", "Monte Carlo sweep over user drops and schemes");
    sim->add_option("--preset", preset, "Preset: " + join(ramix_simulate_presets()))->required();
    sim->add_option("--scenario", scenario, "Scenario JSON file")->check(CLI::ExistingFile);
    sim->add_option("--schemes", schemes, "Comma-separated schemes (default: preset)");
    sim->add_option("--drops", drops, "Monte Carlo drops")->check(CLI::PositiveNumber);
    sim->add_option("--seed", seed, "Master seed");
    sim->add_option("--out", out_dir, "Output directory");
    sim->add_flag("--small", small, "Desk profile: N = 65, 5 drops, reduced swarms");
    sim->add_option("--threads", threads, "Worker threads (capped by SIM_THREADS)");

    ramix_array_params params;
    ramix_array_params_default(&params);
    double freq_ghz = params.carrier_frequency_hz / 1e9;
    auto *ana = app.add_subcommand("analyze", "Closed-form interference analysis");
    ana->add_option("--preset", preset, "Preset: " + join(ramix_analyze_presets()))->required();
    ana->add_option("--out", out_dir, "Output directory");
    ana->add_option("--antennas", params.antenna_count, "Array size N (odd)");
    ana->add_option("--frequency-ghz", freq_ghz, "Carrier frequency in GHz");

    CLI11_PARSE(app, argc, argv);

    if (*ana)
    {
        params.carrier_frequency_hz = freq_ghz * 1e9;
        size_t rows = 0;
        if (const auto st = ramix_analyze(preset.c_str(), &params, out_dir.c_str(), &rows); st != RAMIX_OK)
            return report(st, "analyze");
        std::printf("%s: %zu rows -> %s/analysis.csv\n", preset.c_str(), rows, out_dir.c_str());
        return 0;
    }

    ramix_experiment *exp = nullptr;
    if (const auto st = ramix_experiment_create(preset.c_str(), &exp); st != RAMIX_OK)
        return report(st, "simulate");
    auto check = [&](ramix_status st, const char *what) {
        if (st == RAMIX_OK)
            return true;
        report(st, what);
        return false;
    };
    const bool ok = check(ramix_experiment_set_scenario_file(exp, scenario.c_str()), "--scenario") &&
                    check(ramix_experiment_set_schemes(exp, schemes.c_str()), "--schemes") &&
                    (drops == 0 || check(ramix_experiment_set_drops(exp, drops), "--drops")) &&
                    check(ramix_experiment_set_seed(exp, seed), "--seed") &&
                    check(ramix_experiment_set_output_dir(exp, out_dir.c_str()), "--out") &&
                    check(ramix_experiment_set_small(exp, small ? 1 : 0), "--small") &&
                    check(ramix_experiment_set_threads(exp, pool_size(threads)), "--threads") &&
                    check(ramix_experiment_run(exp), "simulate");
    if (!ok)
    {
        ramix_experiment_free(exp);
        return 2;
    }

    size_t count = 0;
    ramix_experiment_row_count(exp, &count);
    std::printf("%-14s %-16s %10s %6s %6s %12s %10s\n", "scheme", "sweep_var", "value", "drops", "failed", "mean",
                "std");
    for (size_t i = 0; i < count; ++i)
    {
        ramix_result_row row;
        ramix_experiment_row(exp, i, &row);
        std::printf("%-14s %-16s %10.4g %6d %6d %12.6f %10.6f\n", row.scheme, row.sweep_var, row.sweep_value,
                    row.drops, row.failed, row.mean, row.std);
    }
    int failures = 0;
    int mismatches = 0;
    ramix_experiment_failures(exp, &failures, &mismatches);
    ramix_experiment_free(exp);
    std::printf("results -> %s/results.csv (failed drops: %d, round-trip mismatches: %d)\n", out_dir.c_str(),
                failures, mismatches);
    return failures == 0 && mismatches == 0 ? 0 : 1;
}
