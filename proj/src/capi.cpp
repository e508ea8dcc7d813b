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

#include "ramix/error.hpp"
#include "ramix/fresnel.hpp"
#include "ramix/harness.hpp"
#include "ramix/interference.hpp"
#include "ramix/scenario_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <new>
#include <string>

struct ramix_scenario
{
    ramix::ScenarioSpec spec;
};

struct ramix_experiment
{
    ramix::ExperimentSpec spec;
    std::optional<ramix::ExperimentResult> result;
};

namespace
{
    thread_local std::string g_last_error;

    template <class Fn>
    ramix_status guarded(Fn &&fn)
    {
        try
        {
            fn();
            g_last_error.clear();
            return RAMIX_OK;
        }
        catch (const ramix::Error &e)
        {
            g_last_error = e.what();
            return static_cast<ramix_status>(static_cast<int>(e.code()));
        }
        catch (const std::bad_alloc &)
        {
            g_last_error = "out of memory";
            return RAMIX_INTERNAL;
        }
        catch (const std::exception &e)
        {
            g_last_error = e.what();
            return RAMIX_INTERNAL;
        }
        catch (...)
        {
            g_last_error = "unknown exception";
            return RAMIX_INTERNAL;
        }
    }

    void need(const void *p, const char *name)
    {
        if (p == nullptr)
            ramix::fail(ramix::ErrorCode::InvalidArgument, std::string(name) + " is NULL");
    }

    ramix::SystemConfig config_of(const ramix_array_params *p)
    {
        ramix::SystemConfig cfg;
        if (p != nullptr)
        {
            cfg.carrier_frequency = p->carrier_frequency_hz;
            cfg.antenna_count = p->antenna_count;
            cfg.element_spacing = p->spacing_m;
        }
        cfg.validate();
        return cfg;
    }

}

extern "C" {

const char *ramix_last_error(void) { return g_last_error.c_str(); }

const char *ramix_status_string(ramix_status status)
{
    switch (status)
    {
    case RAMIX_OK: return "ok";
    case RAMIX_INVALID_ARGUMENT: return "invalid argument";
    case RAMIX_DEGENERATE_GEOMETRY: return "degenerate geometry";
    case RAMIX_DOMAIN: return "domain error";
    case RAMIX_INFEASIBLE: return "infeasible";
    case RAMIX_SOLVER: return "solver failure";
    case RAMIX_IO: return "i/o error";
    case RAMIX_PARSE: return "parse error";
    case RAMIX_UNSUPPORTED: return "unsupported";
    case RAMIX_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char *ramix_version(void) { return "0.1.0"; }

void ramix_array_params_default(ramix_array_params *params)
{
    if (params == nullptr)
        return;
    const ramix::SystemConfig cfg;
    params->carrier_frequency_hz = cfg.carrier_frequency;
    params->antenna_count = cfg.antenna_count;
    params->spacing_m = 0.0;
}

ramix_status ramix_fresnel(double x, double *c, double *s)
{
    return guarded([&] {
        need(c, "c");
        need(s, "s");
        const auto f = ramix::fresnel(x);
        *c = f.c;
        *s = f.s;
    });
}

ramix_status ramix_rayleigh_distance(double aperture_m, double carrier_frequency_hz, double theta, double upsilon,
                                     double *out)
{
    return guarded([&] {
        need(out, "out");
        ramix::require(aperture_m > 0.0 && carrier_frequency_hz > 0.0 && upsilon > 0.0,
                       "aperture, frequency and coefficient must be positive");
        *out = ramix::effective_rayleigh_distance(theta, aperture_m, ramix::kSpeedOfLight / carrier_frequency_hz,
                                                  upsilon);
    });
}

ramix_status ramix_rho_exact(const ramix_array_params *params, double psi, double theta, double r, double phi,
                             double *out)
{
    return guarded([&] {
        need(out, "out");
        *out = ramix::rho_exact(psi, theta, r, phi, config_of(params));
    });
}

ramix_status ramix_rho_approx(const ramix_array_params *params, double psi, double theta, double r, double phi,
                              double *out)
{
    return guarded([&] {
        need(out, "out");
        *out = ramix::rho_approx(psi, theta, r, phi, config_of(params));
    });
}

ramix_status ramix_optimal_rotation(const ramix_array_params *params, double psi, double theta, double r,
                                    double phi_min, double phi_max, double *out)
{
    return guarded([&] {
        need(out, "out");
        *out = ramix::optimal_rotation(psi, theta, r, phi_min, phi_max, config_of(params));
    });
}

ramix_status ramix_scenario_load(const char *path, ramix_scenario **out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = nullptr;
        auto *s = new ramix_scenario{ramix::load_scenario(path)};
        *out = s;
    });
}

ramix_status ramix_scenario_from_string(const char *json, ramix_scenario **out)
{
    return guarded([&] {
        need(json, "json");
        need(out, "out");
        *out = nullptr;
        auto *s = new ramix_scenario{ramix::parse_scenario(json)};
        *out = s;
    });
}

void ramix_scenario_free(ramix_scenario *scenario) { delete scenario; }

ramix_status ramix_scenario_info_get(const ramix_scenario *scenario, ramix_scenario_info *info)
{
    return guarded([&] {
        need(scenario, "scenario");
        need(info, "info");
        const auto &c = scenario->spec.config;
        info->cell_count = c.cell_count;
        info->users_per_cell = c.users_per_cell;
        info->antenna_count = c.antenna_count;
        info->carrier_frequency_hz = c.carrier_frequency;
        info->power_w = c.power_budget;
        info->noise_w = c.noise_power;
        info->rayleigh_distance_m = c.rayleigh_distance();
    });
}

ramix_status ramix_scenario_run_scheme(const ramix_scenario *scenario, const char *scheme, uint64_t seed, int drop,
                                       int small, double *sum_rate, double *rotations, size_t rotations_len)
{
    return guarded([&] {
        need(scenario, "scenario");
        need(scheme, "scheme");
        need(sum_rate, "sum_rate");
        ramix::require(drop >= 0, "drop index must be non-negative");
        const ramix::Scheme s = ramix::parse_scheme(scheme);
        const ramix::Scenario sc = ramix::drop_scenario(scenario->spec, seed, drop);
        ramix::require(rotations == nullptr || rotations_len >= static_cast<size_t>(sc.cell_count()),
                       "rotation buffer shorter than the cell count");
        const auto opts = small ? ramix::small_scheme_options() : ramix::default_scheme_options();
        const auto out = ramix::run_scheme(s, sc, opts, ramix::drop_algorithm_seed(seed, 0, drop));
        *sum_rate = out.report.sum_rate;
        if (rotations != nullptr)
            for (int m = 0; m < sc.cell_count(); ++m)
                rotations[m] = out.rotations.at(m);
    });
}

ramix_status ramix_experiment_create(const char *preset, ramix_experiment **out)
{
    return guarded([&] {
        need(preset, "preset");
        need(out, "out");
        *out = nullptr;
        const auto presets = ramix::simulate_presets();
        if (std::find(presets.begin(), presets.end(), preset) == presets.end())
            ramix::fail(ramix::ErrorCode::InvalidArgument, std::string("unknown simulate preset '") + preset + "'");
        auto *e = new ramix_experiment;
        e->spec.preset = preset;
        *out = e;
    });
}

void ramix_experiment_free(ramix_experiment *experiment) { delete experiment; }

ramix_status ramix_experiment_set_scenario_file(ramix_experiment *experiment, const char *path)
{
    return guarded([&] {
        need(experiment, "experiment");
        if (path == nullptr || *path == '\0')
            experiment->spec.scenario_file.reset();
        else
            experiment->spec.scenario_file = path;
    });
}

ramix_status ramix_experiment_set_schemes(ramix_experiment *experiment, const char *schemes)
{
    return guarded([&] {
        need(experiment, "experiment");
        if (schemes == nullptr || *schemes == '\0')
            experiment->spec.schemes.clear();
        else
            experiment->spec.schemes = ramix::parse_scheme_list(schemes);
    });
}

ramix_status ramix_experiment_set_drops(ramix_experiment *experiment, int drops)
{
    return guarded([&] {
        need(experiment, "experiment");
        ramix::require(drops >= 1, "drops must be >= 1");
        experiment->spec.drops = drops;
        experiment->spec.drops_set = true;
    });
}

ramix_status ramix_experiment_set_seed(ramix_experiment *experiment, uint64_t seed)
{
    return guarded([&] {
        need(experiment, "experiment");
        experiment->spec.seed = seed;
    });
}

ramix_status ramix_experiment_set_output_dir(ramix_experiment *experiment, const char *dir)
{
    return guarded([&] {
        need(experiment, "experiment");
        experiment->spec.output_dir = dir == nullptr ? "" : dir;
    });
}

ramix_status ramix_experiment_set_small(ramix_experiment *experiment, int small)
{
    return guarded([&] {
        need(experiment, "experiment");
        experiment->spec.small = small != 0;
    });
}

ramix_status ramix_experiment_set_threads(ramix_experiment *experiment, int threads)
{
    return guarded([&] {
        need(experiment, "experiment");
        ramix::require(threads >= 1, "threads must be >= 1");
        experiment->spec.threads = threads;
    });
}

ramix_status ramix_experiment_run(ramix_experiment *experiment)
{
    return guarded([&] {
        need(experiment, "experiment");
        experiment->result.reset();
        experiment->result = ramix::run_experiment(experiment->spec);
    });
}

ramix_status ramix_experiment_failures(const ramix_experiment *experiment, int *failures, int *roundtrip_mismatches)
{
    return guarded([&] {
        need(experiment, "experiment");
        if (!experiment->result)
            ramix::fail(ramix::ErrorCode::InvalidArgument, "experiment has not been run");
        if (failures != nullptr)
            *failures = experiment->result->failures;
        if (roundtrip_mismatches != nullptr)
            *roundtrip_mismatches = experiment->result->roundtrip_mismatches;
    });
}

ramix_status ramix_experiment_row_count(const ramix_experiment *experiment, size_t *count)
{
    return guarded([&] {
        need(experiment, "experiment");
        need(count, "count");
        *count = experiment->result ? experiment->result->rows.size() : 0;
    });
}

ramix_status ramix_experiment_row(const ramix_experiment *experiment, size_t index, ramix_result_row *row)
{
    return guarded([&] {
        need(experiment, "experiment");
        need(row, "row");
        if (!experiment->result || index >= experiment->result->rows.size())
            ramix::fail(ramix::ErrorCode::InvalidArgument, "row index out of range");
        const auto &r = experiment->result->rows[index];
        row->scheme = ramix::scheme_name(r.scheme);
        row->sweep_var = r.sweep_var.c_str();
        row->sweep_value = r.sweep_value;
        row->drops = r.drops;
        row->failed = r.failed;
        row->mean = r.mean;
        row->std = r.std;
        row->min = r.min;
        row->max = r.max;
        row->wall_time_s = r.wall_time;
    });
}

ramix_status ramix_analyze(const char *preset, const ramix_array_params *params, const char *output_dir,
                           size_t *rows)
{
    return guarded([&] {
        need(preset, "preset");
        need(output_dir, "output_dir");
        const auto result = ramix::run_analysis(preset, config_of(params));
        std::error_code ec;
        std::filesystem::create_directories(output_dir, ec);
        if (ec)
            ramix::fail(ramix::ErrorCode::Io,
                        std::string("cannot create directory '") + output_dir + "': " + ec.message());
        const auto path = std::filesystem::path(output_dir) / "analysis.csv";
        std::ofstream os(path);
        if (!os)
            ramix::fail(ramix::ErrorCode::Io, "cannot write '" + path.string() + "'");
        ramix::write_analysis_csv(os, result);
        if (rows != nullptr)
            *rows = result.size();
    });
}

const char *const *ramix_simulate_presets(void)
{
    static const std::vector<std::string> names = ramix::simulate_presets();
    static const std::vector<const char *> ptrs = [] {
        std::vector<const char *> p;
        for (const auto &n : names)
            p.push_back(n.c_str());
        p.push_back(nullptr);
        return p;
    }();
    return ptrs.data();
}

const char *const *ramix_analyze_presets(void)
{
    static const std::vector<std::string> names = ramix::analyze_presets();
    static const std::vector<const char *> ptrs = [] {
        std::vector<const char *> p;
        for (const auto &n : names)
            p.push_back(n.c_str());
        p.push_back(nullptr);
        return p;
    }();
    return ptrs.data();
}

}
