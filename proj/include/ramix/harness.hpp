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

#ifndef RAMIX_HARNESS_HPP
#define RAMIX_HARNESS_HPP

#include "ramix/beamforming.hpp"
#include "ramix/joint.hpp"
#include "ramix/scenario_io.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ramix
{
    enum class Scheme
    {
        RaBf,         // PSO rotations + SCA beamforming (joint)
        FaBf,         // phi = 0 + SCA
        FaZf,         // phi = 0 + ZF
        RaZf,         // PSO rotations with ZF fitness
        DiscreteRaZf, // exhaustive rotation grid with ZF fitness
        UpperBound,   // interference-free, every user at full power
        NearOnly,     // PSO + SCA against intra-cell interference only
        MixedOnly,    // PSO + SCA against inter-cell interference only
    };

    const char *scheme_name(Scheme s);
    Scheme parse_scheme(const std::string &name);
    std::vector<Scheme> parse_scheme_list(const std::string &comma_separated);

    struct SchemeOptions
    {
        PsoConfig pso;    // SCA-fitness searches
        PsoConfig pso_zf; // ZF-fitness searches
        ScaOptions sca;
        bool warm_start = true;
        bool cache = true;
        int discrete_points = 100;
        int upper_bound_grid = 361;
        int threads = 1; // within one PSO iteration
    };

    // Full-size swarms (S = T = 50).
    SchemeOptions default_scheme_options();
    // Reduced SCA-fitness swarm for desk runs; ZF searches keep full size.
    SchemeOptions small_scheme_options();

    struct SchemeOutcome
    {
        Scheme scheme = Scheme::FaBf;
        SumRateReport report;
        RotationVector rotations;
        std::vector<CMatrix> digital; // empty for UpperBound
        std::optional<PsoResult> pso;
        std::vector<double> sca_trajectory;
        std::vector<ScaTraceRow> sca_trace;
        int inner_solves = 0;
    };

    // Per-drop context shared between schemes. RA+BF seeds its swarm with the RA+ZF
    // rotations; pass them here to avoid recomputing.
    struct SchemeContext
    {
        std::optional<RotationVector> ra_zf_rotations;
    };

    // `seed` drives every random choice; all schemes derive their streams the same way,
    // so RA+BF contains the FA+BF and RA+ZF evaluations of the same drop.
    SchemeOutcome run_scheme(Scheme scheme, const Scenario &scenario, const SchemeOptions &opts, std::uint64_t seed,
                             SchemeContext *ctx = nullptr);

    // Sum-rate re-evaluated from stored rotations and digital beamformers.
    double recompute_sum_rate(const Scenario &scenario, const RotationVector &rotations,
                              const std::vector<CMatrix> &digital);

    // ---- experiments ---------------------------------------------------

    std::vector<std::string> simulate_presets();
    std::vector<std::string> analyze_presets();

    struct SweepPoint
    {
        std::string var;
        double value = 0.0;
        ScenarioSpec spec;
    };

    struct ExperimentSpec
    {
        std::string preset = "power_sweep";
        std::optional<std::string> scenario_file;
        std::vector<Scheme> schemes; // empty: preset default
        int drops = 20;
        std::uint64_t seed = 1;
        std::string output_dir; // empty: no files
        bool small = false;     // N = 65, 5 drops unless set, reduced SCA swarm
        bool drops_set = false;
        int threads = 1;
        std::optional<SchemeOptions> scheme_options;
        double roundtrip_fraction = 0.05;
    };

    struct ResultRow
    {
        Scheme scheme = Scheme::FaBf;
        std::string sweep_var;
        double sweep_value = 0.0;
        int drops = 0; // successful
        int failed = 0;
        double mean = 0.0;
        double std = 0.0;
        double min = 0.0;
        double max = 0.0;
        std::vector<double> per_user_mean; // flattened over (cell, user)
        double wall_time = 0.0;            // mean seconds per drop
    };

    struct DropRecord
    {
        Scheme scheme = Scheme::FaBf;
        int sweep_index = 0;
        int drop = 0;
        bool ok = false;
        std::string error;
        double sum_rate = 0.0;
        std::vector<double> user_rates;
        RotationVector rotations;
        std::vector<CMatrix> digital;
        double wall_time = 0.0;
    };

    struct ExperimentResult
    {
        std::vector<SweepPoint> sweep;
        std::vector<Scheme> schemes;
        std::vector<ResultRow> rows;
        std::vector<DropRecord> drops; // sweep-major, then drop, then scheme
        int failures = 0;
        int roundtrip_checked = 0;
        int roundtrip_mismatches = 0;
    };

    ScenarioSpec base_scenario(const ExperimentSpec &spec);
    std::vector<SweepPoint> preset_sweep(const ExperimentSpec &spec, const ScenarioSpec &base);
    std::vector<Scheme> preset_schemes(const std::string &preset);
    // Placement depends on (seed, drop) only: every sweep point sees the same user draws.
    Scenario drop_scenario(const ScenarioSpec &spec, std::uint64_t seed, int drop);
    std::uint64_t drop_algorithm_seed(std::uint64_t seed, int sweep_index, int drop);

    ExperimentResult run_experiment(const ExperimentSpec &spec);

    void write_results_csv(std::ostream &os, const std::vector<ResultRow> &rows);
    void write_timing_csv(std::ostream &os, const std::vector<ResultRow> &rows);

    // ---- analysis presets ------------------------------------------------

    struct AnalysisRow
    {
        std::string series;
        double sweep = 0.0;
        double rho_exact = 0.0;
        double rho_approx = 0.0; // NaN where the approximation is undefined
        double rate_u11 = 0.0;
        double rate_u21 = 0.0;
        double sum_rate = 0.0;
        double phi_star = 0.0;
    };

    // fresnel_verify, two_cell_angle, two_cell_range, corollary.
    std::vector<AnalysisRow> run_analysis(const std::string &preset, const SystemConfig &cfg);
    void write_analysis_csv(std::ostream &os, const std::vector<AnalysisRow> &rows);
}

#endif
