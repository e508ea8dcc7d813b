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

#ifndef RAMIX_SCENARIO_IO_HPP
#define RAMIX_SCENARIO_IO_HPP

#include "ramix/scenario.hpp"

#include <optional>
#include <random>
#include <string>
#include <vector>

namespace ramix
{
    struct UserSpec
    {
        double angle = kPi / 2; // rad
        double range = 1.0;     // m
    };

    // Drop template: everything except the random user and scatterer draws.
    struct ScenarioSpec
    {
        SystemConfig config;
        std::vector<BaseStation> stations; // empty: canonical layout for config
        // Positions follow the canonical layout for the current config (limits and
        // facing still come from `stations`).
        bool canonical_positions = true;
        double range_frac_min = 0.1;       // of the boresight Rayleigh distance
        double range_frac_max = 1.0;
        double angle_min = kPi / 3;
        double angle_max = 2 * kPi / 3;
        // Optional users per cell ([cell][user]); cells left empty are drawn at random.
        std::vector<std::vector<UserSpec>> fixed_users;
        // Users per cell when they differ between cells; empty means config.users_per_cell.
        std::vector<int> users_per_cell;

        std::vector<BaseStation> resolved_stations() const;
        int users_in_cell(int m) const;
        void validate() const;
    };

    // Parses the JSON scenario format. Keys: carrier_frequency_ghz, antenna_count,
    // cells [{position_m, rotation_limits_deg, facing?}], users_per_cell, user_region
    // {range_frac, angle_deg}, power_dbm, noise_dbm, nlos_paths, seed; optional
    // cell_count, rayleigh_coefficient, users [[{angle_deg, range_m}]].
    ScenarioSpec parse_scenario(const std::string &text);
    ScenarioSpec load_scenario(const std::string &path);

    // Users uniform over the range x angle box; each gets config.nlos_path_count
    // scatterers drawn from the same box with one CN(0, 1) fading draw per BS.
    Scenario place_users(const ScenarioSpec &spec, std::mt19937_64 &rng);
}

#endif
