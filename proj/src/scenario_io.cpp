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

#include "ramix/scenario_io.hpp"
#include "ramix/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace ramix
{
    using nlohmann::json;

    std::vector<BaseStation> ScenarioSpec::resolved_stations() const
    {
        std::vector<BaseStation> out = canonical_stations(config);
        if (stations.empty())
            return out;
        if (!canonical_positions)
            return stations;
        for (std::size_t m = 0; m < out.size(); ++m)
        {
            out[m].rotation_min = stations[m].rotation_min;
            out[m].rotation_max = stations[m].rotation_max;
        }
        return out;
    }

    int ScenarioSpec::users_in_cell(int m) const
    {
        if (!users_per_cell.empty())
            return users_per_cell.at(m);
        if (m < static_cast<int>(fixed_users.size()) && !fixed_users[m].empty())
            return static_cast<int>(fixed_users[m].size());
        return config.users_per_cell;
    }

    void ScenarioSpec::validate() const
    {
        config.validate();
        require(stations.empty() || static_cast<int>(stations.size()) == config.cell_count,
                "station list must match the cell count");
        require(range_frac_min > 0.0 && range_frac_min <= range_frac_max, "user range fractions must be ordered and positive");
        require(angle_min > 0.0 && angle_min <= angle_max && angle_max < kPi, "user angles must lie in (0, pi)");
        require(users_per_cell.empty() || static_cast<int>(users_per_cell.size()) == config.cell_count,
                "users_per_cell list must match the cell count");
        for (int m = 0; m < config.cell_count; ++m)
            require(users_in_cell(m) >= 1, "every cell needs at least one user");
        require(static_cast<int>(fixed_users.size()) <= config.cell_count, "more fixed-user cells than cells");
        for (std::size_t m = 0; m < fixed_users.size(); ++m)
        {
            require(fixed_users[m].empty() || static_cast<int>(fixed_users[m].size()) == users_in_cell(static_cast<int>(m)),
                    "fixed users must cover the whole cell");
            for (const auto &u : fixed_users[m])
                require(u.angle > 0.0 && u.angle < kPi && u.range > 0.0, "fixed user outside (0, pi) x (0, inf)");
        }
    }

    namespace
    {
        template <typename T>
        T get(const json &j, const char *key)
        {
            if (!j.contains(key))
                fail(ErrorCode::Parse, std::string("scenario: missing key '") + key + "'");
            try
            {
                return j.at(key).get<T>();
            }
            catch (const json::exception &e)
            {
                fail(ErrorCode::Parse, std::string("scenario: bad value for '") + key + "': " + e.what());
            }
        }

        std::pair<double, double> get_pair(const json &j, const char *key)
        {
            const auto v = get<std::vector<double>>(j, key);
            if (v.size() != 2)
                fail(ErrorCode::Parse, std::string("scenario: '") + key + "' must have two entries");
            return {v[0], v[1]};
        }
    }

    ScenarioSpec parse_scenario(const std::string &text)
    {
        json j;
        try
        {
            j = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            fail(ErrorCode::Parse, std::string("scenario: ") + e.what());
        }
        if (!j.is_object())
            fail(ErrorCode::Parse, "scenario: top level must be an object");

        ScenarioSpec spec;
        SystemConfig &cfg = spec.config;
        cfg.carrier_frequency = get<double>(j, "carrier_frequency_ghz") * 1e9;
        cfg.antenna_count = get<int>(j, "antenna_count");
        cfg.power_budget = dbm_to_watt(get<double>(j, "power_dbm"));
        cfg.noise_power = dbm_to_watt(get<double>(j, "noise_dbm"));
        cfg.nlos_path_count = get<int>(j, "nlos_paths");
        cfg.rng_seed = get<std::uint64_t>(j, "seed");
        if (j.contains("rayleigh_coefficient"))
            cfg.rayleigh_coefficient = get<double>(j, "rayleigh_coefficient");

        const json &upc = j.contains("users_per_cell") ? j.at("users_per_cell") : json();
        if (upc.is_array())
            spec.users_per_cell = get<std::vector<int>>(j, "users_per_cell");
        else
            cfg.users_per_cell = get<int>(j, "users_per_cell");

        const json &region = j.contains("user_region") ? j.at("user_region") : json();
        if (!region.is_object())
            fail(ErrorCode::Parse, "scenario: missing object 'user_region'");
        std::tie(spec.range_frac_min, spec.range_frac_max) = get_pair(region, "range_frac");
        const auto [alo, ahi] = get_pair(region, "angle_deg");
        spec.angle_min = deg_to_rad(alo);
        spec.angle_max = deg_to_rad(ahi);

        const json &cells = j.contains("cells") ? j.at("cells") : json();
        if (!cells.is_array() || cells.empty())
            fail(ErrorCode::Parse, "scenario: 'cells' must be a non-empty list");
        cfg.cell_count = static_cast<int>(cells.size());
        if (j.contains("cell_count") && get<int>(j, "cell_count") != cfg.cell_count)
            fail(ErrorCode::Parse, "scenario: 'cell_count' disagrees with the 'cells' list");
        // Missing positions in every cell selects the canonical layout.
        bool any_position = false;
        for (const auto &c : cells)
            any_position = any_position || c.contains("position_m");
        const std::vector<BaseStation> canonical = canonical_stations(cfg);
        for (int m = 0; m < cfg.cell_count; ++m)
        {
            const json &c = cells[m];
            BaseStation bs = canonical[m];
            if (any_position)
            {
                const auto [x, y] = get_pair(c, "position_m");
                bs.position = {x, y};
            }
            if (c.contains("rotation_limits_deg"))
            {
                const auto [lo, hi] = get_pair(c, "rotation_limits_deg");
                bs.rotation_min = deg_to_rad(lo);
                bs.rotation_max = deg_to_rad(hi);
            }
            if (c.contains("facing"))
            {
                bs.facing = get<int>(c, "facing");
                if (bs.facing != 1 && bs.facing != -1)
                    fail(ErrorCode::Parse, "scenario: 'facing' must be 1 or -1");
            }
            if (!(bs.rotation_min <= bs.rotation_max))
                fail(ErrorCode::Parse, "scenario: rotation limits must be ordered");
            spec.stations.push_back(bs);
        }
        spec.canonical_positions = !any_position;

        if (j.contains("users"))
        {
            const json &users = j.at("users");
            if (!users.is_array())
                fail(ErrorCode::Parse, "scenario: 'users' must be a list per cell");
            for (const auto &cell : users)
            {
                std::vector<UserSpec> list;
                for (const auto &u : cell)
                    list.push_back({deg_to_rad(get<double>(u, "angle_deg")), get<double>(u, "range_m")});
                spec.fixed_users.push_back(std::move(list));
            }
        }
        try
        {
            spec.validate();
        }
        catch (const Error &e)
        {
            fail(ErrorCode::Parse, std::string("scenario: ") + e.what());
        }
        return spec;
    }

    ScenarioSpec load_scenario(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            fail(ErrorCode::Io, "cannot open scenario file '" + path + "'");
        std::ostringstream os;
        os << in.rdbuf();
        try
        {
            return parse_scenario(os.str());
        }
        catch (const Error &e)
        {
            fail(e.code(), path + ": " + e.what());
        }
    }

    Scenario place_users(const ScenarioSpec &spec, std::mt19937_64 &rng)
    {
        spec.validate();
        Scenario sc;
        sc.config = spec.config;
        sc.stations = spec.resolved_stations();
        const int M = spec.config.cell_count;
        const int B = M;
        const double R = spec.config.rayleigh_distance();
        std::uniform_real_distribution<double> range(spec.range_frac_min * R, spec.range_frac_max * R);
        std::uniform_real_distribution<double> angle(spec.angle_min, spec.angle_max);
        std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
        sc.users.resize(M);
        for (int m = 0; m < M; ++m)
        {
            const int K = spec.users_in_cell(m);
            const bool fixed = m < static_cast<int>(spec.fixed_users.size()) && !spec.fixed_users[m].empty();
            for (int k = 0; k < K; ++k)
            {
                UserPlacement u;
                u.cell = m;
                u.index = k;
                // Draw order is fixed so placements do not depend on which users are pinned.
                const double r = range(rng);
                const double th = angle(rng);
                u.range = fixed ? spec.fixed_users[m][k].range : r;
                u.angle = fixed ? spec.fixed_users[m][k].angle : th;
                for (int l = 0; l < spec.config.nlos_path_count; ++l)
                {
                    Scatterer s;
                    s.range = range(rng);
                    s.angle = angle(rng);
                    s.fading.resize(B);
                    for (int i = 0; i < B; ++i)
                    {
                        const double re = normal(rng);
                        const double im = normal(rng);
                        s.fading[i] = cdouble(re, im);
                    }
                    u.scatterers.push_back(std::move(s));
                }
                sc.users[m].push_back(std::move(u));
            }
        }
        sc.validate();
        return sc;
    }
}
