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

#include "oracles.hpp"

#include "ramix/error.hpp"
#include "ramix/scenario.hpp"
#include "ramix/scenario_io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace ramix;

namespace
{
    const char *kScenario = R"({
      "carrier_frequency_ghz": 28,
      "antenna_count": 65,
      "cells": [{"rotation_limits_deg": [-30, 30]}, {"rotation_limits_deg": [-20, 25]}],
      "users_per_cell": 3,
      "user_region": {"range_frac": [0.1, 1.0], "angle_deg": [60, 120]},
      "power_dbm": 30,
      "noise_dbm": -80,
      "nlos_paths": 2,
      "seed": 5
    })";

    template <typename Fn>
    ErrorCode code_of(Fn &&fn)
    {
        try
        {
            fn();
        }
        catch (const Error &e)
        {
            return e.code();
        }
        return static_cast<ErrorCode>(0);
    }
}

TEST_SUITE("scenario")
{
    TEST_CASE("unit conversions")
    {
        CHECK(dbm_to_watt(30.0) == doctest::Approx(1.0));
        CHECK(dbm_to_watt(-80.0) == doctest::Approx(1e-11));
        CHECK(watt_to_dbm(0.1) == doctest::Approx(20.0));
        CHECK(deg_to_rad(180.0) == doctest::Approx(kPi));
    }

    TEST_CASE("Rayleigh distance")
    {
        const double lambda = kSpeedOfLight / 28e9;
        const double classic = effective_rayleigh_distance(kPi / 2, 1.0, lambda, 1.0);
        CHECK(classic == doctest::Approx(oracle::rayleigh_distance(1.0, 28e9)).epsilon(1e-12));
        CHECK(classic > 186.0);
        CHECK(classic < 188.0);
        // Off-boresight users see a shorter effective distance.
        CHECK(effective_rayleigh_distance(kPi / 3, 1.0, lambda, 1.0) == doctest::Approx(0.75 * classic));

        SystemConfig cfg;
        CHECK(cfg.aperture() == doctest::Approx(128 * cfg.spacing()));
        CHECK(cfg.rayleigh_distance() == doctest::Approx(0.367 * 2.0 * cfg.aperture() * cfg.aperture() / cfg.wavelength()));
    }

    TEST_CASE("config validation")
    {
        SystemConfig cfg;
        CHECK_NOTHROW(cfg.validate());
        cfg.antenna_count = 64;
        CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::InvalidArgument);
        cfg.antenna_count = 65;
        cfg.power_budget = 0.0;
        CHECK(code_of([&] { cfg.validate(); }) == ErrorCode::InvalidArgument);
    }

    TEST_CASE("steering vectors have unit norm")
    {
        SystemConfig cfg;
        for (double theta : {0.3, 1.2, kPi / 2, 2.5})
            for (double phi : {-0.5, 0.0, 0.4})
            {
                CHECK(near_steering(theta, 12.0, phi, cfg).norm() == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(far_steering(theta, phi, cfg).norm() == doctest::Approx(1.0).epsilon(1e-12));
            }
    }

    TEST_CASE("element distances")
    {
        const double d = 0.5 * kSpeedOfLight / 28e9;
        for (int n : {-64, -10, 0, 7, 64})
        {
            const double r = 25.0;
            const double theta = 0.4 * kPi;
            const double phi = 0.1;
            const double exact = oracle::exact_distance(r, theta, phi, n, d);
            CHECK(element_distance(r, theta, phi, n, d) == doctest::Approx(exact).epsilon(1e-13));
            // Second-order expansion error is O((n d)^3 / r^2).
            const double nd = std::abs(n * d);
            CHECK(std::abs(element_distance_taylor(r, theta, phi, n, d) - exact) <= nd * nd * nd / (r * r) + 1e-12);
        }
    }

    TEST_CASE("near-field phase follows the expanded distance")
    {
        SystemConfig cfg;
        cfg.antenna_count = 9;
        const double r = 3.0;
        const double theta = 1.1;
        const double phi = -0.2;
        const CVector b = near_steering(theta, r, phi, cfg);
        const double k = 2.0 * kPi / cfg.wavelength();
        for (int n = -4; n <= 4; ++n)
        {
            const double rn = element_distance_taylor(r, theta, phi, n, cfg.spacing());
            const cdouble expected = std::polar(1.0 / 3.0, k * (rn - r));
            CHECK(std::abs(b(n + 4) - expected) < 1e-9);
        }
    }

    TEST_CASE("inter-cell angle branches")
    {
        BaseStation bs;
        bs.position = {1.0, 2.0};
        CHECK(inter_cell_angle({2.0, 3.0}, bs) == doctest::Approx(kPi / 4));
        CHECK(inter_cell_angle({0.0, 3.0}, bs) == doctest::Approx(3 * kPi / 4));
        CHECK(inter_cell_angle({0.0, 1.0}, bs) == doctest::Approx(5 * kPi / 4));
        CHECK(inter_cell_angle({2.0, 1.0}, bs) == doctest::Approx(-kPi / 4));
        CHECK(inter_cell_angle({1.0, 5.0}, bs) == doctest::Approx(kPi / 2));
        CHECK(inter_cell_distance({4.0, 6.0}, bs) == doctest::Approx(5.0));
        bs.facing = -1;
        CHECK(inter_cell_angle({2.0, 1.0}, bs) == doctest::Approx(kPi / 4));
        CHECK(code_of([&] { inter_cell_angle({1.0, 2.0}, bs); }) == ErrorCode::DegenerateGeometry);
    }

    TEST_CASE("canonical layout")
    {
        SystemConfig cfg;
        cfg.cell_count = 3;
        const auto st = canonical_stations(cfg);
        REQUIRE(st.size() == 3);
        CHECK(st[1].position.y - st[0].position.y == doctest::Approx(2.0 * cfg.rayleigh_distance()));
        CHECK(st[0].facing == 1);
        CHECK(st[1].facing == -1);
        CHECK(st[2].facing == 1);
    }

    TEST_CASE("LoS channel magnitudes")
    {
        ScenarioSpec spec;
        spec.config.antenna_count = 33;
        spec.config.nlos_path_count = 0;
        spec.config.users_per_cell = 2;
        std::mt19937_64 rng(3);
        const Scenario sc = place_users(spec, rng);
        const ChannelSet ch = build_channels(sc, {0.1, -0.2});
        const double lambda = sc.config.wavelength();
        for (int i = 0; i < 2; ++i)
            for (int m = 0; m < 2; ++m)
                for (int k = 0; k < 2; ++k)
                {
                    const auto &h = ch.at(i, m, k);
                    const double dist = i == m ? sc.users[m][k].range
                                               : inter_cell_distance(sc.user_position(m, k), sc.stations[i]);
                    CHECK(h.coefficients.norm() ==
                          doctest::Approx(std::sqrt(33.0) * lambda / (4 * kPi * dist)).epsilon(1e-12));
                    CHECK((h.regime == Regime::NearField) == (i == m));
                }
        CHECK(code_of([&] { build_channels(sc, {0.0, 1.0}); }) == ErrorCode::InvalidArgument);
        CHECK(code_of([&] { build_channels(sc, {0.0}); }) == ErrorCode::InvalidArgument);
    }

    TEST_CASE("channel construction is a pure function")
    {
        ScenarioSpec spec;
        spec.config.antenna_count = 17;
        std::mt19937_64 rng(11);
        const Scenario sc = place_users(spec, rng);
        const ChannelSet a = build_channels(sc, {0.05, 0.2});
        const ChannelSet b = build_channels(sc, {0.05, 0.2});
        for (int i = 0; i < 2; ++i)
            for (int m = 0; m < 2; ++m)
                for (int k = 0; k < 3; ++k)
                    CHECK((a.at(i, m, k).coefficients - b.at(i, m, k).coefficients).norm() == 0.0);
    }
}

TEST_SUITE("scenario_io")
{
    TEST_CASE("parse a scenario")
    {
        const ScenarioSpec spec = parse_scenario(kScenario);
        CHECK(spec.config.cell_count == 2);
        CHECK(spec.config.antenna_count == 65);
        CHECK(spec.config.power_budget == doctest::Approx(1.0));
        CHECK(spec.config.noise_power == doctest::Approx(1e-11));
        CHECK(spec.canonical_positions);
        CHECK(spec.angle_min == doctest::Approx(kPi / 3));
        const auto st = spec.resolved_stations();
        CHECK(st[1].rotation_min == doctest::Approx(deg_to_rad(-20)));
        CHECK(st[1].rotation_max == doctest::Approx(deg_to_rad(25)));
        CHECK(st[1].position.y == doctest::Approx(2.0 * spec.config.rayleigh_distance()));
    }

    TEST_CASE("malformed scenarios are parse errors")
    {
        CHECK(code_of([] { parse_scenario("{not json"); }) == ErrorCode::Parse);
        CHECK(code_of([] { parse_scenario("[]"); }) == ErrorCode::Parse);
        std::string missing = kScenario;
        missing.replace(missing.find("\"power_dbm\""), 11, "\"power_xx\"");
        CHECK(code_of([&] { parse_scenario(missing); }) == ErrorCode::Parse);
        std::string bad_angle = kScenario;
        bad_angle.replace(bad_angle.find("[60, 120]"), 9, "[60, 190]");
        CHECK(code_of([&] { parse_scenario(bad_angle); }) == ErrorCode::Parse);
    }

    TEST_CASE("missing file is an I/O error with the path")
    {
        try
        {
            load_scenario("/nonexistent/scenario.json");
            FAIL("expected an error");
        }
        catch (const Error &e)
        {
            CHECK(e.code() == ErrorCode::Io);
            CHECK(std::string(e.what()).find("/nonexistent/scenario.json") != std::string::npos);
        }
    }

    TEST_CASE("load from disk")
    {
        const auto path = std::filesystem::temp_directory_path() / "ramix_test_scenario.json";
        {
            std::ofstream os(path);
            os << kScenario;
        }
        CHECK(load_scenario(path.string()).config.nlos_path_count == 2);
        std::filesystem::remove(path);
    }

    TEST_CASE("placements stay inside the region and repeat per seed")
    {
        const ScenarioSpec spec = parse_scenario(kScenario);
        const double R = spec.config.rayleigh_distance();
        std::mt19937_64 a(42);
        std::mt19937_64 b(42);
        const Scenario sa = place_users(spec, a);
        const Scenario sb = place_users(spec, b);
        for (int m = 0; m < 2; ++m)
            for (int k = 0; k < 3; ++k)
            {
                const auto &u = sa.users[m][k];
                CHECK(u.range >= 0.1 * R);
                CHECK(u.range <= R);
                CHECK(u.angle >= kPi / 3);
                CHECK(u.angle <= 2 * kPi / 3);
                CHECK(u.range == sb.users[m][k].range);
                CHECK(u.angle == sb.users[m][k].angle);
                CHECK(u.scatterers.size() == 2);
                CHECK(u.scatterers[0].fading.size() == 2);
            }
    }

    TEST_CASE("mean placement angle")
    {
        ScenarioSpec spec;
        spec.config.cell_count = 1;
        spec.config.users_per_cell = 10000;
        spec.config.nlos_path_count = 0;
        std::mt19937_64 rng(9);
        const Scenario sc = place_users(spec, rng);
        double sum = 0.0;
        for (const auto &u : sc.users[0])
            sum += u.angle;
        CHECK(std::abs(sum / 10000.0 - kPi / 2) < 0.01);
    }

    TEST_CASE("pinned users keep the random stream of the others")
    {
        ScenarioSpec spec;
        spec.config.nlos_path_count = 1;
        ScenarioSpec pinned = spec;
        pinned.fixed_users = {{{1.0, 10.0}, {1.2, 11.0}, {1.4, 12.0}}};
        std::mt19937_64 a(5);
        std::mt19937_64 b(5);
        const Scenario free_drop = place_users(spec, a);
        const Scenario pinned_drop = place_users(pinned, b);
        CHECK(pinned_drop.users[0][1].angle == doctest::Approx(1.2));
        CHECK(pinned_drop.users[0][1].range == doctest::Approx(11.0));
        for (int k = 0; k < 3; ++k)
        {
            CHECK(pinned_drop.users[1][k].angle == free_drop.users[1][k].angle);
            CHECK(pinned_drop.users[1][k].scatterers[0].range == free_drop.users[1][k].scatterers[0].range);
        }
    }
}
