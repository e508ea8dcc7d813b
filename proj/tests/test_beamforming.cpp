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

#include "ramix/beamforming.hpp"
#include "ramix/error.hpp"
#include "ramix/scenario_io.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ramix;

namespace
{
    Scenario drop(int cells, int users, int antennas, int nlos, std::uint64_t seed)
    {
        ScenarioSpec spec;
        spec.config.cell_count = cells;
        spec.config.users_per_cell = users;
        spec.config.antenna_count = antennas;
        spec.config.nlos_path_count = nlos;
        std::mt19937_64 rng(seed);
        return place_users(spec, rng);
    }

    // Sum-rate from raw channels, every SINR term written out.
    double reference_sum_rate(const ChannelSet &ch, const std::vector<CMatrix> &analog,
                              const std::vector<CMatrix> &digital, double noise, bool intra = true, bool inter = true)
    {
        const int M = ch.cell_count();
        double total = 0.0;
        for (int m = 0; m < M; ++m)
            for (int k = 0; k < ch.users_in_cell(m); ++k)
            {
                double signal = 0.0;
                double interference = 0.0;
                for (int i = 0; i < M; ++i)
                {
                    const CVector x = ch.at(i, m, k).coefficients;
                    for (int j = 0; j < ch.users_in_cell(i); ++j)
                    {
                        const double p = std::norm(x.dot(analog[i] * digital[i].col(j)));
                        if (i == m && j == k)
                            signal = p;
                        else if (i == m && intra)
                            interference += p;
                        else if (i != m && inter)
                            interference += p;
                    }
                }
                total += std::log2(1.0 + signal / (interference + noise));
            }
        return total;
    }
}

TEST_SUITE("beamforming")
{
    TEST_CASE("analog stage is unit-modulus MRT")
    {
        const Scenario sc = drop(2, 3, 33, 0, 1);
        const RotationVector phi{0.1, -0.05};
        const auto analog = analog_mrt(sc, phi);
        REQUIRE(analog.size() == 2);
        for (int m = 0; m < 2; ++m)
        {
            CHECK(analog[m].rows() == 33);
            CHECK(analog[m].cols() == 3);
            CHECK((analog[m].cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
            for (int k = 0; k < 3; ++k)
            {
                const auto &u = sc.users[m][k];
                const CVector b = near_steering(u.angle, u.range, phi[m], sc.config);
                CHECK((analog[m].col(k) - std::sqrt(33.0) * b).norm() < 1e-10);
            }
        }
    }

    TEST_CASE("effective channels")
    {
        const Scenario sc = drop(2, 2, 17, 2, 2);
        const RotationVector phi{0.0, 0.2};
        const ChannelSet ch = build_channels(sc, phi);
        const auto analog = analog_mrt(sc, phi);
        const EffectiveChannels eff = effective_channels(ch, analog);
        for (int i = 0; i < 2; ++i)
        {
            CHECK((eff.gram[i] - analog[i].adjoint() * analog[i]).norm() < 1e-10);
            for (int m = 0; m < 2; ++m)
                for (int k = 0; k < 2; ++k)
                    CHECK((eff.at(i, m, k) - analog[i].adjoint() * ch.at(i, m, k).coefficients).norm() <
                          1e-12 * (1 + eff.at(i, m, k).norm()));
        }
        CHECK(eff.total_users() == 4);
    }

    TEST_CASE("zero-forcing nulls intra-cell leakage")
    {
        std::mt19937_64 rng(5);
        const int K = 4;
        CMatrix H(K, K);
        for (int k = 0; k < K; ++k)
            H.col(k) = oracle::random_cvector(K, rng);
        const CMatrix G = oracle::random_psd(K, K, rng) + CMatrix::Identity(K, K);
        const ZfResult zf = zf_digital(H, G, 2.0, false);
        CHECK_FALSE(zf.regularized);
        const CMatrix R = H.adjoint() * zf.digital;
        for (int i = 0; i < K; ++i)
            for (int j = 0; j < K; ++j)
                if (i != j)
                    CHECK(std::abs(R(i, j)) < 1e-10 * std::abs(R(i, i)));
        for (int k = 0; k < K; ++k)
            CHECK((zf.digital.col(k).adjoint() * G * zf.digital.col(k))(0, 0).real() == doctest::Approx(0.5));
    }

    TEST_CASE("singular zero-forcing")
    {
        CMatrix H(2, 2);
        H << 1.0, 2.0, 2.0, 4.0;
        const CMatrix G = CMatrix::Identity(2, 2);
        try
        {
            zf_digital(H, G, 1.0, false);
            FAIL("expected Infeasible");
        }
        catch (const Error &e)
        {
            CHECK(e.code() == ErrorCode::Infeasible);
        }
        const ZfResult loaded = zf_digital(H, G, 1.0, true);
        CHECK(loaded.regularized);
        CHECK(loaded.digital.allFinite());
    }

    TEST_CASE("MRT digital columns")
    {
        std::mt19937_64 rng(6);
        CMatrix H(3, 3);
        for (int k = 0; k < 3; ++k)
            H.col(k) = oracle::random_cvector(3, rng);
        const CMatrix G = CMatrix::Identity(3, 3);
        const CMatrix F = mrt_digital(H, G, 3.0);
        for (int k = 0; k < 3; ++k)
        {
            CHECK(F.col(k).norm() == doctest::Approx(1.0));
            CHECK(std::abs(std::abs(F.col(k).dot(H.col(k))) - H.col(k).norm()) < 1e-10);
        }
    }

    TEST_CASE("rates match the reference SINR")
    {
        const Scenario sc = drop(2, 3, 33, 2, 7);
        const RotationVector phi{0.1, 0.0};
        const ChannelSet ch = build_channels(sc, phi);
        const auto analog = analog_mrt(sc, phi);
        const EffectiveChannels eff = effective_channels(ch, analog);
        const auto digital = initial_digital(eff, sc.config.power_budget);
        const double noise = sc.config.noise_power;
        const SumRateReport full = compute_rates(ch, analog, digital, noise, sc.config.power_budget);
        CHECK(full.sum_rate == doctest::Approx(reference_sum_rate(ch, analog, digital, noise)).epsilon(1e-10));
        CHECK(compute_rates(eff, digital, noise).sum_rate == doctest::Approx(full.sum_rate).epsilon(1e-10));
        CHECK_FALSE(full.power_violation);
        for (int m = 0; m < 2; ++m)
            CHECK(full.cell_power[m] <= sc.config.power_budget * (1 + 1e-9));
        const SumRateReport near = compute_rates(ch, analog, digital, noise, 0.0, {true, false});
        CHECK(near.sum_rate ==
              doctest::Approx(reference_sum_rate(ch, analog, digital, noise, true, false)).epsilon(1e-10));
        const SumRateReport mixed = compute_rates(ch, analog, digital, noise, 0.0, {false, true});
        CHECK(mixed.sum_rate ==
              doctest::Approx(reference_sum_rate(ch, analog, digital, noise, false, true)).epsilon(1e-10));

        CMatrixList W;
        for (int m = 0; m < 2; ++m)
            for (int k = 0; k < 3; ++k)
                W.push_back(digital[m].col(k) * digital[m].col(k).adjoint());
        CHECK(covariance_sum_rate(eff, W, noise) == doctest::Approx(full.sum_rate).epsilon(1e-10));
    }

    TEST_CASE("budget violations are flagged")
    {
        const Scenario sc = drop(1, 2, 17, 0, 3);
        const RotationVector phi{0.0};
        const ChannelSet ch = build_channels(sc, phi);
        const auto analog = analog_mrt(sc, phi);
        auto digital = initial_digital(effective_channels(ch, analog), 1.0);
        digital[0] *= 2.0;
        CHECK(compute_rates(ch, analog, digital, 1e-11, 1.0).power_violation);
    }

    TEST_CASE("rank-one extraction")
    {
        std::mt19937_64 rng(9);
        const CVector v = oracle::random_cvector(3, rng);
        const CMatrix G = CMatrix::Identity(3, 3);
        auto score = [](const CVector &x) { return x.norm(); };
        const RankOneResult r = extract_rank_one(v * v.adjoint(), G, score, rng);
        CHECK_FALSE(r.randomized);
        CHECK((r.vector * r.vector.adjoint() - v * v.adjoint()).norm() < 1e-10);

        const CMatrix W = oracle::random_psd(3, 3, rng);
        const RankOneResult rr = extract_rank_one(W, G, score, rng, 50);
        CHECK(rr.randomized);
        CHECK(rr.vector.squaredNorm() == doctest::Approx(W.trace().real()).epsilon(1e-10));
    }

    TEST_CASE("single user reaches the matched-filter rate")
    {
        const Scenario sc = drop(1, 1, 33, 0, 4);
        const RotationVector phi{0.0};
        const ChannelSet ch = build_channels(sc, phi);
        const EffectiveChannels eff = effective_channels(ch, analog_mrt(sc, phi));
        const double P = sc.config.power_budget;
        const double noise = sc.config.noise_power;
        const ScaResult r = sca_digital(eff, P, noise);
        const double expected = std::log2(1 + P * ch.at(0, 0, 0).coefficients.squaredNorm() / noise);
        CHECK(r.report.sum_rate == doctest::Approx(expected).epsilon(1e-6));
    }

    TEST_CASE("SCA improves monotonically")
    {
        for (std::uint64_t seed = 20; seed < 23; ++seed)
        {
            const Scenario sc = drop(2, 3, 17, 3, seed);
            const RotationVector phi{0.0, 0.0};
            const ChannelSet ch = build_channels(sc, phi);
            const auto analog = analog_mrt(sc, phi);
            const EffectiveChannels eff = effective_channels(ch, analog);
            ScaOptions opts;
            opts.seed = seed;
            const ScaResult r = sca_digital(eff, sc.config.power_budget, sc.config.noise_power, opts);
            REQUIRE(r.trajectory.size() >= 2);
            for (std::size_t t = 1; t < r.trajectory.size(); ++t)
                CHECK(r.trajectory[t] >= r.trajectory[t - 1] - 1e-6);
            for (const auto &row : r.trace)
                CHECK(row.kkt_residual <= 1e-6);
            CHECK(r.report.sum_rate >= r.trajectory.front() - 1e-9);
            CHECK(r.report.sum_rate ==
                  doctest::Approx(reference_sum_rate(ch, analog, r.digital, sc.config.noise_power)).epsilon(1e-9));
            CHECK_FALSE(r.report.power_violation);

            // The same seed repeats the same result.
            const ScaResult again = sca_digital(eff, sc.config.power_budget, sc.config.noise_power, opts);
            CHECK(again.report.sum_rate == r.report.sum_rate);
        }
    }

    TEST_CASE("warm start is used")
    {
        const Scenario sc = drop(2, 2, 17, 1, 30);
        const RotationVector phi{0.0, 0.0};
        const EffectiveChannels eff = effective_channels(build_channels(sc, phi), analog_mrt(sc, phi));
        const ScaResult cold = sca_digital(eff, 1.0, sc.config.noise_power);
        ScaOptions opts;
        opts.warm_start = cold.digital;
        const ScaResult warm = sca_digital(eff, 1.0, sc.config.noise_power, opts);
        CHECK(warm.warm_started);
        CHECK(warm.trajectory.front() == doctest::Approx(cold.report.sum_rate).epsilon(1e-9));
    }
}
