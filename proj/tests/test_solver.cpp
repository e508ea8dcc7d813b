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

#include "solver_instances.hpp"

#include "ramix/error.hpp"
#include "ramix/relaxed_solver.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ramix;

TEST_SUITE("relaxed_solver")
{
    TEST_CASE("layout packs Hermitian blocks")
    {
        const HermitianLayout layout({2, 3});
        CHECK(layout.size() == 13);
        CHECK(layout.offset(1) == 4);
        std::mt19937_64 rng(2);
        const Eigen::MatrixXcd X = oracle::random_psd(3, 2, rng);
        const Eigen::MatrixXcd H = oracle::random_psd(3, 3, rng);
        Eigen::VectorXd x = Eigen::VectorXd::Zero(layout.size());
        Eigen::VectorXd c = Eigen::VectorXd::Zero(layout.size());
        layout.pack(1, X, x);
        CHECK((layout.unpack(1, x) - X).norm() < 1e-12);
        layout.add_trace_coefficients(1, H, 1.0, c);
        CHECK(c.dot(x) == doctest::Approx((H * X).trace().real()).epsilon(1e-12));
    }

    TEST_CASE("scalar problem spends the whole budget")
    {
        RelaxedSubproblem p;
        p.block_dims = {1};
        p.block_cell = {0};
        p.cell_gram = {Eigen::MatrixXcd::Constant(1, 1, 2.0)};
        p.power = 3.0;
        p.matrices = {Eigen::MatrixXcd::Constant(1, 1, 5.0)};
        p.users = {{0.5, {{0, 0}}}};
        const SolverResult r = solve_relaxed_subproblem(p);
        CHECK(r.W[0](0, 0).real() == doctest::Approx(1.5).epsilon(1e-6));
        CHECK(r.objective == doctest::Approx(-std::log2(0.5 + 5.0 * 1.5)).epsilon(1e-6));
        CHECK(r.kkt_residual() <= 1e-6);
    }

    TEST_CASE("parallel channels are water-filled")
    {
        RelaxedSubproblem p;
        const double gains[3] = {4.0, 1.0, 0.1};
        const double noise = 1.0;
        p.power = 1.5;
        p.cell_gram = {Eigen::MatrixXcd::Identity(1, 1)};
        for (int b = 0; b < 3; ++b)
        {
            p.block_dims.push_back(1);
            p.block_cell.push_back(0);
            p.matrices.push_back(Eigen::MatrixXcd::Constant(1, 1, gains[b]));
            p.users.push_back({noise, {{b, b}}});
        }
        // Levels noise / g: 0.25, 1, 10. Water level mu with (mu - 0.25) + (mu - 1) = 1.5.
        const double mu = 1.375;
        const SolverResult r = solve_relaxed_subproblem(p);
        CHECK(r.W[0](0, 0).real() == doctest::Approx(mu - 0.25).epsilon(1e-5));
        CHECK(r.W[1](0, 0).real() == doctest::Approx(mu - 1.0).epsilon(1e-5));
        CHECK(std::abs(r.W[2](0, 0).real()) < 1e-5);
    }

    TEST_CASE("objective and power helpers")
    {
        std::mt19937_64 rng(8);
        const RelaxedSubproblem p = oracle::random_subproblem(2, 2, rng);
        const CMatrixList W = oracle::random_feasible(p, rng);
        CHECK(relaxed_objective(p, W) == doctest::Approx(oracle::subproblem_objective(p, W)).epsilon(1e-12));
        const auto used = relaxed_cell_power(p, W);
        REQUIRE(used.size() == 2);
        CHECK(used[0] <= p.power * (1 + 1e-12));
    }

    TEST_CASE("random instances: optimality checks")
    {
        std::mt19937_64 rng(123);
        for (int inst = 0; inst < 4; ++inst)
        {
            const RelaxedSubproblem p = oracle::random_subproblem(2, 2, rng);
            const SolverResult r = solve_relaxed_subproblem(p);
            CHECK(r.kkt_residual() <= 1e-6);
            const double f = oracle::subproblem_objective(p, r.W);
            CHECK(f == doctest::Approx(r.objective).epsilon(1e-10));
            for (const auto &Wb : r.W)
                CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(Wb).eigenvalues().minCoeff() >= -1e-9);
            for (double used : relaxed_cell_power(p, r.W))
                CHECK(used <= p.power * (1 + 1e-9));
            int worse = 0;
            for (int s = 0; s < 500; ++s)
                worse += oracle::subproblem_objective(p, oracle::random_feasible(p, rng)) < f - 1e-9;
            CHECK(worse == 0);
            const double refined = oracle::projected_gradient_refine(p, r.W);
            CHECK((f - refined) / std::max(1.0, std::abs(f)) <= 1e-5);
        }
    }

    TEST_CASE("invalid problems are rejected")
    {
        RelaxedSubproblem p;
        CHECK_THROWS_AS(solve_relaxed_subproblem(p), Error);
        p.block_dims = {1};
        p.block_cell = {0};
        p.cell_gram = {Eigen::MatrixXcd::Identity(1, 1)};
        p.power = -1.0;
        CHECK_THROWS_AS(solve_relaxed_subproblem(p), Error);
    }
}
