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

// Random relaxed subproblems and an independent objective for checking the solver.

#ifndef RAMIX_TESTS_SOLVER_INSTANCES_HPP
#define RAMIX_TESTS_SOLVER_INSTANCES_HPP

#include "oracles.hpp"

#include "ramix/relaxed_solver.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace oracle
{
    // M cells with K users each. Every user sees its own block through a rank-one
    // signal term and every other block as interference; interference enters the
    // objective as in one SCA step: log of the total minus a linearised log of the rest.
    inline ramix::RelaxedSubproblem random_subproblem(int M, int K, std::mt19937_64 &rng, double power = 10.0)
    {
        ramix::RelaxedSubproblem p;
        p.power = power;
        std::uniform_real_distribution<double> u(0.2, 1.0);
        std::vector<Eigen::VectorXcd> h; // h[(i * M + m) * K + k]: BS i -> user (m, k)
        for (int i = 0; i < M; ++i)
            for (int m = 0; m < M; ++m)
                for (int k = 0; k < K; ++k)
                    h.push_back(random_cvector(K, rng, i == m ? 1.0 : 0.3));
        for (int m = 0; m < M; ++m)
        {
            Eigen::MatrixXcd G = random_psd(K, K, rng, 0.2);
            G += Eigen::MatrixXcd::Identity(K, K);
            p.cell_gram.push_back(G);
        }
        for (int m = 0; m < M; ++m)
            for (int k = 0; k < K; ++k)
            {
                p.block_dims.push_back(K);
                p.block_cell.push_back(m);
            }
        for (const auto &v : h)
            p.matrices.push_back(v * v.adjoint());
        p.linear.assign(M * K, Eigen::MatrixXcd::Zero(K, K));
        for (int m = 0; m < M; ++m)
            for (int k = 0; k < K; ++k)
            {
                ramix::RelaxedSubproblem::User user;
                user.noise = u(rng);
                for (int i = 0; i < M; ++i)
                    for (int b = 0; b < K; ++b)
                        user.terms.push_back({i * K + b, (i * M + m) * K + k});
                p.users.push_back(user);
                // Gradient of log2(noise + interference) at a random operating point.
                const double weight = u(rng) / std::log(2.0);
                for (int i = 0; i < M; ++i)
                    for (int b = 0; b < K; ++b)
                    {
                        if (i == m && b == k)
                            continue;
                        p.linear[i * K + b] += weight * p.matrices[(i * M + m) * K + k];
                    }
            }
        return p;
    }

    inline double subproblem_objective(const ramix::RelaxedSubproblem &p, const ramix::CMatrixList &W)
    {
        double f = 0.0;
        for (const auto &user : p.users)
        {
            double acc = user.noise;
            for (const auto &t : user.terms)
                acc += (p.matrices[t.matrix] * W[t.block]).trace().real();
            f -= std::log2(acc);
        }
        for (std::size_t b = 0; b < W.size(); ++b)
            if (!p.linear.empty())
                f += (p.linear[b] * W[b]).trace().real();
        return f;
    }

    inline ramix::CMatrixList subproblem_gradient(const ramix::RelaxedSubproblem &p, const ramix::CMatrixList &W)
    {
        ramix::CMatrixList g;
        for (std::size_t b = 0; b < W.size(); ++b)
            g.push_back(p.linear.empty() ? Eigen::MatrixXcd::Zero(W[b].rows(), W[b].cols()) : p.linear[b]);
        for (const auto &user : p.users)
        {
            double acc = user.noise;
            for (const auto &t : user.terms)
                acc += (p.matrices[t.matrix] * W[t.block]).trace().real();
            for (const auto &t : user.terms)
                g[t.block] -= p.matrices[t.matrix] / (acc * std::log(2.0));
        }
        return g;
    }

    // Scales every cell down to its budget.
    inline void enforce_budget(const ramix::RelaxedSubproblem &p, ramix::CMatrixList &W)
    {
        for (int m = 0; m < p.cell_count(); ++m)
        {
            double used = 0.0;
            for (std::size_t b = 0; b < W.size(); ++b)
                if (p.block_cell[b] == m)
                    used += (p.cell_gram[m] * W[b]).trace().real();
            if (used > p.power)
                for (std::size_t b = 0; b < W.size(); ++b)
                    if (p.block_cell[b] == m)
                        W[b] *= p.power / used;
        }
    }

    inline ramix::CMatrixList random_feasible(const ramix::RelaxedSubproblem &p, std::mt19937_64 &rng)
    {
        std::uniform_int_distribution<int> rank(1, 3);
        std::uniform_real_distribution<double> fill(0.0, 1.0);
        ramix::CMatrixList W;
        for (int dim : p.block_dims)
            W.push_back(random_psd(dim, std::min(dim, rank(rng)), rng));
        for (int m = 0; m < p.cell_count(); ++m)
        {
            double used = 0.0;
            for (std::size_t b = 0; b < W.size(); ++b)
                if (p.block_cell[b] == m)
                    used += (p.cell_gram[m] * W[b]).trace().real();
            const double target = fill(rng) * p.power;
            for (std::size_t b = 0; b < W.size(); ++b)
                if (p.block_cell[b] == m)
                    W[b] *= target / used;
        }
        return W;
    }

    // Feasible projected-gradient descent from W; returns the best objective seen.
    inline double projected_gradient_refine(const ramix::RelaxedSubproblem &p, ramix::CMatrixList W, int steps = 200)
    {
        double best = subproblem_objective(p, W);
        double eta = 1e-2 * p.power;
        for (int s = 0; s < steps && eta > 1e-12 * p.power; ++s)
        {
            const ramix::CMatrixList g = subproblem_gradient(p, W);
            ramix::CMatrixList trial;
            for (std::size_t b = 0; b < W.size(); ++b)
                trial.push_back(project_psd(W[b] - eta * g[b]));
            enforce_budget(p, trial);
            const double f = subproblem_objective(p, trial);
            if (f < best)
            {
                best = f;
                W = trial;
                eta *= 1.5;
            }
            else
                eta *= 0.5;
        }
        return best;
    }
}

#endif
