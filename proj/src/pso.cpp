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

#include "ramix/pso.hpp"
#include "ramix/error.hpp"
#include "ramix/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

namespace ramix
{
    void PsoConfig::validate() const
    {
        require(swarm_size >= 1, "PSO swarm size must be at least 1");
        require(iterations >= 1, "PSO needs at least one iteration");
        require(c1 >= 0.0 && c2 >= 0.0, "PSO learning factors must be non-negative");
        require(omega_min > 0.0 && omega_min <= omega_max, "PSO inertia bounds need 0 < omega_min <= omega_max");
    }

    namespace
    {
        constexpr double kNegInf = -std::numeric_limits<double>::infinity();

        double sanitize(double f) { return std::isnan(f) ? kNegInf : f; }

        void clamp_into(std::vector<double> &x, const std::vector<double> &lo, const std::vector<double> &hi)
        {
            for (std::size_t d = 0; d < x.size(); ++d)
                x[d] = std::max(std::min(x[d], hi[d]), lo[d]);
        }
    }

    PsoResult pso_optimize(const BatchFitness &fitness, const std::vector<double> &lo, const std::vector<double> &hi,
                           const PsoConfig &cfg, const std::vector<std::vector<double>> &seeds)
    {
        cfg.validate();
        const std::size_t D = lo.size();
        require(D >= 1 && hi.size() == D, "PSO bounds must be non-empty and of equal length");
        for (std::size_t d = 0; d < D; ++d)
            require(lo[d] <= hi[d], "PSO lower bound exceeds upper bound");
        const int S = cfg.swarm_size;
        require(static_cast<int>(seeds.size()) <= S, "more seed positions than particles");

        std::vector<std::mt19937_64> rng;
        rng.reserve(S);
        for (int s = 0; s < S; ++s)
            rng.emplace_back(derive_seed(cfg.seed, static_cast<std::uint64_t>(s)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        std::vector<double> range(D);
        for (std::size_t d = 0; d < D; ++d)
            range[d] = hi[d] - lo[d];

        std::vector<std::vector<double>> x(S, std::vector<double>(D)), v(S, std::vector<double>(D));
        for (int s = 0; s < S; ++s)
        {
            for (std::size_t d = 0; d < D; ++d)
            {
                x[s][d] = lo[d] + unit(rng[s]) * range[d];
                v[s][d] = (2.0 * unit(rng[s]) - 1.0) * range[d] / 4.0;
            }
            if (s < static_cast<int>(seeds.size()))
            {
                require(seeds[s].size() == D, "seed position has the wrong dimension");
                x[s] = seeds[s];
            }
            clamp_into(x[s], lo, hi);
        }

        PsoResult res;
        std::vector<std::vector<double>> pbest = x;
        std::vector<double> pbest_fit(S, kNegInf);
        std::vector<double> gbest = x[0];
        double gbest_fit = kNegInf;

        auto evaluate = [&](int iter) {
            PsoBatch batch = fitness(x, iter);
            require(static_cast<int>(batch.fitness.size()) == S, "batch fitness returned the wrong count");
            require(batch.evaluated_at.empty() || static_cast<int>(batch.evaluated_at.size()) == S,
                    "batch positions returned the wrong count");
            res.evaluations += S;
            double sum = 0.0;
            int finite = 0;
            for (int s = 0; s < S; ++s)
            {
                const double f = sanitize(batch.fitness[s]);
                if (std::isfinite(f))
                {
                    sum += f;
                    ++finite;
                }
                const std::vector<double> &at = batch.evaluated_at.empty() ? x[s] : batch.evaluated_at[s];
                if (f > pbest_fit[s])
                {
                    pbest_fit[s] = f;
                    pbest[s] = at;
                }
                if (f > gbest_fit)
                {
                    gbest_fit = f;
                    gbest = at;
                    res.best_iteration = iter;
                    res.best_particle = s;
                }
            }
            res.trajectory.push_back(gbest_fit);
            res.trace.push_back({iter, gbest_fit, finite > 0 ? sum / finite : kNegInf, gbest});
        };

        evaluate(0);
        for (int t = 0; t < cfg.iterations; ++t)
        {
            const double omega = cfg.omega_max - (cfg.omega_max - cfg.omega_min) * t / cfg.iterations;
            for (int s = 0; s < S; ++s)
            {
                const double tau1 = unit(rng[s]);
                const double tau2 = unit(rng[s]);
                for (std::size_t d = 0; d < D; ++d)
                {
                    double vel = omega * v[s][d] + cfg.c1 * tau1 * (pbest[s][d] - x[s][d]) +
                                 cfg.c2 * tau2 * (gbest[d] - x[s][d]);
                    const double vmax = range[d] / 2.0;
                    vel = std::max(std::min(vel, vmax), -vmax);
                    v[s][d] = vel;
                    x[s][d] += vel;
                }
                clamp_into(x[s], lo, hi);
            }
            evaluate(t + 1);
        }
        res.best_position = gbest;
        res.best_fitness = gbest_fit;
        return res;
    }

    PsoResult pso_optimize(const std::function<double(const std::vector<double> &)> &fitness,
                           const std::vector<double> &lo, const std::vector<double> &hi, const PsoConfig &cfg,
                           const std::vector<std::vector<double>> &seeds)
    {
        BatchFitness batch = [&](const std::vector<std::vector<double>> &xs, int) {
            PsoBatch b;
            b.fitness.reserve(xs.size());
            for (const auto &p : xs)
                b.fitness.push_back(fitness(p));
            return b;
        };
        return pso_optimize(batch, lo, hi, cfg, seeds);
    }

    void write_pso_trace(std::ostream &os, const PsoResult &res)
    {
        const std::size_t D = res.best_position.size();
        os << "iter,best_fitness,mean_fitness";
        for (std::size_t d = 0; d < D; ++d)
            os << ",best_phi_" << d + 1;
        os << '\n';
        const auto old = os.precision(17);
        for (const auto &row : res.trace)
        {
            os << row.iter << ',' << row.best_fitness << ',' << row.mean_fitness;
            for (double p : row.best_position)
                os << ',' << p;
            os << '\n';
        }
        os.precision(old);
    }
}
