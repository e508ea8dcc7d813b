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

#ifndef RAMIX_PSO_HPP
#define RAMIX_PSO_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace ramix
{
    struct PsoConfig
    {
        int swarm_size = 50;
        int iterations = 50;
        double c1 = 1.4;
        double c2 = 1.4;
        double omega_min = 0.4;
        double omega_max = 0.9;
        std::uint64_t seed = 1;

        void validate() const;
    };

    struct PsoTraceRow
    {
        int iter = 0;
        double best_fitness = 0.0;
        double mean_fitness = 0.0; // over finite fitness values
        std::vector<double> best_position;
    };

    struct PsoResult
    {
        std::vector<double> best_position;
        double best_fitness = 0.0;
        std::vector<double> trajectory; // global best after each iteration, T + 1 entries
        std::vector<PsoTraceRow> trace;
        int best_iteration = 0; // evaluation that produced the global best
        int best_particle = 0;
        int evaluations = 0;
    };

    struct PsoBatch
    {
        std::vector<double> fitness;
        // Position each fitness belongs to. An evaluator that reuses a nearby cached
        // result reports the cached position here; empty means the requested positions.
        std::vector<std::vector<double>> evaluated_at;
    };

    // Evaluates one iteration's positions; the evaluator may run them in parallel.
    using BatchFitness = std::function<PsoBatch(const std::vector<std::vector<double>> &positions, int iteration)>;

    // Maximises fitness over the box [lo, hi]. Particles 0..seeds.size()-1 start at the
    // given (clamped) positions, the rest uniformly. Non-finite fitness counts as -inf.
    PsoResult pso_optimize(const BatchFitness &fitness, const std::vector<double> &lo, const std::vector<double> &hi,
                           const PsoConfig &cfg, const std::vector<std::vector<double>> &seeds = {});
    PsoResult pso_optimize(const std::function<double(const std::vector<double> &)> &fitness,
                           const std::vector<double> &lo, const std::vector<double> &hi, const PsoConfig &cfg,
                           const std::vector<std::vector<double>> &seeds = {});

    // CSV: iter,best_fitness,mean_fitness,best_phi_1..M
    void write_pso_trace(std::ostream &os, const PsoResult &res);
}

#endif
