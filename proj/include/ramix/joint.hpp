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

#ifndef RAMIX_JOINT_HPP
#define RAMIX_JOINT_HPP

#include "ramix/beamforming.hpp"
#include "ramix/pso.hpp"
#include "ramix/scenario.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace ramix
{
    // Inner-layer result at one rotation vector.
    struct InnerEvaluation
    {
        RotationVector rotations;
        double fitness = 0.0;            // what the outer search maximises
        std::vector<CMatrix> digital;
        SumRateReport report;            // full-SINR rates
        std::vector<double> sca_trajectory;
        std::vector<ScaTraceRow> sca_trace;
    };

    // warm_start is null for a cold start.
    using InnerSolver = std::function<InnerEvaluation(const Scenario &, const RotationVector &,
                                                      const std::vector<CMatrix> *warm_start)>;

    // Inner layer of the double-layer method: MRT analog stage, SCA digital stage.
    // The fitness is the sum-rate under opts.mask; the report always uses the full SINR.
    InnerSolver sca_inner(const ScaOptions &opts);
    // MRT analog stage with ZF digital precoding (diagonal loading allowed).
    InnerSolver zf_inner();

    struct JointOptions
    {
        PsoConfig pso;
        ScaOptions sca;
        bool warm_start = true;  // particles restart SCA from their previous beamformers
        bool cache = true;       // reuse evaluations at rotations equal to within 1e-4 rad
        int threads = 1;
        // Extra starting particles after the phi = 0 particle.
        std::vector<RotationVector> seeds;
    };

    struct JointResult
    {
        RotationVector rotations;
        std::vector<CMatrix> analog;
        std::vector<CMatrix> digital;
        SumRateReport report;
        PsoResult pso;
        std::vector<double> sca_trajectory; // at the returned rotations
        std::vector<ScaTraceRow> sca_trace;
        int inner_solves = 0;
        int cache_hits = 0;
        int failed_evaluations = 0;
    };

    // PSO over the rotation box with `inner` as fitness. Particle 0 sits at phi = 0
    // (clamped into the box), so the result is never worse than the fixed array.
    JointResult rotation_search(const Scenario &scenario, const InnerSolver &inner, const JointOptions &opts);

    // Double-layer sum-rate maximisation: rotation_search with sca_inner(opts.sca).
    JointResult joint_optimize(const Scenario &scenario, const JointOptions &opts = {});
}

#endif
