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

#include "ramix/joint.hpp"
#include "ramix/error.hpp"
#include "ramix/log.hpp"
#include "ramix/parallel.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace ramix
{
    InnerSolver sca_inner(const ScaOptions &opts)
    {
        return [opts](const Scenario &sc, const RotationVector &phi, const std::vector<CMatrix> *warm) {
            const ChannelSet channels = build_channels(sc, phi);
            const std::vector<CMatrix> analog = analog_mrt(sc, phi);
            const EffectiveChannels eff = effective_channels(channels, analog);
            ScaOptions o = opts;
            if (warm != nullptr)
                o.warm_start = *warm;
            else
                o.warm_start.reset();
            const ScaResult r = sca_digital(eff, sc.config.power_budget, sc.config.noise_power, o);
            InnerEvaluation ev;
            ev.rotations = phi;
            ev.digital = r.digital;
            ev.report = r.report;
            ev.fitness = (o.mask.intra && o.mask.inter)
                             ? r.report.sum_rate
                             : compute_rates(eff, r.digital, sc.config.noise_power, 0.0, o.mask).sum_rate;
            ev.sca_trajectory = r.trajectory;
            ev.sca_trace = r.trace;
            return ev;
        };
    }

    InnerSolver zf_inner()
    {
        return [](const Scenario &sc, const RotationVector &phi, const std::vector<CMatrix> *) {
            const ChannelSet channels = build_channels(sc, phi);
            const std::vector<CMatrix> analog = analog_mrt(sc, phi);
            const EffectiveChannels eff = effective_channels(channels, analog);
            InnerEvaluation ev;
            ev.rotations = phi;
            bool regularized = false;
            for (int m = 0; m < eff.cell_count(); ++m)
            {
                ZfResult z = zf_digital(eff.serving_matrix(m), eff.gram[m], sc.config.power_budget, true);
                regularized = regularized || z.regularized;
                ev.digital.push_back(std::move(z.digital));
            }
            ev.report = compute_rates(eff, ev.digital, sc.config.noise_power, sc.config.power_budget);
            ev.report.zf_regularized = regularized;
            ev.fitness = ev.report.sum_rate;
            return ev;
        };
    }

    namespace
    {
        using Key = std::vector<long long>;

        Key quantize(const RotationVector &phi)
        {
            Key k(phi.size());
            for (std::size_t d = 0; d < phi.size(); ++d)
                k[d] = std::llround(phi[d] / 1e-4);
            return k;
        }

        using Payload = std::shared_ptr<const InnerEvaluation>;
    }

    JointResult rotation_search(const Scenario &scenario, const InnerSolver &inner, const JointOptions &opts)
    {
        scenario.validate();
        const int M = scenario.cell_count();
        std::vector<double> lo(M), hi(M);
        RotationVector zero(M);
        for (int m = 0; m < M; ++m)
        {
            lo[m] = scenario.stations[m].rotation_min;
            hi[m] = scenario.stations[m].rotation_max;
            zero[m] = scenario.stations[m].clamp(0.0);
        }
        std::vector<std::vector<double>> seeds{zero};
        for (const auto &s : opts.seeds)
        {
            require(static_cast<int>(s.size()) == M, "seed rotation vector has the wrong length");
            if (static_cast<int>(seeds.size()) < opts.pso.swarm_size)
                seeds.push_back(s);
        }

        JointResult out;
        std::map<Key, Payload> cache;
        // payloads[iteration][particle]
        std::vector<std::vector<Payload>> payloads;
        std::vector<Payload> last(opts.pso.swarm_size);

        BatchFitness batch = [&](const std::vector<std::vector<double>> &xs, int iteration) {
            const std::size_t S = xs.size();
            std::vector<Payload> result(S);
            std::vector<std::size_t> todo;
            std::vector<std::ptrdiff_t> alias(S, -1);
            std::map<Key, std::size_t> pending;
            // Serial pass: resolve cache hits and duplicates in particle order.
            for (std::size_t s = 0; s < S; ++s)
            {
                const Key key = quantize(xs[s]);
                if (opts.cache)
                {
                    if (auto it = cache.find(key); it != cache.end())
                    {
                        result[s] = it->second;
                        ++out.cache_hits;
                        continue;
                    }
                    if (auto it = pending.find(key); it != pending.end())
                    {
                        alias[s] = static_cast<std::ptrdiff_t>(it->second);
                        ++out.cache_hits;
                        continue;
                    }
                    pending.emplace(key, s);
                }
                todo.push_back(s);
            }
            std::vector<int> failed(todo.size(), 0);
            parallel_for(todo.size(), opts.threads, [&](std::size_t j) {
                const std::size_t s = todo[j];
                const std::vector<CMatrix> *warm = nullptr;
                if (opts.warm_start && iteration > 0 && last[s])
                    warm = &last[s]->digital;
                try
                {
                    result[s] = std::make_shared<const InnerEvaluation>(inner(scenario, xs[s], warm));
                }
                catch (const Error &e)
                {
                    failed[j] = 1;
                    log::warn("rotation search: inner solve failed at iteration ", iteration, ", particle ", s,
                              ": ", e.what());
                    auto ev = std::make_shared<InnerEvaluation>();
                    ev->rotations = xs[s];
                    ev->fitness = -std::numeric_limits<double>::infinity();
                    result[s] = ev;
                }
            });
            out.inner_solves += static_cast<int>(todo.size());
            for (int f : failed)
                out.failed_evaluations += f;
            for (std::size_t s = 0; s < S; ++s)
                if (alias[s] >= 0)
                    result[s] = result[static_cast<std::size_t>(alias[s])];
            if (opts.cache)
                for (std::size_t s : todo)
                    cache.emplace(quantize(xs[s]), result[s]);

            PsoBatch b;
            b.fitness.resize(S);
            b.evaluated_at.resize(S);
            for (std::size_t s = 0; s < S; ++s)
            {
                b.fitness[s] = result[s]->fitness;
                b.evaluated_at[s] = result[s]->rotations;
                if (!result[s]->digital.empty())
                    last[s] = result[s];
            }
            payloads.push_back(std::move(result));
            return b;
        };

        out.pso = pso_optimize(batch, lo, hi, opts.pso, seeds);
        const Payload best = payloads.at(out.pso.best_iteration).at(out.pso.best_particle);
        if (best->digital.empty())
            fail(ErrorCode::Solver, "rotation search: every inner solve failed");
        out.rotations = best->rotations;
        out.analog = analog_mrt(scenario, out.rotations);
        out.digital = best->digital;
        out.report = best->report;
        out.sca_trajectory = best->sca_trajectory;
        out.sca_trace = best->sca_trace;
        log::debug("rotation search: ", out.inner_solves, " inner solves, ", out.cache_hits, " cache hits, best ",
                   out.pso.best_fitness);
        return out;
    }

    JointResult joint_optimize(const Scenario &scenario, const JointOptions &opts)
    {
        return rotation_search(scenario, sca_inner(opts.sca), opts);
    }
}
