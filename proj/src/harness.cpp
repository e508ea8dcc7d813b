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

#include "ramix/harness.hpp"
#include "ramix/error.hpp"
#include "ramix/interference.hpp"
#include "ramix/log.hpp"
#include "ramix/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace ramix
{
    namespace fs = std::filesystem;

    namespace
    {
        struct SchemeName
        {
            Scheme scheme;
            const char *name;
            const char *file;
        };

        constexpr SchemeName kSchemes[] = {
            {Scheme::RaBf, "RA+BF", "ra_bf"},
            {Scheme::FaBf, "FA+BF", "fa_bf"},
            {Scheme::FaZf, "FA+ZF", "fa_zf"},
            {Scheme::RaZf, "RA+ZF", "ra_zf"},
            {Scheme::DiscreteRaZf, "DiscreteRA+ZF", "discrete_ra_zf"},
            {Scheme::UpperBound, "UpperBound", "upper_bound"},
            {Scheme::NearOnly, "NearOnly", "near_only"},
            {Scheme::MixedOnly, "MixedOnly", "mixed_only"},
        };

        const char *scheme_file(Scheme s)
        {
            for (const auto &e : kSchemes)
                if (e.scheme == s)
                    return e.file;
            return "unknown";
        }

        std::string lower(std::string s)
        {
            std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
            return s;
        }
    }

    const char *scheme_name(Scheme s)
    {
        for (const auto &e : kSchemes)
            if (e.scheme == s)
                return e.name;
        return "unknown";
    }

    Scheme parse_scheme(const std::string &name)
    {
        const std::string key = lower(name);
        for (const auto &e : kSchemes)
            if (lower(e.name) == key || e.file == key)
                return e.scheme;
        fail(ErrorCode::InvalidArgument, "unknown scheme '" + name + "'");
    }

    std::vector<Scheme> parse_scheme_list(const std::string &comma_separated)
    {
        std::vector<Scheme> out;
        std::stringstream ss(comma_separated);
        std::string item;
        while (std::getline(ss, item, ','))
        {
            item.erase(0, item.find_first_not_of(" \t"));
            item.erase(item.find_last_not_of(" \t") + 1);
            if (item.empty())
                continue;
            const Scheme s = parse_scheme(item);
            if (std::find(out.begin(), out.end(), s) == out.end())
                out.push_back(s);
        }
        require(!out.empty(), "scheme list is empty");
        return out;
    }

    SchemeOptions default_scheme_options() { return {}; }

    SchemeOptions small_scheme_options()
    {
        SchemeOptions o;
        o.pso.swarm_size = 10;
        o.pso.iterations = 10;
        return o;
    }

    namespace
    {
        SchemeOutcome from_inner(Scheme s, InnerEvaluation ev)
        {
            SchemeOutcome out;
            out.scheme = s;
            out.report = std::move(ev.report);
            out.rotations = std::move(ev.rotations);
            out.digital = std::move(ev.digital);
            out.sca_trajectory = std::move(ev.sca_trajectory);
            out.sca_trace = std::move(ev.sca_trace);
            out.inner_solves = 1;
            return out;
        }

        SchemeOutcome from_joint(Scheme s, JointResult r)
        {
            SchemeOutcome out;
            out.scheme = s;
            out.report = std::move(r.report);
            out.rotations = std::move(r.rotations);
            out.digital = std::move(r.digital);
            out.pso = std::move(r.pso);
            out.sca_trajectory = std::move(r.sca_trajectory);
            out.sca_trace = std::move(r.sca_trace);
            out.inner_solves = r.inner_solves;
            return out;
        }

        SchemeOutcome discrete_ra_zf(const Scenario &sc, const SchemeOptions &opts)
        {
            const int M = sc.cell_count();
            if (M > 3)
                fail(ErrorCode::Unsupported, "DiscreteRA+ZF enumerates points^M rotations and refuses M > 3 (M = " +
                                                 std::to_string(M) + ")");
            const int G = opts.discrete_points;
            require(G >= 2, "discrete rotation grid needs at least two points");
            std::vector<std::vector<double>> axes(M);
            for (int m = 0; m < M; ++m)
                axes[m] = uniform_grid(sc.stations[m].rotation_min, sc.stations[m].rotation_max, G);
            std::size_t total = 1;
            for (int m = 0; m < M; ++m)
                total *= static_cast<std::size_t>(G);

            const InnerSolver zf = zf_inner();
            std::vector<double> fitness(total, -std::numeric_limits<double>::infinity());
            parallel_for(total, opts.threads, [&](std::size_t idx) {
                RotationVector phi(M);
                std::size_t rest = idx;
                for (int m = M - 1; m >= 0; --m)
                {
                    phi[m] = axes[m][rest % G];
                    rest /= G;
                }
                fitness[idx] = zf(sc, phi, nullptr).fitness;
            });
            std::size_t best = 0;
            for (std::size_t i = 1; i < total; ++i)
                if (fitness[i] > fitness[best])
                    best = i;
            RotationVector phi(M);
            std::size_t rest = best;
            for (int m = M - 1; m >= 0; --m)
            {
                phi[m] = axes[m][rest % G];
                rest /= G;
            }
            SchemeOutcome out = from_inner(Scheme::DiscreteRaZf, zf(sc, phi, nullptr));
            out.inner_solves = static_cast<int>(total) + 1;
            return out;
        }

        SchemeOutcome upper_bound(const Scenario &sc, const SchemeOptions &opts)
        {
            const int M = sc.cell_count();
            const int G = opts.upper_bound_grid;
            require(G >= 2, "upper-bound rotation grid needs at least two points");
            const SystemConfig &cfg = sc.config;
            std::vector<double> best(M, -1.0);
            RotationVector best_phi(M, 0.0);
            std::vector<std::vector<double>> best_gain(M);
            for (int j = 0; j < G; ++j)
            {
                RotationVector phi(M);
                for (int m = 0; m < M; ++m)
                {
                    const auto &bs = sc.stations[m];
                    phi[m] = bs.rotation_min + (bs.rotation_max - bs.rotation_min) * j / (G - 1);
                }
                const ChannelSet ch = build_channels(sc, phi);
                for (int m = 0; m < M; ++m)
                {
                    double v = 0.0;
                    std::vector<double> gains;
                    for (int k = 0; k < sc.users_in_cell(m); ++k)
                    {
                        const double g = cfg.power_budget * ch.at(m, m, k).coefficients.squaredNorm();
                        gains.push_back(g);
                        v += std::log2(1.0 + g / cfg.noise_power);
                    }
                    if (v > best[m])
                    {
                        best[m] = v;
                        best_phi[m] = phi[m];
                        best_gain[m] = gains;
                    }
                }
            }
            SchemeOutcome out;
            out.scheme = Scheme::UpperBound;
            out.rotations = best_phi;
            out.inner_solves = G;
            SumRateReport &rep = out.report;
            rep.users.resize(M);
            rep.cell_rate.assign(M, 0.0);
            rep.cell_power.assign(M, cfg.power_budget);
            for (int m = 0; m < M; ++m)
            {
                for (double g : best_gain[m])
                {
                    UserRate u;
                    u.signal = g;
                    u.noise = cfg.noise_power;
                    u.sinr = g / cfg.noise_power;
                    u.rate = std::log2(1.0 + u.sinr);
                    rep.users[m].push_back(u);
                    rep.cell_rate[m] += u.rate;
                }
                rep.sum_rate += rep.cell_rate[m];
            }
            return out;
        }
    }

    SchemeOutcome run_scheme(Scheme scheme, const Scenario &scenario, const SchemeOptions &o, std::uint64_t seed,
                             SchemeContext *ctx)
    {
        scenario.validate();
        SchemeOptions opts = o;
        opts.pso_zf.seed = derive_seed(seed, 1);
        opts.pso.seed = derive_seed(seed, 2);
        opts.sca.seed = derive_seed(seed, 3);

        JointOptions jo;
        jo.pso = opts.pso;
        jo.sca = opts.sca;
        jo.warm_start = opts.warm_start;
        jo.cache = opts.cache;
        jo.threads = opts.threads;

        auto ra_zf = [&]() {
            JointOptions z = jo;
            z.pso = opts.pso_zf;
            SchemeOutcome out = from_joint(Scheme::RaZf, rotation_search(scenario, zf_inner(), z));
            if (ctx != nullptr)
                ctx->ra_zf_rotations = out.rotations;
            return out;
        };

        switch (scheme)
        {
        case Scheme::FaBf:
            return from_inner(scheme, sca_inner(opts.sca)(scenario, scenario.zero_rotations(), nullptr));
        case Scheme::FaZf:
            return from_inner(scheme, zf_inner()(scenario, scenario.zero_rotations(), nullptr));
        case Scheme::RaZf:
            return ra_zf();
        case Scheme::RaBf:
        {
            RotationVector seed_phi;
            if (ctx != nullptr && ctx->ra_zf_rotations)
                seed_phi = *ctx->ra_zf_rotations;
            else
                seed_phi = ra_zf().rotations;
            jo.seeds = {seed_phi};
            return from_joint(scheme, joint_optimize(scenario, jo));
        }
        case Scheme::DiscreteRaZf:
            return discrete_ra_zf(scenario, opts);
        case Scheme::UpperBound:
            return upper_bound(scenario, opts);
        case Scheme::NearOnly:
        case Scheme::MixedOnly:
        {
            ScaOptions masked = opts.sca;
            masked.mask = scheme == Scheme::NearOnly ? InterferenceMask{true, false} : InterferenceMask{false, true};
            return from_joint(scheme, rotation_search(scenario, sca_inner(masked), jo));
        }
        }
        fail(ErrorCode::InvalidArgument, "unknown scheme");
    }

    double recompute_sum_rate(const Scenario &scenario, const RotationVector &rotations,
                              const std::vector<CMatrix> &digital)
    {
        const ChannelSet ch = build_channels(scenario, rotations);
        const std::vector<CMatrix> analog = analog_mrt(scenario, rotations);
        return compute_rates(ch, analog, digital, scenario.config.noise_power).sum_rate;
    }

    // ---- experiments ---------------------------------------------------

    std::vector<std::string> simulate_presets()
    {
        return {"power_sweep", "users_sweep", "antenna_sweep", "convergence", "tradeoff_3user"};
    }

    std::vector<std::string> analyze_presets() { return {"fresnel_verify", "two_cell_angle", "two_cell_range", "corollary"}; }

    std::vector<Scheme> preset_schemes(const std::string &preset)
    {
        if (preset == "convergence")
            return {Scheme::RaBf};
        if (preset == "tradeoff_3user")
            return {Scheme::RaBf, Scheme::NearOnly, Scheme::MixedOnly};
        return {Scheme::RaBf, Scheme::FaBf, Scheme::FaZf, Scheme::RaZf, Scheme::DiscreteRaZf, Scheme::UpperBound};
    }

    ScenarioSpec base_scenario(const ExperimentSpec &spec)
    {
        ScenarioSpec base;
        if (spec.scenario_file)
        {
            base = load_scenario(*spec.scenario_file);
        }
        else
        {
            base.config.power_budget = dbm_to_watt(30.0);
            base.config.noise_power = dbm_to_watt(-80.0);
            if (spec.small)
                base.config.antenna_count = 65;
        }
        return base;
    }

    std::vector<SweepPoint> preset_sweep(const ExperimentSpec &spec, const ScenarioSpec &base)
    {
        std::vector<SweepPoint> out;
        const std::string &p = spec.preset;
        if (p == "power_sweep")
        {
            const std::vector<double> grid = spec.small ? std::vector<double>{10, 20, 30, 40}
                                                        : std::vector<double>{10, 15, 20, 25, 30, 35, 40};
            for (double dbm : grid)
            {
                SweepPoint pt{"power_dbm", dbm, base};
                pt.spec.config.power_budget = dbm_to_watt(dbm);
                out.push_back(pt);
            }
        }
        else if (p == "users_sweep")
        {
            const std::vector<double> grid = spec.small ? std::vector<double>{1, 2, 3} : std::vector<double>{1, 2, 3, 4};
            for (double k : grid)
            {
                SweepPoint pt{"users_per_cell", k, base};
                pt.spec.config.users_per_cell = static_cast<int>(k);
                pt.spec.users_per_cell.clear();
                pt.spec.fixed_users.clear();
                out.push_back(pt);
            }
        }
        else if (p == "antenna_sweep")
        {
            const std::vector<double> grid =
                spec.small ? std::vector<double>{17, 33, 65} : std::vector<double>{33, 65, 129, 257};
            for (double n : grid)
            {
                SweepPoint pt{"antenna_count", n, base};
                pt.spec.config.antenna_count = static_cast<int>(n);
                out.push_back(pt);
            }
        }
        else if (p == "convergence")
        {
            out.push_back({"none", 0.0, base});
        }
        else if (p == "tradeoff_3user")
        {
            ScenarioSpec two = base;
            two.config.cell_count = 2;
            two.config.nlos_path_count = 0;
            if (two.stations.size() != 2)
            {
                two.stations.clear();
                two.canonical_positions = true;
            }
            two.users_per_cell = {2, 1};
            auto make = [&](double theta12, double r12_frac) {
                ScenarioSpec s = two;
                const double R = s.config.rayleigh_distance();
                s.fixed_users = {{{0.4 * kPi, 0.3 * R}, {theta12, r12_frac * R}}, {{0.4 * kPi, 0.3 * R}}};
                return s;
            };
            const std::vector<double> angles = spec.small ? std::vector<double>{60, 80, 100, 120}
                                                          : std::vector<double>{60, 70, 80, 90, 100, 110, 120};
            for (double deg : angles)
                out.push_back({"theta12_deg", deg, make(deg_to_rad(deg), 0.6)});
            const std::vector<double> ranges = spec.small ? std::vector<double>{0.2, 0.5, 0.8}
                                                          : std::vector<double>{0.1, 0.2, 0.4, 0.6, 0.8, 1.0};
            for (double f : ranges)
                out.push_back({"r12_frac", f, make(0.6 * kPi, f)});
        }
        else
        {
            fail(ErrorCode::InvalidArgument, "unknown simulate preset '" + p + "'");
        }
        for (auto &pt : out)
            pt.spec.validate();
        return out;
    }

    Scenario drop_scenario(const ScenarioSpec &spec, std::uint64_t seed, int drop)
    {
        std::mt19937_64 rng(derive_seed(seed, 0x706c6163ULL, static_cast<std::uint64_t>(drop)));
        return place_users(spec, rng);
    }

    std::uint64_t drop_algorithm_seed(std::uint64_t seed, int sweep_index, int drop)
    {
        return derive_seed(seed, 0x616c676fULL + static_cast<std::uint64_t>(sweep_index), static_cast<std::uint64_t>(drop));
    }

    namespace
    {
        std::string fmt(double v)
        {
            if (!std::isfinite(v))
                return std::isnan(v) ? "" : (v > 0 ? "inf" : "-inf");
            std::ostringstream os;
            os.precision(12);
            os << v;
            return os.str();
        }

        std::vector<Scheme> execution_order(const std::vector<Scheme> &schemes)
        {
            // RA+ZF runs before RA+BF so its rotations can seed the joint search.
            std::vector<Scheme> order = schemes;
            auto zf = std::find(order.begin(), order.end(), Scheme::RaZf);
            auto bf = std::find(order.begin(), order.end(), Scheme::RaBf);
            if (zf != order.end() && bf != order.end() && zf > bf)
                std::iter_swap(zf, bf);
            return order;
        }

        void write_sca_trace(const fs::path &path, const std::vector<double> &trajectory,
                             const std::vector<ScaTraceRow> &trace)
        {
            std::ofstream os(path);
            if (!os)
                fail(ErrorCode::Io, "cannot write '" + path.string() + "'");
            os << "iter,surrogate_obj,true_sum_rate,max_kkt_residual\n";
            if (!trajectory.empty())
                os << 0 << ",," << fmt(trajectory.front()) << ",\n";
            for (const auto &r : trace)
                os << r.iter << ',' << fmt(r.surrogate) << ',' << fmt(r.true_sum_rate) << ',' << fmt(r.kkt_residual)
                   << '\n';
        }

        nlohmann::json drop_json(const DropRecord &r, const SweepPoint &pt)
        {
            nlohmann::json j;
            j["scheme"] = scheme_name(r.scheme);
            j["sweep_index"] = r.sweep_index;
            j["sweep_var"] = pt.var;
            j["sweep_value"] = pt.value;
            j["drop"] = r.drop;
            j["ok"] = r.ok;
            if (!r.ok)
            {
                j["error"] = r.error;
                return j;
            }
            j["sum_rate"] = r.sum_rate;
            j["user_rates"] = r.user_rates;
            j["rotations"] = r.rotations;
            nlohmann::json digital = nlohmann::json::array();
            for (const auto &F : r.digital)
            {
                nlohmann::json rows = nlohmann::json::array();
                for (int i = 0; i < F.rows(); ++i)
                {
                    nlohmann::json row = nlohmann::json::array();
                    for (int k = 0; k < F.cols(); ++k)
                        row.push_back({F(i, k).real(), F(i, k).imag()});
                    rows.push_back(row);
                }
                digital.push_back(rows);
            }
            j["digital"] = digital;
            return j;
        }

        void ensure_dir(const fs::path &p)
        {
            std::error_code ec;
            fs::create_directories(p, ec);
            if (ec)
                fail(ErrorCode::Io, "cannot create directory '" + p.string() + "': " + ec.message());
        }

        std::ofstream open_out(const fs::path &p)
        {
            std::ofstream os(p);
            if (!os)
                fail(ErrorCode::Io, "cannot write '" + p.string() + "'");
            return os;
        }
    }

    ExperimentResult run_experiment(const ExperimentSpec &spec_in)
    {
        ExperimentSpec spec = spec_in;
        if (spec.small && !spec.drops_set)
            spec.drops = 5;
        require(spec.drops >= 1, "at least one drop is required");

        ExperimentResult res;
        const ScenarioSpec base = base_scenario(spec);
        res.sweep = preset_sweep(spec, base);
        require(!res.sweep.empty(), "sweep grid is empty");
        res.schemes = spec.schemes.empty() ? preset_schemes(spec.preset) : spec.schemes;
        for (const auto &pt : res.sweep)
        {
            if (pt.spec.config.cell_count > 3 &&
                std::find(res.schemes.begin(), res.schemes.end(), Scheme::DiscreteRaZf) != res.schemes.end())
                fail(ErrorCode::Unsupported, "DiscreteRA+ZF refuses more than 3 cells");
        }
        const SchemeOptions opts =
            spec.scheme_options ? *spec.scheme_options : (spec.small ? small_scheme_options() : default_scheme_options());

        const fs::path out_dir = spec.output_dir;
        const bool write = !spec.output_dir.empty();
        const bool all_traces = spec.preset == "convergence";
        if (write)
            ensure_dir(out_dir / "traces");

        const std::vector<Scheme> order = execution_order(res.schemes);
        const int S = static_cast<int>(res.schemes.size());
        const std::size_t tasks = res.sweep.size() * static_cast<std::size_t>(spec.drops);
        res.drops.resize(tasks * S);

        parallel_for(tasks, spec.threads, [&](std::size_t t) {
            const int si = static_cast<int>(t / spec.drops);
            const int d = static_cast<int>(t % spec.drops);
            const SweepPoint &pt = res.sweep[si];
            const std::uint64_t alg_seed = drop_algorithm_seed(spec.seed, si, d);
            std::optional<Scenario> sc;
            std::string scenario_error;
            try
            {
                sc = drop_scenario(pt.spec, spec.seed, d);
            }
            catch (const Error &e)
            {
                scenario_error = e.what();
            }
            SchemeContext ctx;
            for (Scheme s : order)
            {
                const int col = static_cast<int>(std::find(res.schemes.begin(), res.schemes.end(), s) - res.schemes.begin());
                DropRecord &rec = res.drops[t * S + col];
                rec.scheme = s;
                rec.sweep_index = si;
                rec.drop = d;
                if (!sc)
                {
                    rec.error = "scenario: " + scenario_error;
                    continue;
                }
                const auto t0 = std::chrono::steady_clock::now();
                try
                {
                    const SchemeOutcome out = run_scheme(s, *sc, opts, alg_seed, &ctx);
                    rec.ok = true;
                    rec.sum_rate = out.report.sum_rate;
                    for (const auto &cell : out.report.users)
                        for (const auto &u : cell)
                            rec.user_rates.push_back(u.rate);
                    rec.rotations = out.rotations;
                    rec.digital = out.digital;
                    if (write && (d == 0 || all_traces))
                    {
                        const std::string stem = std::string(scheme_file(s)) + "_s" + std::to_string(si) + "_d" +
                                                 std::to_string(d);
                        if (!out.sca_trace.empty())
                            write_sca_trace(out_dir / "traces" / (stem + "_sca.csv"), out.sca_trajectory,
                                            out.sca_trace);
                        if (out.pso)
                        {
                            std::ofstream os = open_out(out_dir / "traces" / (stem + "_pso.csv"));
                            write_pso_trace(os, *out.pso);
                        }
                    }
                }
                catch (const Error &e)
                {
                    rec.ok = false;
                    rec.error = e.what();
                    log::warn(scheme_name(s), " failed on sweep point ", si, ", drop ", d, ": ", e.what());
                }
                rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            }
        });

        // Aggregate in sweep-major, then requested scheme order.
        for (std::size_t si = 0; si < res.sweep.size(); ++si)
        {
            for (int col = 0; col < S; ++col)
            {
                ResultRow row;
                row.scheme = res.schemes[col];
                row.sweep_var = res.sweep[si].var;
                row.sweep_value = res.sweep[si].value;
                std::vector<double> values;
                std::vector<double> user_sum;
                double time = 0.0;
                for (int d = 0; d < spec.drops; ++d)
                {
                    const DropRecord &rec = res.drops[(si * spec.drops + d) * S + col];
                    time += rec.wall_time;
                    if (!rec.ok)
                    {
                        ++row.failed;
                        continue;
                    }
                    values.push_back(rec.sum_rate);
                    if (user_sum.size() < rec.user_rates.size())
                        user_sum.resize(rec.user_rates.size(), 0.0);
                    for (std::size_t u = 0; u < rec.user_rates.size(); ++u)
                        user_sum[u] += rec.user_rates[u];
                }
                row.drops = static_cast<int>(values.size());
                row.wall_time = time / spec.drops;
                res.failures += row.failed;
                if (!values.empty())
                {
                    const double n = static_cast<double>(values.size());
                    row.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
                    double ss = 0.0;
                    for (double v : values)
                        ss += (v - row.mean) * (v - row.mean);
                    row.std = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
                    row.min = *std::min_element(values.begin(), values.end());
                    row.max = *std::max_element(values.begin(), values.end());
                    // Keep the mean inside [min, max] despite summation rounding.
                    row.mean = std::clamp(row.mean, row.min, row.max);
                    for (double u : user_sum)
                        row.per_user_mean.push_back(u / n);
                }
                else
                {
                    row.mean = row.std = row.min = row.max = std::numeric_limits<double>::quiet_NaN();
                }
                res.rows.push_back(row);
            }
        }

        // Round-trip: recompute a deterministic sample of stored drops from rotations and F_D.
        if (spec.roundtrip_fraction > 0.0)
        {
            const std::size_t stride =
                std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(1.0 / spec.roundtrip_fraction)));
            std::size_t seen = 0;
            for (const DropRecord &rec : res.drops)
            {
                if (!rec.ok || rec.scheme == Scheme::UpperBound)
                    continue;
                if (seen++ % stride != 0)
                    continue;
                const Scenario sc = drop_scenario(res.sweep[rec.sweep_index].spec, spec.seed, rec.drop);
                const double again = recompute_sum_rate(sc, rec.rotations, rec.digital);
                ++res.roundtrip_checked;
                if (std::abs(again - rec.sum_rate) > 1e-9 * std::max(1.0, std::abs(rec.sum_rate)))
                {
                    ++res.roundtrip_mismatches;
                    log::warn("round-trip mismatch for ", scheme_name(rec.scheme), " sweep ", rec.sweep_index,
                              " drop ", rec.drop, ": stored ", rec.sum_rate, ", recomputed ", again);
                }
            }
        }

        if (write)
        {
            {
                std::ofstream os = open_out(out_dir / "results.csv");
                write_results_csv(os, res.rows);
            }
            {
                std::ofstream os = open_out(out_dir / "timing.csv");
                write_timing_csv(os, res.rows);
            }
            {
                std::ofstream os = open_out(out_dir / "drops.jsonl");
                for (const DropRecord &rec : res.drops)
                    os << drop_json(rec, res.sweep[rec.sweep_index]).dump() << '\n';
            }
            {
                nlohmann::json meta;
                meta["preset"] = spec.preset;
                meta["drops"] = spec.drops;
                meta["seed"] = spec.seed;
                meta["small"] = spec.small;
                meta["scenario_file"] = spec.scenario_file ? *spec.scenario_file : "";
                std::vector<std::string> names;
                for (Scheme s : res.schemes)
                    names.push_back(scheme_name(s));
                meta["schemes"] = names;
                meta["pso_swarm"] = opts.pso.swarm_size;
                meta["pso_iterations"] = opts.pso.iterations;
                meta["pso_zf_swarm"] = opts.pso_zf.swarm_size;
                meta["pso_zf_iterations"] = opts.pso_zf.iterations;
                meta["failures"] = res.failures;
                meta["roundtrip_checked"] = res.roundtrip_checked;
                meta["roundtrip_mismatches"] = res.roundtrip_mismatches;
                std::ofstream os = open_out(out_dir / "experiment.json");
                os << meta.dump(2) << '\n';
            }
        }
        return res;
    }

    void write_results_csv(std::ostream &os, const std::vector<ResultRow> &rows)
    {
        os << "scheme,sweep_var,sweep_value,drops,failed,mean_sum_rate,std_sum_rate,min_sum_rate,max_sum_rate,"
              "per_user_mean_rates\n";
        for (const auto &r : rows)
        {
            os << scheme_name(r.scheme) << ',' << r.sweep_var << ',' << fmt(r.sweep_value) << ',' << r.drops << ','
               << r.failed << ',' << fmt(r.mean) << ',' << fmt(r.std) << ',' << fmt(r.min) << ',' << fmt(r.max) << ',';
            for (std::size_t u = 0; u < r.per_user_mean.size(); ++u)
                os << (u ? ";" : "") << fmt(r.per_user_mean[u]);
            os << '\n';
        }
    }

    void write_timing_csv(std::ostream &os, const std::vector<ResultRow> &rows)
    {
        os << "scheme,sweep_var,sweep_value,wall_time_s\n";
        for (const auto &r : rows)
            os << scheme_name(r.scheme) << ',' << r.sweep_var << ',' << fmt(r.sweep_value) << ',' << fmt(r.wall_time)
               << '\n';
    }

    // ---- analysis presets ------------------------------------------------

    namespace
    {
        double approx_or_nan(double psi, double theta, double r, double phi, const SystemConfig &cfg)
        {
            try
            {
                return rho_approx(psi, theta, r, phi, cfg);
            }
            catch (const Error &e)
            {
                if (e.code() != ErrorCode::DegenerateGeometry)
                    throw;
                return std::numeric_limits<double>::quiet_NaN();
            }
        }

        AnalysisRow two_cell_row(const SystemConfig &cfg, const std::string &series, double sweep, double theta11,
                                 double r11, double theta21, double r21, bool rotate)
        {
            constexpr double lo = -kPi / 6;
            constexpr double hi = kPi / 6;
            const TwoCellCase fixed = make_two_cell_case(cfg, theta11, r11, theta21, r21, 0.0, 0.0);
            double phi1 = 0.0;
            double phi2 = 0.0;
            if (rotate)
            {
                phi2 = optimal_rotation(fixed.psi21, theta21, r21, lo, hi, cfg);
                phi1 = optimal_rotation(fixed.psi12, theta11, r11, lo, hi, cfg);
            }
            const TwoCellCase c = make_two_cell_case(cfg, theta11, r11, theta21, r21, phi1, phi2);
            const PowerSearch ps = power_grid_search(c, 101);
            AnalysisRow row;
            row.series = series;
            row.sweep = sweep;
            row.rho_exact = rho_exact(c.psi21, theta21, r21, phi2, cfg);
            row.rho_approx = approx_or_nan(c.psi21, theta21, r21, phi2, cfg);
            row.rate_u11 = ps.rates.rate_u11;
            row.rate_u21 = ps.rates.rate_u21;
            row.sum_rate = ps.rates.sum;
            row.phi_star = phi2;
            return row;
        }
    }

    std::vector<AnalysisRow> run_analysis(const std::string &preset, const SystemConfig &cfg)
    {
        cfg.validate();
        constexpr double lo = -kPi / 6;
        constexpr double hi = kPi / 6;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const double R = cfg.rayleigh_distance();
        std::vector<AnalysisRow> rows;
        if (preset == "fresnel_verify")
        {
            const double theta = 0.4 * kPi;
            const double r = 0.3 * R;
            for (double psi_frac : {0.35, 0.4, 0.5})
            {
                const double psi = psi_frac * kPi;
                std::ostringstream label;
                label << "psi=" << psi_frac << "pi";
                const double phi_star = optimal_rotation(psi, theta, r, lo, hi, cfg);
                for (double phi : uniform_grid(lo, hi, 181))
                    rows.push_back({label.str(), phi, rho_exact(psi, theta, r, phi, cfg),
                                    approx_or_nan(psi, theta, r, phi, cfg), nan, nan, nan, phi_star});
            }
        }
        else if (preset == "two_cell_angle")
        {
            for (double theta21 : uniform_grid(kPi / 3, 2 * kPi / 3, 61))
            {
                rows.push_back(two_cell_row(cfg, "rotated", theta21, 0.4 * kPi, 0.3 * R, theta21, 0.3 * R, true));
                rows.push_back(two_cell_row(cfg, "fixed", theta21, 0.4 * kPi, 0.3 * R, theta21, 0.3 * R, false));
            }
        }
        else if (preset == "two_cell_range")
        {
            for (double frac : uniform_grid(0.1, 1.0, 19))
            {
                rows.push_back(two_cell_row(cfg, "rotated", frac, 0.4 * kPi, 0.3 * R, 0.4 * kPi, frac * R, true));
                rows.push_back(two_cell_row(cfg, "fixed", frac, 0.4 * kPi, 0.3 * R, 0.4 * kPi, frac * R, false));
            }
        }
        else if (preset == "corollary")
        {
            const double a = 0.4 * kPi;
            for (double frac : uniform_grid(0.1, 1.0, 10))
            {
                const double r = frac * R;
                const double phi_star = optimal_rotation(a, a, r, lo, hi, cfg);
                rows.push_back({"phi=0", frac, rho_exact(a, a, r, 0.0, cfg), approx_or_nan(a, a, r, 0.0, cfg), nan, nan,
                                nan, phi_star});
                rows.push_back({"phi=phi*", frac, rho_exact(a, a, r, phi_star, cfg),
                                approx_or_nan(a, a, r, phi_star, cfg), nan, nan, nan, phi_star});
            }
        }
        else
        {
            fail(ErrorCode::InvalidArgument, "unknown analyze preset '" + preset + "'");
        }
        return rows;
    }

    void write_analysis_csv(std::ostream &os, const std::vector<AnalysisRow> &rows)
    {
        os << "series,sweep_var,rho_exact,rho_approx,rate_u11,rate_u21,sum_rate,phi_star\n";
        for (const auto &r : rows)
            os << r.series << ',' << fmt(r.sweep) << ',' << fmt(r.rho_exact) << ',' << fmt(r.rho_approx) << ','
               << fmt(r.rate_u11) << ',' << fmt(r.rate_u21) << ',' << fmt(r.sum_rate) << ',' << fmt(r.phi_star) << '\n';
    }
}
