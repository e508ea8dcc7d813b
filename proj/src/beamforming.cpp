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

#include "ramix/beamforming.hpp"
#include "ramix/log.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace ramix
{
    std::vector<CMatrix> analog_mrt(const Scenario &scenario, const RotationVector &rotations)
    {
        scenario.validate();
        const int M = scenario.cell_count();
        require(static_cast<int>(rotations.size()) == M, "rotation vector length must equal the number of cells");
        const SystemConfig &cfg = scenario.config;
        const double sqrtN = std::sqrt(static_cast<double>(cfg.antenna_count));
        std::vector<CMatrix> out(M);
        for (int m = 0; m < M; ++m)
        {
            require(scenario.stations[m].admissible(rotations[m]), "rotation outside the admissible range");
            const int K = scenario.users_in_cell(m);
            out[m].resize(cfg.antenna_count, K);
            for (int k = 0; k < K; ++k)
            {
                const UserPlacement &u = scenario.users[m][k];
                out[m].col(k) = sqrtN * near_steering(u.angle, u.range, rotations[m], cfg);
            }
        }
        return out;
    }

    EffectiveChannels::EffectiveChannels(std::vector<int> users_per_cell) : users_per_cell_(std::move(users_per_cell))
    {
        cell_offset_.resize(users_per_cell_.size());
        for (std::size_t m = 0; m < users_per_cell_.size(); ++m)
        {
            cell_offset_[m] = users_total_;
            users_total_ += users_per_cell_[m];
        }
        entries_.resize(users_per_cell_.size() * users_total_);
        gram.resize(users_per_cell_.size());
    }

    int EffectiveChannels::total_users() const { return static_cast<int>(users_total_); }

    std::size_t EffectiveChannels::slot(int i, int m, int k) const
    {
        return static_cast<std::size_t>(i) * users_total_ + cell_offset_.at(m) + static_cast<std::size_t>(k);
    }

    CMatrix EffectiveChannels::serving_matrix(int m) const
    {
        const int K = users_in_cell(m);
        CMatrix H(K, K);
        for (int k = 0; k < K; ++k)
            H.col(k) = at(m, m, k);
        return H;
    }

    EffectiveChannels effective_channels(const ChannelSet &channels, const std::vector<CMatrix> &analog)
    {
        const int M = channels.cell_count();
        require(static_cast<int>(analog.size()) == M, "one analog beamformer per cell required");
        EffectiveChannels eff(channels.users_per_cell());
        for (int i = 0; i < M; ++i)
        {
            require(analog[i].rows() == channels.antenna_count() && analog[i].cols() == channels.users_in_cell(i),
                    "analog beamformer dimensions do not match the channel set");
            eff.gram[i] = analog[i].adjoint() * analog[i];
            for (int m = 0; m < M; ++m)
                for (int k = 0; k < channels.users_in_cell(m); ++k)
                    eff.at(i, m, k) = analog[i].adjoint() * channels.at(i, m, k).coefficients;
        }
        return eff;
    }

    namespace
    {
        double rate_of(double sinr) { return std::log2(1.0 + sinr); }

        void finish_report(SumRateReport &rep, double power_budget)
        {
            rep.sum_rate = 0.0;
            rep.cell_rate.assign(rep.users.size(), 0.0);
            for (std::size_t m = 0; m < rep.users.size(); ++m)
            {
                for (auto &u : rep.users[m])
                {
                    u.sinr = u.signal / (u.intra + u.inter + u.noise);
                    u.rate = rate_of(u.sinr);
                    rep.cell_rate[m] += u.rate;
                }
                rep.sum_rate += rep.cell_rate[m];
            }
            if (power_budget > 0.0)
            {
                for (std::size_t m = 0; m < rep.cell_power.size(); ++m)
                {
                    if (rep.cell_power[m] > power_budget + 1e-6)
                    {
                        rep.power_violation = true;
                        log::warn("cell ", m, " transmit power ", rep.cell_power[m], " W exceeds budget ",
                                  power_budget, " W");
                    }
                }
            }
        }

        // amplitude(i, m, k, j) = received amplitude of stream (i, j) at user (m, k)
        template <typename Amplitude>
        SumRateReport assemble(const std::vector<int> &counts, Amplitude amplitude, double noise,
                               InterferenceMask mask)
        {
            const int M = static_cast<int>(counts.size());
            SumRateReport rep;
            rep.users.resize(M);
            for (int m = 0; m < M; ++m)
            {
                rep.users[m].resize(counts[m]);
                for (int k = 0; k < counts[m]; ++k)
                {
                    UserRate &u = rep.users[m][k];
                    u.noise = noise;
                    for (int i = 0; i < M; ++i)
                    {
                        for (int j = 0; j < counts[i]; ++j)
                        {
                            const double p = std::norm(amplitude(i, m, k, j));
                            if (i == m && j == k)
                                u.signal = p;
                            else if (i == m)
                                u.intra += mask.intra ? p : 0.0;
                            else
                                u.inter += mask.inter ? p : 0.0;
                        }
                    }
                }
            }
            return rep;
        }

        void check_digital(const std::vector<int> &counts, const std::vector<CMatrix> &digital)
        {
            require(digital.size() == counts.size(), "one digital beamformer per cell required");
            for (std::size_t m = 0; m < counts.size(); ++m)
                require(digital[m].rows() == counts[m] && digital[m].cols() == counts[m],
                        "digital beamformer must be K x K");
        }
    }

    SumRateReport compute_rates(const EffectiveChannels &eff, const std::vector<CMatrix> &digital, double noise,
                                double power_budget, InterferenceMask mask)
    {
        check_digital(eff.users_per_cell(), digital);
        require(noise > 0.0, "noise power must be positive");
        auto amp = [&](int i, int m, int k, int j) { return eff.at(i, m, k).dot(digital[i].col(j)); };
        SumRateReport rep = assemble(eff.users_per_cell(), amp, noise, mask);
        rep.cell_power.resize(digital.size());
        for (std::size_t m = 0; m < digital.size(); ++m)
            rep.cell_power[m] = (digital[m].adjoint() * eff.gram[m] * digital[m]).trace().real();
        finish_report(rep, power_budget);
        return rep;
    }

    SumRateReport compute_rates(const ChannelSet &channels, const std::vector<CMatrix> &analog,
                                const std::vector<CMatrix> &digital, double noise, double power_budget,
                                InterferenceMask mask)
    {
        check_digital(channels.users_per_cell(), digital);
        require(noise > 0.0, "noise power must be positive");
        require(analog.size() == digital.size(), "one analog beamformer per cell required");
        std::vector<CMatrix> hybrid(analog.size());
        for (std::size_t m = 0; m < analog.size(); ++m)
        {
            require(analog[m].rows() == channels.antenna_count() && analog[m].cols() == digital[m].rows(),
                    "analog beamformer dimensions do not match");
            hybrid[m] = analog[m] * digital[m];
        }
        auto amp = [&](int i, int m, int k, int j) { return channels.at(i, m, k).coefficients.dot(hybrid[i].col(j)); };
        SumRateReport rep = assemble(channels.users_per_cell(), amp, noise, mask);
        rep.cell_power.resize(hybrid.size());
        for (std::size_t m = 0; m < hybrid.size(); ++m)
            rep.cell_power[m] = hybrid[m].squaredNorm();
        finish_report(rep, power_budget);
        return rep;
    }

    namespace
    {
        void scale_columns(CMatrix &F, const CMatrix &gram, double per_stream)
        {
            for (int k = 0; k < F.cols(); ++k)
            {
                const double used = F.col(k).dot(gram * F.col(k)).real();
                if (used > 0.0)
                    F.col(k) *= std::sqrt(per_stream / used);
            }
        }
    }

    ZfResult zf_digital(const CMatrix &serving, const CMatrix &gram, double power, bool allow_loading)
    {
        const int K = static_cast<int>(serving.rows());
        require(K >= 1 && serving.cols() == K, "ZF needs a square effective channel matrix");
        require(gram.rows() == K && gram.cols() == K, "Gram matrix size mismatch");
        require(power >= 0.0, "power budget must be non-negative");
        ZfResult res;
        Eigen::JacobiSVD<CMatrix> svd(serving);
        const auto &sv = svd.singularValues();
        res.condition = sv(K - 1) > 0.0 ? sv(0) / sv(K - 1) : std::numeric_limits<double>::infinity();
        if (!(res.condition < 1e10))
        {
            if (!allow_loading || !(sv(0) > 0.0))
                fail(ErrorCode::Infeasible, "ZF infeasible: effective channel condition number " +
                                                std::to_string(res.condition));
            const double delta = 1e-8 * serving.squaredNorm() / K;
            const CMatrix A = serving.adjoint() * serving + delta * CMatrix::Identity(K, K);
            res.digital = serving * A.inverse();
            res.regularized = true;
            log::info("ZF regularised: condition number ", res.condition, ", loading ", delta);
        }
        else
        {
            res.digital = serving.adjoint().inverse();
        }
        scale_columns(res.digital, gram, power / K);
        return res;
    }

    CMatrix mrt_digital(const CMatrix &serving, const CMatrix &gram, double power)
    {
        const int K = static_cast<int>(serving.rows());
        require(serving.cols() == K && gram.rows() == K, "MRT dimension mismatch");
        CMatrix F = serving;
        for (int k = 0; k < K; ++k)
        {
            if (F.col(k).squaredNorm() == 0.0)
            {
                F.col(k).setZero();
                F(k, k) = 1.0;
            }
        }
        scale_columns(F, gram, power / K);
        return F;
    }

    RankOneResult extract_rank_one(const CMatrix &W, const CMatrix &gram,
                                   const std::function<double(const CVector &)> &score, std::mt19937_64 &rng,
                                   int samples)
    {
        const int K = static_cast<int>(W.rows());
        require(K >= 1 && W.cols() == K, "rank-one extraction needs a square matrix");
        const CMatrix Wh = 0.5 * (W + W.adjoint());
        Eigen::SelfAdjointEigenSolver<CMatrix> es(Wh);
        const auto &ev = es.eigenvalues();
        const double l1 = std::max(ev(K - 1), 0.0);
        const double l2 = K > 1 ? std::max(ev(K - 2), 0.0) : 0.0;
        RankOneResult res;
        res.eigen_ratio = l1 > 0.0 ? l2 / l1 : 0.0;
        const CVector principal = std::sqrt(l1) * es.eigenvectors().col(K - 1);
        if (l1 == 0.0 || res.eigen_ratio <= 1e-6)
        {
            res.vector = principal;
            log::debug("rank-one extraction: principal eigenvector (ratio ", res.eigen_ratio, ")");
            return res;
        }

        res.randomized = true;
        const double budget = (gram * Wh).trace().real();
        auto rescale = [&](CVector v) {
            const double used = v.dot(gram * v).real();
            if (used > 0.0)
                v *= std::sqrt(budget / used);
            return v;
        };
        CMatrix root = CMatrix::Zero(K, K);
        for (int i = 0; i < K; ++i)
            root.col(i) = std::sqrt(std::max(ev(i), 0.0)) * es.eigenvectors().col(i);

        CVector best = rescale(principal);
        double best_score = score(best);
        std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
        for (int s = 0; s < samples; ++s)
        {
            CVector z(K);
            for (int i = 0; i < K; ++i)
                z(i) = cdouble(normal(rng), normal(rng));
            const CVector cand = rescale(root * z);
            const double sc = score(cand);
            if (sc > best_score)
            {
                best_score = sc;
                best = cand;
            }
        }
        res.vector = best;
        log::debug("rank-one extraction: randomisation (ratio ", res.eigen_ratio, ", score ", best_score, ")");
        return res;
    }

    namespace
    {
        // Flat index helpers over (cell, user).
        struct FlatIndex
        {
            std::vector<int> offset;
            std::vector<int> cell;
            std::vector<int> user;

            explicit FlatIndex(const std::vector<int> &counts)
            {
                int u = 0;
                for (std::size_t m = 0; m < counts.size(); ++m)
                {
                    offset.push_back(u);
                    for (int k = 0; k < counts[m]; ++k, ++u)
                    {
                        cell.push_back(static_cast<int>(m));
                        user.push_back(k);
                    }
                }
            }
            int of(int m, int k) const { return offset[m] + k; }
            int size() const { return static_cast<int>(cell.size()); }
        };

        struct ScaProblem
        {
            RelaxedSubproblem base;
            // Per user, the terms entering the interference-plus-noise a_u.
            std::vector<std::vector<RelaxedSubproblem::Term>> interference;
        };

        ScaProblem build_problem(const EffectiveChannels &eff, double power, double noise, InterferenceMask mask)
        {
            const FlatIndex idx(eff.users_per_cell());
            const int M = eff.cell_count();
            ScaProblem sp;
            RelaxedSubproblem &p = sp.base;
            p.power = power;
            p.cell_gram = eff.gram;
            for (int b = 0; b < idx.size(); ++b)
            {
                p.block_dims.push_back(eff.users_in_cell(idx.cell[b]));
                p.block_cell.push_back(idx.cell[b]);
            }
            // matrices[(i, m, k)] = hbar hbar^H, stored in slot order of the flat index.
            std::vector<std::vector<int>> matrix_of(M, std::vector<int>(idx.size(), -1));
            for (int i = 0; i < M; ++i)
            {
                for (int u = 0; u < idx.size(); ++u)
                {
                    const CVector &h = eff.at(i, idx.cell[u], idx.user[u]);
                    matrix_of[i][u] = static_cast<int>(p.matrices.size());
                    p.matrices.push_back(h * h.adjoint());
                }
            }
            p.users.resize(idx.size());
            sp.interference.resize(idx.size());
            for (int u = 0; u < idx.size(); ++u)
            {
                const int m = idx.cell[u];
                p.users[u].noise = noise;
                p.users[u].terms.push_back({u, matrix_of[m][u]});
                for (int b = 0; b < idx.size(); ++b)
                {
                    if (b == u)
                        continue;
                    const int i = idx.cell[b];
                    if ((i == m && !mask.intra) || (i != m && !mask.inter))
                        continue;
                    const RelaxedSubproblem::Term t{b, matrix_of[i][u]};
                    p.users[u].terms.push_back(t);
                    sp.interference[u].push_back(t);
                }
            }
            return sp;
        }

        double term_sum(const RelaxedSubproblem &p, const std::vector<RelaxedSubproblem::Term> &terms,
                        const CMatrixList &W)
        {
            double s = 0.0;
            for (const auto &t : terms)
                s += (p.matrices[t.matrix] * W[t.block]).trace().real();
            return s;
        }

        double rate_of_covariances(const ScaProblem &sp, const CMatrixList &W)
        {
            double r = 0.0;
            for (std::size_t u = 0; u < sp.base.users.size(); ++u)
            {
                const double a = sp.base.users[u].noise + term_sum(sp.base, sp.interference[u], W);
                const double t = sp.base.users[u].noise + term_sum(sp.base, sp.base.users[u].terms, W);
                r += std::log2(t / a);
            }
            return r;
        }

        CMatrixList covariances_from_digital(const std::vector<CMatrix> &digital, const FlatIndex &idx)
        {
            CMatrixList W(idx.size());
            for (int u = 0; u < idx.size(); ++u)
            {
                const CVector f = digital[idx.cell[u]].col(idx.user[u]);
                W[u] = f * f.adjoint();
            }
            return W;
        }

        // Keep every cell within budget after extraction.
        void enforce_budget(std::vector<CMatrix> &digital, const std::vector<CMatrix> &gram, double power)
        {
            for (std::size_t m = 0; m < digital.size(); ++m)
            {
                const double used = (digital[m].adjoint() * gram[m] * digital[m]).trace().real();
                if (used > power && used > 0.0)
                    digital[m] *= std::sqrt(power / used) * (1.0 - 1e-15);
            }
        }
    }

    double covariance_sum_rate(const EffectiveChannels &eff, const CMatrixList &W, double noise,
                               InterferenceMask mask)
    {
        const ScaProblem sp = build_problem(eff, 1.0, noise, mask);
        require(static_cast<int>(W.size()) == eff.total_users(), "one covariance per user required");
        return rate_of_covariances(sp, W);
    }

    std::vector<CMatrix> initial_digital(const EffectiveChannels &eff, double power, bool *used_zf)
    {
        std::vector<CMatrix> out(eff.cell_count());
        bool all_zf = true;
        for (int m = 0; m < eff.cell_count(); ++m)
        {
            const CMatrix H = eff.serving_matrix(m);
            try
            {
                out[m] = zf_digital(H, eff.gram[m], power, true).digital;
            }
            catch (const Error &e)
            {
                if (e.code() != ErrorCode::Infeasible)
                    throw;
                out[m] = mrt_digital(H, eff.gram[m], power);
                all_zf = false;
            }
        }
        if (used_zf != nullptr)
            *used_zf = all_zf;
        return out;
    }

    ScaResult sca_digital(const EffectiveChannels &eff, double power, double noise, const ScaOptions &opts)
    {
        require(eff.cell_count() >= 1 && eff.total_users() >= 1, "SCA needs at least one cell and user");
        require(power > 0.0 && std::isfinite(power), "power budget must be positive");
        require(noise > 0.0, "noise power must be positive");
        require(opts.max_iters >= 0 && opts.tol >= 0.0, "invalid SCA options");

        const FlatIndex idx(eff.users_per_cell());
        const ScaProblem sp = build_problem(eff, power, noise, opts.mask);
        const int U = idx.size();

        ScaResult res;
        std::vector<CMatrix> start;
        if (opts.warm_start && opts.warm_start->size() == static_cast<std::size_t>(eff.cell_count()))
        {
            start = *opts.warm_start;
            check_digital(eff.users_per_cell(), start);
            enforce_budget(start, eff.gram, power);
            res.warm_started = true;
        }
        else
        {
            start = initial_digital(eff, power);
        }
        const std::vector<CMatrix> start_digital = start;

        CMatrixList W = covariances_from_digital(start, idx);
        double rate = rate_of_covariances(sp, W);
        res.trajectory.push_back(rate);

        for (int it = 1; it <= opts.max_iters; ++it)
        {
            RelaxedSubproblem p = sp.base;
            p.linear.assign(U, CMatrix());
            for (int b = 0; b < U; ++b)
                p.linear[b] = CMatrix::Zero(p.block_dims[b], p.block_dims[b]);
            double d1 = 0.0;
            double lin_at_point = 0.0;
            for (int u = 0; u < U; ++u)
            {
                const double a = noise + term_sum(sp.base, sp.interference[u], W);
                d1 += std::log2(a);
                for (const auto &t : sp.interference[u])
                    p.linear[t.block] += sp.base.matrices[t.matrix] / (a * std::numbers::ln2);
            }
            for (int b = 0; b < U; ++b)
                lin_at_point += (p.linear[b] * W[b]).trace().real();

            SolverResult sol;
            try
            {
                sol = solve_relaxed_subproblem(p, opts.solver);
            }
            catch (const Error &e)
            {
                std::ostringstream os;
                os << "SCA iteration " << it << ": " << e.what();
                throw ScaFailure(os.str(), W);
            }
            // Upper bound on -sum-rate: N1(W) + D1(W^t) + <L, W - W^t>.
            const double surrogate = sol.objective + d1 - lin_at_point;
            const double next_rate = rate_of_covariances(sp, sol.W);
            res.trace.push_back({it, surrogate, next_rate, sol.kkt_residual()});
            res.iterations = it;
            const double change = next_rate - rate;
            if (next_rate >= rate)
            {
                W = sol.W;
                rate = next_rate;
            }
            res.trajectory.push_back(rate);
            if (std::abs(change) < opts.tol)
            {
                res.converged = true;
                break;
            }
        }
        res.covariances = W;

        // Rank-one extraction, block by block, scoring candidates by network sum-rate.
        std::vector<CMatrix> digital(eff.cell_count());
        for (int m = 0; m < eff.cell_count(); ++m)
            digital[m] = CMatrix::Zero(eff.users_in_cell(m), eff.users_in_cell(m));
        for (int u = 0; u < U; ++u)
        {
            const CMatrix Wh = 0.5 * (W[u] + W[u].adjoint());
            Eigen::SelfAdjointEigenSolver<CMatrix> es(Wh);
            const int K = static_cast<int>(Wh.rows());
            digital[idx.cell[u]].col(idx.user[u]) = std::sqrt(std::max(es.eigenvalues()(K - 1), 0.0)) *
                                                    es.eigenvectors().col(K - 1);
        }
        std::mt19937_64 rng(opts.seed);
        for (int u = 0; u < U; ++u)
        {
            const int m = idx.cell[u];
            const int k = idx.user[u];
            auto score = [&](const CVector &v) {
                std::vector<CMatrix> trial = digital;
                trial[m].col(k) = v;
                CMatrixList Wt = covariances_from_digital(trial, idx);
                // Blocks not yet extracted keep their relaxed covariance.
                for (int b = u + 1; b < U; ++b)
                    Wt[b] = W[b];
                return rate_of_covariances(sp, Wt);
            };
            const RankOneResult r1 = extract_rank_one(W[u], eff.gram[m], score, rng, opts.randomization_samples);
            digital[m].col(k) = r1.vector;
            res.randomized = res.randomized || r1.randomized;
        }
        enforce_budget(digital, eff.gram, power);

        const double extracted = rate_of_covariances(sp, covariances_from_digital(digital, idx));
        const double initial = rate_of_covariances(sp, covariances_from_digital(start_digital, idx));
        if (initial > extracted)
        {
            digital = start_digital;
            res.init_kept = true;
            log::debug("SCA: extracted beamformer (", extracted, ") below the start (", initial, "), keeping start");
        }
        res.digital = digital;
        res.report = compute_rates(eff, digital, noise, power);
        return res;
    }
}
