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

#ifndef RAMIX_BEAMFORMING_HPP
#define RAMIX_BEAMFORMING_HPP

#include "ramix/error.hpp"
#include "ramix/relaxed_solver.hpp"
#include "ramix/scenario.hpp"

#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace ramix
{
    // Column k of cell m is sqrt(N) b(theta_mk, r_mk, phi_m): unit-modulus entries.
    std::vector<CMatrix> analog_mrt(const Scenario &scenario, const RotationVector &rotations);

    // hbar_{i,m,k} = F_{A,i}^H h_{i,m,k}, a K_i-vector, plus the per-cell Gram F_{A,i}^H F_{A,i}.
    class EffectiveChannels
    {
    public:
        EffectiveChannels() = default;
        explicit EffectiveChannels(std::vector<int> users_per_cell);

        int cell_count() const { return static_cast<int>(users_per_cell_.size()); }
        int users_in_cell(int m) const { return users_per_cell_.at(m); }
        int total_users() const;
        const std::vector<int> &users_per_cell() const { return users_per_cell_; }

        const CVector &at(int i, int m, int k) const { return entries_.at(slot(i, m, k)); }
        CVector &at(int i, int m, int k) { return entries_.at(slot(i, m, k)); }

        // K_m x K_m, column k = hbar_{m,m,k}.
        CMatrix serving_matrix(int m) const;

        std::vector<CMatrix> gram;

    private:
        std::size_t slot(int i, int m, int k) const;

        std::vector<int> users_per_cell_;
        std::vector<std::size_t> cell_offset_;
        std::size_t users_total_ = 0;
        std::vector<CVector> entries_;
    };

    EffectiveChannels effective_channels(const ChannelSet &channels, const std::vector<CMatrix> &analog);

    // Which interference classes enter the SINR denominator.
    struct InterferenceMask
    {
        bool intra = true;
        bool inter = true;
    };

    struct UserRate
    {
        double signal = 0.0;
        double intra = 0.0;
        double inter = 0.0;
        double noise = 0.0;
        double sinr = 0.0;
        double rate = 0.0; // bps/Hz
    };

    struct SumRateReport
    {
        std::vector<std::vector<UserRate>> users; // [cell][user]
        std::vector<double> cell_rate;
        std::vector<double> cell_power; // ||F_A F_D||_F^2
        double sum_rate = 0.0;
        bool power_violation = false; // some cell exceeded its budget by more than 1e-6
        bool zf_regularized = false;
    };

    // Rates from effective channels and per-cell digital beamformers (K_m x K_m).
    // power_budget <= 0 skips the budget check.
    SumRateReport compute_rates(const EffectiveChannels &eff, const std::vector<CMatrix> &digital, double noise,
                                double power_budget = 0.0, InterferenceMask mask = {});
    // Same quantity from raw channels and the hybrid product F_A F_D.
    SumRateReport compute_rates(const ChannelSet &channels, const std::vector<CMatrix> &analog,
                                const std::vector<CMatrix> &digital, double noise, double power_budget = 0.0,
                                InterferenceMask mask = {});

    struct ZfResult
    {
        CMatrix digital;
        double condition = 0.0;
        bool regularized = false;
    };

    // F_D = Hbar^{-H} with columns scaled to f_k^H G f_k = P/K. A condition number
    // of 1e10 or more either loads the diagonal (allow_loading) or throws Infeasible.
    ZfResult zf_digital(const CMatrix &serving, const CMatrix &gram, double power, bool allow_loading = true);
    // Columns along hbar_{m,m,k} with power P/K each.
    CMatrix mrt_digital(const CMatrix &serving, const CMatrix &gram, double power);

    struct RankOneResult
    {
        CVector vector;
        bool randomized = false;
        double eigen_ratio = 0.0;
    };

    // Principal component when lambda2/lambda1 <= 1e-6. Otherwise the best of the principal
    // direction and `samples` Gaussian draws, each rescaled to Tr(G W), under `score`.
    RankOneResult extract_rank_one(const CMatrix &W, const CMatrix &gram,
                                   const std::function<double(const CVector &)> &score, std::mt19937_64 &rng,
                                   int samples = 200);

    struct ScaOptions
    {
        int max_iters = 30;
        double tol = 1e-4;
        std::optional<std::vector<CMatrix>> warm_start; // digital beamformers
        InterferenceMask mask;
        SolverOptions solver;
        int randomization_samples = 200;
        std::uint64_t seed = 1;
    };

    struct ScaTraceRow
    {
        int iter = 0;
        double surrogate = 0.0;     // N1 - D1~ at the new iterate, bits
        double true_sum_rate = 0.0; // covariance sum-rate, bps/Hz
        double kkt_residual = 0.0;
    };

    struct ScaResult
    {
        CMatrixList covariances; // flat over (cell, user)
        std::vector<CMatrix> digital;
        std::vector<double> trajectory; // entry 0 is the starting point
        std::vector<ScaTraceRow> trace;
        SumRateReport report;
        int iterations = 0;
        bool converged = false;
        bool randomized = false;
        bool init_kept = false; // extraction lost to the rank-one start
        bool warm_started = false;
    };

    class ScaFailure : public Error
    {
    public:
        ScaFailure(const std::string &what, CMatrixList last) : Error(ErrorCode::Solver, what), last_(std::move(last)) {}
        const CMatrixList &last_iterate() const { return last_; }

    private:
        CMatrixList last_;
    };

    // Sum-rate of a covariance set (flat over (cell, user)).
    double covariance_sum_rate(const EffectiveChannels &eff, const CMatrixList &W, double noise,
                               InterferenceMask mask = {});

    ScaResult sca_digital(const EffectiveChannels &eff, double power, double noise, const ScaOptions &opts = {});

    // Starting digital beamformers: ZF scaled to the budget, MRT where ZF is singular.
    std::vector<CMatrix> initial_digital(const EffectiveChannels &eff, double power, bool *used_zf = nullptr);
}

#endif
