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

#ifndef RAMIX_RELAXED_SOLVER_HPP
#define RAMIX_RELAXED_SOLVER_HPP

#include <Eigen/Dense>

#include <vector>

namespace ramix
{
    using CMatrixList = std::vector<Eigen::MatrixXcd>;

    // Real coordinates of a list of Hermitian blocks. Each K x K block takes K^2
    // slots: the diagonal, then (Re, Im) of every upper-triangular entry.
    class HermitianLayout
    {
    public:
        HermitianLayout() = default;
        explicit HermitianLayout(std::vector<int> dims);

        int blocks() const { return static_cast<int>(dims_.size()); }
        int dim(int b) const { return dims_.at(b); }
        int offset(int b) const { return offsets_.at(b); }
        int size() const { return size_; }

        // x(X): coordinates of a Hermitian matrix.
        void pack(int b, const Eigen::MatrixXcd &X, Eigen::VectorXd &x) const;
        Eigen::MatrixXcd unpack(int b, const Eigen::VectorXd &x) const;
        // c(H) with Tr(H X) = c(H) . x(X) for Hermitian H and X.
        void add_trace_coefficients(int b, const Eigen::MatrixXcd &H, double scale, Eigen::VectorXd &c) const;

    private:
        std::vector<int> dims_;
        std::vector<int> offsets_;
        int size_ = 0;
    };

    // Convex program over PSD blocks W_b (one per served user):
    //   minimise  -sum_u log2(noise_u + sum_{(b,H) in u} Tr(H W_b)) + sum_b Tr(L_b W_b)
    //   s.t.      W_b >= 0,  sum_{b in cell m} Tr(G_m W_b) <= power  for every cell m.
    struct RelaxedSubproblem
    {
        struct Term
        {
            int block = 0;
            int matrix = 0; // index into `matrices`
        };
        struct User
        {
            double noise = 1.0;
            std::vector<Term> terms;
        };

        std::vector<int> block_dims;
        std::vector<int> block_cell;
        std::vector<Eigen::MatrixXcd> cell_gram; // G_m = F_A^H F_A
        double power = 1.0;
        std::vector<Eigen::MatrixXcd> matrices;
        std::vector<User> users;
        std::vector<Eigen::MatrixXcd> linear; // L_b, Hermitian; may be empty (zero)

        int cell_count() const { return static_cast<int>(cell_gram.size()); }
        void validate() const;
    };

    double relaxed_objective(const RelaxedSubproblem &p, const CMatrixList &W);
    // Power used by each cell, sum_b Tr(G_m W_b).
    std::vector<double> relaxed_cell_power(const RelaxedSubproblem &p, const CMatrixList &W);

    struct SolverOptions
    {
        double mu0 = 1.0;         // initial barrier weight 1/t
        double mu_factor = 10.0;  // decrease per outer step
        double gap_tol = 1e-6;    // stop when (barrier degree) * mu < gap_tol
        double newton_tol = 1e-8;  // lambda^2 / 2 at which centering stops
        int max_newton_steps = 2000;
    };

    struct SolverResult
    {
        CMatrixList W;
        double objective = 0.0;        // bits
        double duality_gap = 0.0;      // bound on objective - optimum, in bits
        double stationarity = 0.0;     // inf-norm of the Lagrangian gradient, normalised units
        int newton_steps = 0;
        int outer_steps = 0;

        double kkt_residual() const { return std::max(duality_gap, stationarity); }
    };

    // Log-barrier Newton method in the real embedding of the Hermitian blocks.
    // Throws ErrorCode::Solver with a residual report when it fails to converge.
    SolverResult solve_relaxed_subproblem(const RelaxedSubproblem &p, const SolverOptions &opts = {});
}

#endif
