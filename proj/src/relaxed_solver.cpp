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

#include "ramix/relaxed_solver.hpp"
#include "ramix/error.hpp"
#include "ramix/log.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace ramix
{
    using Eigen::MatrixXcd;
    using Eigen::MatrixXd;
    using Eigen::VectorXd;

    HermitianLayout::HermitianLayout(std::vector<int> dims) : dims_(std::move(dims))
    {
        offsets_.resize(dims_.size());
        for (std::size_t b = 0; b < dims_.size(); ++b)
        {
            offsets_[b] = size_;
            size_ += dims_[b] * dims_[b];
        }
    }

    void HermitianLayout::pack(int b, const MatrixXcd &X, VectorXd &x) const
    {
        const int K = dims_[b];
        int p = offsets_[b];
        for (int i = 0; i < K; ++i)
            x(p++) = X(i, i).real();
        for (int i = 0; i < K; ++i)
        {
            for (int j = i + 1; j < K; ++j)
            {
                x(p++) = X(i, j).real();
                x(p++) = X(i, j).imag();
            }
        }
    }

    MatrixXcd HermitianLayout::unpack(int b, const VectorXd &x) const
    {
        const int K = dims_[b];
        int p = offsets_[b];
        MatrixXcd X(K, K);
        for (int i = 0; i < K; ++i)
            X(i, i) = x(p++);
        for (int i = 0; i < K; ++i)
        {
            for (int j = i + 1; j < K; ++j)
            {
                const std::complex<double> v(x(p), x(p + 1));
                p += 2;
                X(i, j) = v;
                X(j, i) = std::conj(v);
            }
        }
        return X;
    }

    void HermitianLayout::add_trace_coefficients(int b, const MatrixXcd &H, double scale, VectorXd &c) const
    {
        const int K = dims_[b];
        int p = offsets_[b];
        for (int i = 0; i < K; ++i)
            c(p++) += scale * H(i, i).real();
        for (int i = 0; i < K; ++i)
        {
            for (int j = i + 1; j < K; ++j)
            {
                c(p++) += scale * 2.0 * H(i, j).real();
                c(p++) += scale * 2.0 * H(i, j).imag();
            }
        }
    }

    void RelaxedSubproblem::validate() const
    {
        require(!block_dims.empty(), "relaxed subproblem has no blocks");
        require(block_cell.size() == block_dims.size(), "block_cell must match block_dims");
        require(power > 0.0 && std::isfinite(power), "power budget must be positive");
        require(linear.empty() || linear.size() == block_dims.size(), "one linear term per block");
        for (std::size_t b = 0; b < block_dims.size(); ++b)
        {
            require(block_cell[b] >= 0 && block_cell[b] < cell_count(), "block cell index out of range");
            const auto &G = cell_gram[block_cell[b]];
            require(G.rows() == block_dims[b] && G.cols() == block_dims[b], "cell Gram size mismatch");
            if (!linear.empty())
            {
                require(linear[b].rows() == block_dims[b], "linear term size mismatch");
                require(linear[b].allFinite(), "linear term must be finite");
            }
        }
        for (const auto &u : users)
        {
            require(u.noise > 0.0, "user noise must be positive");
            for (const auto &t : u.terms)
            {
                require(t.block >= 0 && t.block < static_cast<int>(block_dims.size()), "term block out of range");
                require(t.matrix >= 0 && t.matrix < static_cast<int>(matrices.size()), "term matrix out of range");
                require(matrices[t.matrix].rows() == block_dims[t.block], "term matrix size mismatch");
            }
        }
    }

    double relaxed_objective(const RelaxedSubproblem &p, const CMatrixList &W)
    {
        double f = 0.0;
        for (const auto &u : p.users)
        {
            double t = u.noise;
            for (const auto &term : u.terms)
                t += (p.matrices[term.matrix] * W[term.block]).trace().real();
            f -= std::log2(t);
        }
        if (!p.linear.empty())
        {
            for (std::size_t b = 0; b < W.size(); ++b)
                f += (p.linear[b] * W[b]).trace().real();
        }
        return f;
    }

    std::vector<double> relaxed_cell_power(const RelaxedSubproblem &p, const CMatrixList &W)
    {
        std::vector<double> out(p.cell_count(), 0.0);
        for (std::size_t b = 0; b < W.size(); ++b)
            out[p.block_cell[b]] += (p.cell_gram[p.block_cell[b]] * W[b]).trace().real();
        return out;
    }

    namespace
    {
        // Problem data in normalised coordinates W_b = scale * Y_b, noise factored out.
        struct Normalised
        {
            HermitianLayout layout;
            double scale = 1.0;
            MatrixXd users;   // rows c'_u: t_u / noise_u = 1 + c'_u . y
            VectorXd log_noise;
            MatrixXd budget;  // rows q'_m: sum_b Tr(G_m Y_b) * scale / P <= 1
            VectorXd linear;  // bits per unit y
            int degree = 0;   // barrier parameter
            // The same data as scaled matrices, for derivatives in congruence-scaled coordinates.
            std::vector<std::vector<std::pair<int, MatrixXcd>>> user_terms;
            std::vector<std::vector<std::pair<int, MatrixXcd>>> budget_terms;
            std::vector<MatrixXcd> linear_terms;
        };

        Normalised normalise(const RelaxedSubproblem &p)
        {
            Normalised z;
            z.layout = HermitianLayout(p.block_dims);
            const int n = z.layout.size();
            double gmax = 0.0;
            for (const auto &G : p.cell_gram)
                gmax = std::max(gmax, G.diagonal().real().maxCoeff());
            require(gmax > 0.0, "cell Gram matrices must have a positive diagonal");
            z.scale = p.power / gmax;

            z.users = MatrixXd::Zero(static_cast<int>(p.users.size()), n);
            z.log_noise.resize(static_cast<int>(p.users.size()));
            z.user_terms.resize(p.users.size());
            for (std::size_t u = 0; u < p.users.size(); ++u)
            {
                VectorXd row = VectorXd::Zero(n);
                for (const auto &t : p.users[u].terms)
                {
                    z.layout.add_trace_coefficients(t.block, p.matrices[t.matrix], z.scale / p.users[u].noise, row);
                    z.user_terms[u].emplace_back(t.block, p.matrices[t.matrix] * (z.scale / p.users[u].noise));
                }
                z.users.row(static_cast<int>(u)) = row.transpose();
                z.log_noise(static_cast<int>(u)) = std::log2(p.users[u].noise);
            }

            z.budget = MatrixXd::Zero(p.cell_count(), n);
            z.budget_terms.resize(p.cell_count());
            for (int b = 0; b < z.layout.blocks(); ++b)
            {
                VectorXd row = VectorXd::Zero(n);
                const MatrixXcd G = p.cell_gram[p.block_cell[b]] * (z.scale / p.power);
                z.layout.add_trace_coefficients(b, G, 1.0, row);
                z.budget.row(p.block_cell[b]) += row.transpose();
                z.budget_terms[p.block_cell[b]].emplace_back(b, G);
            }

            z.linear = VectorXd::Zero(n);
            z.linear_terms.resize(z.layout.blocks());
            for (int b = 0; b < z.layout.blocks(); ++b)
            {
                const int K = z.layout.dim(b);
                z.linear_terms[b] = p.linear.empty() ? MatrixXcd::Zero(K, K) : MatrixXcd(p.linear[b] * z.scale);
                z.layout.add_trace_coefficients(b, z.linear_terms[b], 1.0, z.linear);
            }
            for (int d : p.block_dims)
                z.degree += d;
            z.degree += p.cell_count();
            return z;
        }

        constexpr double kInf = std::numeric_limits<double>::infinity();

        // f in nats: -sum log(1 + c'_u y) + ln2 * linear . y
        double objective_nats(const Normalised &z, const VectorXd &y)
        {
            const VectorXd t = (z.users * y).array() + 1.0;
            if ((t.array() <= 0.0).any())
                return kInf;
            return -t.array().log().sum() + std::numbers::ln2 * z.linear.dot(y);
        }

        double barrier_value(const Normalised &z, const VectorXd &y, double tau)
        {
            const double f = objective_nats(z, y);
            if (!std::isfinite(f))
                return kInf;
            double value = tau * f;
            const VectorXd slack = 1.0 - (z.budget * y).array();
            if ((slack.array() <= 0.0).any())
                return kInf;
            value -= slack.array().log().sum();
            for (int b = 0; b < z.layout.blocks(); ++b)
            {
                // Same test as the Newton step, so accepted iterates always admit a square root.
                const Eigen::SelfAdjointEigenSolver<MatrixXcd> es(z.layout.unpack(b, y), Eigen::EigenvaluesOnly);
                if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
                    return kInf;
                value -= es.eigenvalues().array().log().sum();
            }
            return value;
        }

        // Gradient of F in the original coordinates.
        VectorXd barrier_gradient(const Normalised &z, const VectorXd &y, double tau)
        {
            const VectorXd t = (z.users * y).array() + 1.0;
            VectorXd grad = tau * std::numbers::ln2 * z.linear;
            for (int u = 0; u < z.users.rows(); ++u)
                grad -= (tau / t(u)) * z.users.row(u).transpose();
            const VectorXd slack = 1.0 - (z.budget * y).array();
            for (int m = 0; m < z.budget.rows(); ++m)
                grad += z.budget.row(m).transpose() / slack(m);
            for (int b = 0; b < z.layout.blocks(); ++b)
                z.layout.add_trace_coefficients(b, z.layout.unpack(b, y).inverse(), -1.0, grad);
            return grad;
        }

        // Newton direction in the coordinates Y_b = S_b Yt_b S_b with S_b = Y_b^{1/2}, where
        // the log-det Hessian is diagonal (1 on diagonal slots, 2 elsewhere). The remaining
        // curvature is a sum of rank-one terms, one per user and per cell budget, so the
        // system is solved through the Woodbury identity. Returns the direction in original
        // coordinates and the squared Newton decrement.
        struct KktEstimate
        {
            double stationarity = 0.0; // nats
            double gap = 0.0;          // nats
        };

        double newton_direction(const Normalised &z, const VectorXd &y, double tau, VectorXd &step,
                                KktEstimate *kkt = nullptr)
        {
            const int n = z.layout.size();
            const int B = z.layout.blocks();
            const int U = static_cast<int>(z.user_terms.size());
            const int M = static_cast<int>(z.budget_terms.size());
            std::vector<MatrixXcd> root(B);
            for (int b = 0; b < B; ++b)
            {
                Eigen::SelfAdjointEigenSolver<MatrixXcd> es(z.layout.unpack(b, y));
                if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
                    fail(ErrorCode::Solver, "relaxed subproblem: iterate left the PSD cone");
                root[b] = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
            }
            auto congruence = [&](int b, const MatrixXcd &H, VectorXd &c) {
                z.layout.add_trace_coefficients(b, root[b] * H * root[b], 1.0, c);
            };

            // Rows of A: users first, then budgets; weights w.
            MatrixXd A = MatrixXd::Zero(U + M, n);
            VectorXd w(U + M);
            VectorXd grad = VectorXd::Zero(n);
            VectorXd row(n);
            const VectorXd t = (z.users * y).array() + 1.0;
            for (int u = 0; u < U; ++u)
            {
                row.setZero();
                for (const auto &[b, H] : z.user_terms[u])
                    congruence(b, H, row);
                A.row(u) = row.transpose();
                w(u) = tau / (t(u) * t(u));
                grad -= (tau / t(u)) * row;
            }
            row.setZero();
            for (int b = 0; b < B; ++b)
                congruence(b, z.linear_terms[b], row);
            grad += tau * std::numbers::ln2 * row;

            const VectorXd slack = 1.0 - (z.budget * y).array();
            for (int m = 0; m < M; ++m)
            {
                row.setZero();
                for (const auto &[b, G] : z.budget_terms[m])
                    congruence(b, G, row);
                A.row(U + m) = row.transpose();
                w(U + m) = 1.0 / (slack(m) * slack(m));
                grad += row / slack(m);
            }

            // -log det(S Yt S) around Yt = I: gradient -c(I), Hessian diag(1, 2).
            VectorXd D(n);
            for (int b = 0; b < B; ++b)
            {
                const int K = z.layout.dim(b);
                const int off = z.layout.offset(b);
                for (int i = 0; i < K * K; ++i)
                {
                    const bool diag = i < K;
                    if (diag)
                        grad(off + i) -= 1.0;
                    D(off + i) = diag ? 1.0 : 2.0;
                }
            }

            // (D + A^T W A)^{-1} g = D^{-1} g - D^{-1} A^T (W^{-1} + A D^{-1} A^T)^{-1} A D^{-1} g
            const VectorXd Dinv = D.cwiseInverse();
            MatrixXd C = A * Dinv.asDiagonal() * A.transpose();
            C.diagonal() += w.cwiseInverse();
            const VectorXd scaling = C.diagonal().cwiseSqrt().cwiseInverse();
            const MatrixXd balanced = scaling.asDiagonal() * C * scaling.asDiagonal();
            const VectorXd Dg = Dinv.cwiseProduct(grad);
            const VectorXd rhs = scaling.cwiseProduct(A * Dg);
            VectorXd small;
            Eigen::LLT<MatrixXd> llt(balanced);
            if (llt.info() == Eigen::Success)
                small = llt.solve(rhs);
            else
                small = balanced.ldlt().solve(rhs);
            // v = C^{-1} A D^{-1} g equals -W A d, the curvature-weighted constraint products.
            const VectorXd v = scaling.cwiseProduct(small);
            const VectorXd scaled_step = -(Dg - Dinv.cwiseProduct(A.transpose() * v));
            if (!scaled_step.allFinite())
                fail(ErrorCode::Solver, "relaxed subproblem: Newton system could not be solved");
            const double decrement2 = -grad.dot(scaled_step);

            if (kkt != nullptr)
            {
                // Duals from the linearised barrier at the Newton point:
                //   Z_b = (I - dY_b) / tau,  nu_m = (1 + q_m . d / s_m) / (tau s_m) = (1 - v_m s_m) / (tau s_m).
                // The Lagrangian gradient is then the Newton residual less the objective
                // curvature along the step, -sum_u v_u a_u / tau.
                const VectorXd newton_residual = grad + D.cwiseProduct(scaled_step) - A.transpose() * v;
                VectorXd residual = newton_residual / tau;
                for (int u = 0; u < U; ++u)
                    residual += (v(u) / tau) * A.row(u).transpose();
                double gap = 0.0;
                double infeasibility = 0.0;
                for (int m = 0; m < M; ++m)
                {
                    const double nu_s = 1.0 - v(U + m) * slack(m);
                    gap += std::max(nu_s, 0.0);
                    infeasibility = std::max(infeasibility, -nu_s / slack(m));
                }
                for (int b = 0; b < B; ++b)
                {
                    const Eigen::SelfAdjointEigenSolver<MatrixXcd> es(z.layout.unpack(b, scaled_step),
                                                                      Eigen::EigenvaluesOnly);
                    const VectorXd zeig = 1.0 - es.eigenvalues().array();
                    gap += zeig.cwiseMax(0.0).sum();
                    infeasibility = std::max(infeasibility, -zeig.minCoeff());
                }
                kkt->stationarity = std::max(residual.cwiseAbs().maxCoeff(), infeasibility / tau);
                kkt->gap = gap / tau;
            }

            step.resize(n);
            for (int b = 0; b < B; ++b)
                z.layout.pack(b, root[b] * z.layout.unpack(b, scaled_step) * root[b], step);
            return decrement2;
        }
    }

    SolverResult solve_relaxed_subproblem(const RelaxedSubproblem &p, const SolverOptions &opts)
    {
        p.validate();
        const Normalised z = normalise(p);
        const int n = z.layout.size();

        // Strictly feasible start: scaled identities using half of every cell budget.
        VectorXd y = VectorXd::Zero(n);
        {
            std::vector<double> cell_trace(p.cell_count(), 0.0);
            for (int b = 0; b < z.layout.blocks(); ++b)
                cell_trace[p.block_cell[b]] += p.cell_gram[p.block_cell[b]].trace().real() * z.scale / p.power;
            for (int b = 0; b < z.layout.blocks(); ++b)
            {
                const double alpha = 0.5 / cell_trace[p.block_cell[b]];
                for (int i = 0; i < z.layout.dim(b); ++i)
                    y(z.layout.offset(b) + i) = alpha;
            }
        }

        SolverResult res;
        double tau = 1.0 / opts.mu0;
        VectorXd step;
        while (true)
        {
            ++res.outer_steps;
            double previous = std::numeric_limits<double>::infinity();
            int stalls = 0;
            double last_decrement = 0.0;
            // Centering by damped Newton.
            while (true)
            {
                if (res.newton_steps >= opts.max_newton_steps)
                {
                    std::ostringstream os;
                    os << "relaxed subproblem: Newton step cap " << opts.max_newton_steps
                       << " reached (barrier weight " << tau << ", gradient norm "
                       << barrier_gradient(z, y, tau).norm() << ")";
                    fail(ErrorCode::Solver, os.str());
                }
                const double decrement2 = newton_direction(z, y, tau, step);
                last_decrement = decrement2;
                ++res.newton_steps;
                if (!(decrement2 >= 0.0) || 0.5 * decrement2 <= opts.newton_tol)
                    break;
                // Once the decrement reaches the rounding floor of the Newton system it stops
                // contracting; treat three non-contracting small steps as centred.
                if (decrement2 < 1e-4 && decrement2 > 0.25 * previous)
                {
                    if (++stalls >= 3)
                        break;
                }
                previous = decrement2;

                // F is self-concordant: the damped step 1/(1 + lambda) decreases it and stays
                // feasible, and full steps converge quadratically once lambda < 1/4.
                const double lambda = std::sqrt(decrement2);
                const double current = barrier_value(z, y, tau);
                double alpha = lambda < 0.25 ? 1.0 : 1.0 / (1.0 + lambda);
                bool moved = false;
                while (alpha > 1e-16)
                {
                    const VectorXd trial = y + alpha * step;
                    const double value = barrier_value(z, trial, tau);
                    if (std::isfinite(value) && value < current && value <= current - 0.01 * alpha * decrement2)
                    {
                        y = trial;
                        moved = true;
                        break;
                    }
                    alpha *= 0.5;
                }
                if (!moved)
                {
                    // No measurable decrease left at this barrier weight.
                    log::debug("relaxed solve: no descent step at tau ", tau, ", lambda^2 ", decrement2);
                    break;
                }
            }
            log::debug("relaxed solve: tau ", tau, " centred after ", res.newton_steps, " steps, lambda^2 ", last_decrement);
            if (z.degree / tau < opts.gap_tol)
                break;
            tau *= opts.mu_factor;
        }

        // Lagrangian gradient with the barrier duals, in the congruence-scaled coordinates
        // (dimensionless, in nats).
        KktEstimate kkt;
        newton_direction(z, y, tau, step, &kkt);
        res.stationarity = kkt.stationarity / std::numbers::ln2;
        res.duality_gap = kkt.gap / std::numbers::ln2;
        res.W.resize(z.layout.blocks());
        for (int b = 0; b < z.layout.blocks(); ++b)
        {
            MatrixXcd Wb = z.scale * z.layout.unpack(b, y);
            res.W[b] = 0.5 * (Wb + Wb.adjoint());
        }
        res.objective = relaxed_objective(p, res.W);
        log::debug("relaxed solve: ", res.newton_steps, " Newton steps, ", res.outer_steps,
                   " outer, gap ", res.duality_gap, ", stationarity ", res.stationarity);
        return res;
    }
}
