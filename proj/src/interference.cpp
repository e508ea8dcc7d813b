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

#include "ramix/interference.hpp"
#include "ramix/error.hpp"
#include "ramix/fresnel.hpp"
#include "ramix/log.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ramix
{
    double rho_exact(double psi, double theta, double r, double phi, const SystemConfig &cfg)
    {
        require(r > 0.0, "range must be positive");
        const int half = cfg.half_count();
        const double k = 2.0 * kPi / cfg.wavelength();
        const double d = cfg.spacing();
        const double s = std::sin(phi - theta);
        const double quad = d * d * s * s / (2.0 * r);
        const double lin = d * std::cos(psi - phi) - d * std::cos(phi - theta);
        cdouble sum = 0.0;
        for (int n = -half; n <= half; ++n)
            sum += std::polar(1.0, k * (n * n * quad + n * lin));
        return std::min(1.0, std::abs(sum) / cfg.antenna_count);
    }

    GammaPair gamma_params(double psi, double theta, double r, double phi, const SystemConfig &cfg)
    {
        require(r > 0.0, "range must be positive");
        const double s = std::sin(phi - theta);
        const double s2 = s * s;
        if (s2 == 0.0 || !std::isnormal(s2))
            fail(ErrorCode::DegenerateGeometry, "degenerate: quadratic phase vanishes (sin(phi - theta) = 0)");
        const double d = cfg.spacing();
        const double d_eff = 2.0 * d * d / cfg.wavelength();
        GammaPair g;
        g.gamma1 = (std::cos(phi - theta) - std::cos(psi - phi)) * std::sqrt(r / (d_eff * s2));
        g.gamma2 = 0.5 * cfg.antenna_count * std::sqrt(d_eff * s2 / r);
        return g;
    }

    double g_function(const GammaPair &g)
    {
        if (!(g.gamma2 > 0.0))
            fail(ErrorCode::Domain, "G(gamma1, gamma2) requires gamma2 > 0");
        const FresnelPair hi = fresnel(g.gamma1 + g.gamma2);
        const FresnelPair lo = fresnel(g.gamma1 - g.gamma2);
        return std::hypot(hi.c - lo.c, hi.s - lo.s) / (2.0 * g.gamma2);
    }

    double rho_approx(double psi, double theta, double r, double phi, const SystemConfig &cfg)
    {
        return g_function(gamma_params(psi, theta, r, phi, cfg));
    }

    double rho(RhoModel model, double psi, double theta, double r, double phi, const SystemConfig &cfg)
    {
        if (model == RhoModel::Exact)
            return rho_exact(psi, theta, r, phi, cfg);
        try
        {
            return rho_approx(psi, theta, r, phi, cfg);
        }
        catch (const Error &e)
        {
            if (e.code() != ErrorCode::DegenerateGeometry)
                throw;
            return rho_exact(psi, theta, r, phi, cfg);
        }
    }

    std::vector<double> uniform_grid(double lo, double hi, int points)
    {
        require(points >= 1, "grid needs at least one point");
        std::vector<double> g(points);
        if (points == 1)
        {
            g[0] = lo;
            return g;
        }
        const double step = (hi - lo) / (points - 1);
        for (int i = 0; i < points; ++i)
            g[i] = lo + step * i;
        g.back() = hi;
        return g;
    }

    RotationSearch rotation_grid_search(double psi, double theta, double r, double phi_min, double phi_max,
                                        const SystemConfig &cfg, int grid_points, RhoModel model)
    {
        require(grid_points >= 2, "rotation grid needs at least two points");
        require(phi_min <= phi_max, "rotation limits must be ordered");
        RotationSearch best{phi_min, std::numeric_limits<double>::infinity()};
        for (double phi : uniform_grid(phi_min, phi_max, grid_points))
        {
            const double v = rho(model, psi, theta, r, phi, cfg);
            if (v < best.rho)
                best = {phi, v};
        }
        return best;
    }

    RotationCase classify_rotation_case(double psi, double theta, double tol)
    {
        if (std::abs(psi - theta) > tol)
            return RotationCase::Misaligned;
        if (std::abs(theta - kPi / 2) <= tol)
            return RotationCase::Boresight;
        return RotationCase::AlignedOffset;
    }

    double max_quadratic_phase_rotation(double theta, double phi_min, double phi_max)
    {
        auto score = [theta](double phi) {
            const double s = std::sin(phi - theta);
            return s * s;
        };
        std::vector<double> candidates{phi_min, phi_max};
        // Interior maxima at theta + pi/2 + k pi.
        const double base = theta + kPi / 2;
        const double kmin = std::ceil((phi_min - base) / kPi);
        for (double kk = kmin; base + kk * kPi <= phi_max; kk += 1.0)
            candidates.push_back(base + kk * kPi);
        double best = candidates.front();
        for (double c : candidates)
        {
            const double sc = score(c);
            const double sb = score(best);
            if (sc > sb + 1e-15 || (std::abs(sc - sb) <= 1e-15 && std::abs(c) < std::abs(best)))
                best = c;
        }
        return best;
    }

    double optimal_rotation(double psi, double theta, double r, double phi_min, double phi_max,
                            const SystemConfig &cfg, int grid_points)
    {
        require(grid_points >= 2, "rotation grid needs at least two points");
        require(phi_min <= phi_max, "rotation limits must be ordered");
        switch (classify_rotation_case(psi, theta))
        {
        case RotationCase::Boresight:
            return std::clamp(0.0, phi_min, phi_max);
        case RotationCase::AlignedOffset:
        {
            const double target = psi - kPi / 2;
            const double phi = psi > kPi / 2 ? std::min(target, phi_max) : std::max(target, phi_min);
            const double clamped = std::clamp(phi, phi_min, phi_max);
            const double check = max_quadratic_phase_rotation(theta, phi_min, phi_max);
            const double s_a = std::sin(clamped - theta);
            const double s_b = std::sin(check - theta);
            if (std::abs(s_a * s_a - s_b * s_b) > 1e-12)
                log::warn("closed-form rotation ", clamped, " differs from sin^2 maximiser ", check);
            return clamped;
        }
        case RotationCase::Misaligned:
            break;
        }
        return rotation_grid_search(psi, theta, r, phi_min, phi_max, cfg, grid_points, RhoModel::Approx).phi;
    }

    TwoCellCase make_two_cell_case(const SystemConfig &cfg, double theta11, double r11, double theta21,
                                   double r21, double phi1, double phi2)
    {
        SystemConfig two = cfg;
        two.cell_count = 2;
        two.users_per_cell = 1;
        Scenario sc;
        sc.config = two;
        sc.stations = canonical_stations(two);
        sc.users = {{UserPlacement{0, 0, theta11, r11, {}}}, {UserPlacement{1, 0, theta21, r21, {}}}};

        TwoCellCase c;
        c.config = two;
        c.theta11 = theta11;
        c.r11 = r11;
        c.theta21 = theta21;
        c.r21 = r21;
        const Vec2 u11 = sc.user_position(0, 0);
        const Vec2 u21 = sc.user_position(1, 0);
        c.psi21 = inter_cell_angle(u11, sc.stations[1]);
        c.dist21 = inter_cell_distance(u11, sc.stations[1]);
        c.psi12 = inter_cell_angle(u21, sc.stations[0]);
        c.dist12 = inter_cell_distance(u21, sc.stations[0]);
        c.phi1 = phi1;
        c.phi2 = phi2;
        c.power = two.power_budget;
        c.noise11 = two.noise_power;
        c.noise21 = two.noise_power;
        return c;
    }

    TwoCellRates two_cell_rates_with_rho(const TwoCellCase &c, double p11, double p21, double rho21,
                                         double rho12)
    {
        require(p11 >= 0.0 && p21 >= 0.0, "powers must be non-negative");
        const double lambda = c.config.wavelength();
        const double N = c.config.antenna_count;
        const double b11 = std::norm(los_gain(c.r11, lambda));
        const double b21 = std::norm(los_gain(c.r21, lambda));
        const double x21 = std::norm(los_gain(c.dist21, lambda)); // BS2 -> U11
        const double x12 = std::norm(los_gain(c.dist12, lambda)); // BS1 -> U21
        TwoCellRates out;
        out.rate_u11 = std::log2(1.0 + p11 * N * b11 / (p21 * N * x21 * rho21 * rho21 + c.noise11));
        out.rate_u21 = std::log2(1.0 + p21 * N * b21 / (p11 * N * x12 * rho12 * rho12 + c.noise21));
        out.sum = out.rate_u11 + out.rate_u21;
        return out;
    }

    namespace
    {
        struct RhoPair
        {
            double rho21;
            double rho12;
        };

        RhoPair cross_terms(const TwoCellCase &c, RhoModel model)
        {
            return {rho(model, c.psi21, c.theta21, c.r21, c.phi2, c.config),
                    rho(model, c.psi12, c.theta11, c.r11, c.phi1, c.config)};
        }
    }

    TwoCellRates two_cell_sum_rate(const TwoCellCase &c, double p11, double p21, RhoModel model)
    {
        const RhoPair x = cross_terms(c, model);
        return two_cell_rates_with_rho(c, p11, p21, x.rho21, x.rho12);
    }

    PowerSearch power_grid_search_with_rho(const TwoCellCase &c, int grid, double rho21, double rho12)
    {
        require(grid >= 2, "power grid needs at least two points per axis");
        const std::vector<double> levels = uniform_grid(0.0, c.power, grid);
        PowerSearch best;
        best.rates.sum = -1.0;
        for (double p11 : levels)
        {
            for (double p21 : levels)
            {
                const TwoCellRates r = two_cell_rates_with_rho(c, p11, p21, rho21, rho12);
                if (r.sum > best.rates.sum)
                    best = {p11, p21, r};
            }
        }
        return best;
    }

    PowerSearch power_grid_search(const TwoCellCase &c, int grid, RhoModel model)
    {
        const RhoPair x = cross_terms(c, model);
        return power_grid_search_with_rho(c, grid, x.rho21, x.rho12);
    }

    double interference_free_bound(const TwoCellCase &c, double p11, double p21)
    {
        return two_cell_rates_with_rho(c, p11, p21, 0.0, 0.0).sum;
    }
}
