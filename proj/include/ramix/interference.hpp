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

#ifndef RAMIX_INTERFERENCE_HPP
#define RAMIX_INTERFERENCE_HPP

#include "ramix/scenario.hpp"

#include <vector>

namespace ramix
{
    struct GammaPair
    {
        double gamma1 = 0.0; // angular mismatch term
        double gamma2 = 0.0; // aperture/range term, > 0
    };

    // |a^H(psi, phi) b(theta, r, phi)| by direct N-term summation.
    double rho_exact(double psi, double theta, double r, double phi, const SystemConfig &cfg);

    // Fresnel-domain parameters of the cross-correlation. The array spacing enters
    // through 2 d^2 / lambda, which equals d at half-wavelength spacing.
    // Throws ErrorCode::Degenerate geometry when sin(phi - theta) == 0.
    GammaPair gamma_params(double psi, double theta, double r, double phi, const SystemConfig &cfg);

    // G = |C^(g1, g2) + j S^(g1, g2)| / (2 g2); ErrorCode::Domain for g2 <= 0.
    double g_function(const GammaPair &g);

    double rho_approx(double psi, double theta, double r, double phi, const SystemConfig &cfg);

    enum class RhoModel
    {
        Exact,
        Approx,
    };

    // rho under the requested model; Approx falls back to Exact where the
    // quadratic phase vanishes.
    double rho(RhoModel model, double psi, double theta, double r, double phi, const SystemConfig &cfg);

    std::vector<double> uniform_grid(double lo, double hi, int points);

    struct RotationSearch
    {
        double phi = 0.0;
        double rho = 0.0;
    };

    // Exhaustive 1-D search over a uniform grid; lowest index wins ties.
    RotationSearch rotation_grid_search(double psi, double theta, double r, double phi_min, double phi_max,
                                        const SystemConfig &cfg, int grid_points,
                                        RhoModel model = RhoModel::Approx);

    enum class RotationCase
    {
        Boresight,     // psi == theta == pi/2
        AlignedOffset, // psi == theta != pi/2
        Misaligned,    // psi != theta
    };

    RotationCase classify_rotation_case(double psi, double theta, double tol = 1e-12);

    // Rotation in [phi_min, phi_max] maximising sin^2(phi - theta).
    double max_quadratic_phase_rotation(double theta, double phi_min, double phi_max);

    // Closed forms for the two aligned cases, grid argmin of rho_approx otherwise.
    double optimal_rotation(double psi, double theta, double r, double phi_min, double phi_max,
                            const SystemConfig &cfg, int grid_points = 181);

    // ---- two-cell, one user per cell -----------------------------------

    struct TwoCellCase
    {
        SystemConfig config;
        double theta11 = 0.4 * kPi;
        double r11 = 1.0;
        double theta21 = 0.4 * kPi;
        double r21 = 1.0;
        double psi21 = 0.4 * kPi; // angle of U11 seen from BS2
        double psi12 = 0.4 * kPi; // angle of U21 seen from BS1
        double dist21 = 1.0;      // distance U11 - BS2
        double dist12 = 1.0;      // distance U21 - BS1
        double phi1 = 0.0;
        double phi2 = 0.0;
        double power = 1.0;    // P, W
        double noise11 = 1e-11; // W
        double noise21 = 1e-11; // W
    };

    // Geometry from the canonical pair of BSs p1 = [0, 0], p2 = [0, 2 R_Ray].
    TwoCellCase make_two_cell_case(const SystemConfig &cfg, double theta11, double r11, double theta21,
                                   double r21, double phi1 = 0.0, double phi2 = 0.0);

    struct TwoCellRates
    {
        double rate_u11 = 0.0;
        double rate_u21 = 0.0;
        double sum = 0.0;
    };

    // rho21 = rho(psi21, theta21, r21, phi2) couples BS2 into U11, rho12 the reverse.
    TwoCellRates two_cell_rates_with_rho(const TwoCellCase &c, double p11, double p21, double rho21,
                                         double rho12);
    TwoCellRates two_cell_sum_rate(const TwoCellCase &c, double p11, double p21,
                                   RhoModel model = RhoModel::Exact);

    struct PowerSearch
    {
        double p11 = 0.0;
        double p21 = 0.0;
        TwoCellRates rates;
    };

    PowerSearch power_grid_search(const TwoCellCase &c, int grid = 101, RhoModel model = RhoModel::Exact);
    // Variant for callers that fix the cross-correlations (e.g. zero).
    PowerSearch power_grid_search_with_rho(const TwoCellCase &c, int grid, double rho21, double rho12);

    double interference_free_bound(const TwoCellCase &c, double p11, double p21);
}

#endif
