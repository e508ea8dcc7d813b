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

#ifndef RAMIX_SCENARIO_HPP
#define RAMIX_SCENARIO_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace ramix
{
    using cdouble = std::complex<double>;
    using CVector = Eigen::VectorXcd;
    using CMatrix = Eigen::MatrixXcd;
    using RotationVector = std::vector<double>;

    inline constexpr double kSpeedOfLight = 299792458.0; // m/s
    inline constexpr double kPi = std::numbers::pi;

    double dbm_to_watt(double dbm);
    double watt_to_dbm(double watt);
    double deg_to_rad(double deg);

    // Global physical parameters. Powers are in watts; dBm only appears at ingestion.
    struct SystemConfig
    {
        double carrier_frequency = 28e9; // Hz
        int antenna_count = 129;         // N = 2*Ntilde + 1
        double element_spacing = 0.0;    // m, <= 0 selects lambda/2
        int cell_count = 2;
        int users_per_cell = 3;
        double power_budget = 1.0;    // W, per BS
        double noise_power = 1e-11;   // W, per user
        int nlos_path_count = 3;
        double rayleigh_coefficient = 0.367;
        std::uint64_t rng_seed = 1;

        double wavelength() const { return kSpeedOfLight / carrier_frequency; }
        double spacing() const { return element_spacing > 0.0 ? element_spacing : 0.5 * wavelength(); }
        int half_count() const { return (antenna_count - 1) / 2; }
        // Physical span between the two end elements.
        double aperture() const { return (antenna_count - 1) * spacing(); }
        double rayleigh_distance(double theta = kPi / 2) const;

        void validate() const;
    };

    struct Vec2
    {
        double x = 0.0;
        double y = 0.0;
    };

    struct BaseStation
    {
        int index = 0;
        Vec2 position;
        // +1: local y axis along global +y, -1: mirrored. Users of the cell sit at
        // position + (r cos(theta), facing * r sin(theta)).
        int facing = 1;
        double rotation_min = -kPi / 6;
        double rotation_max = kPi / 6;

        bool admissible(double phi) const { return phi >= rotation_min && phi <= rotation_max; }
        double clamp(double phi) const;
    };

    struct Scatterer
    {
        double angle = kPi / 2; // intra-cell angle w.r.t. the serving array
        double range = 1.0;     // m
        // Unit-variance circularly-symmetric Gaussian draw per transmitting BS,
        // scaled by the path-loss model when the channel is built.
        std::vector<cdouble> fading;
    };

    struct UserPlacement
    {
        int cell = 0;
        int index = 0;
        double angle = kPi / 2; // theta in (0, pi)
        double range = 1.0;     // m
        std::vector<Scatterer> scatterers;
    };

    // One concrete drop: configuration, BS geometry and user placements.
    struct Scenario
    {
        SystemConfig config;
        std::vector<BaseStation> stations;
        std::vector<std::vector<UserPlacement>> users; // [cell][user]

        int cell_count() const { return static_cast<int>(stations.size()); }
        int users_in_cell(int m) const { return static_cast<int>(users.at(m).size()); }
        int total_users() const;
        Vec2 user_position(int m, int k) const;
        Vec2 local_to_global(int m, double angle, double range) const;
        RotationVector zero_rotations() const;
        void validate() const;
    };

    // BSs on the y axis at spacing 2*R_Ray, alternating facing so that
    // neighbouring cells look at each other.
    std::vector<BaseStation> canonical_stations(const SystemConfig &cfg, double limit_lo = -kPi / 6,
                                                double limit_hi = kPi / 6);

    // ---- geometry -------------------------------------------------------

    double effective_rayleigh_distance(double theta, double aperture, double wavelength, double upsilon);

    double element_distance(double r, double theta, double phi, int n, double d);
    double element_distance_taylor(double r, double theta, double phi, int n, double d);

    // b(theta, r, phi): the Hermitian b^H has entries exp(-j k (r_n - r)) / sqrt(N)
    // for n = -Ntilde..Ntilde with the second-order distance r_n.
    CVector near_steering(double theta, double r, double phi, const SystemConfig &cfg);

    // a(psi, phi): entry n = -Ntilde..Ntilde is exp(-j k n d cos(psi - phi)) / sqrt(N),
    // so a^H b reproduces the unified cross-correlation sum.
    CVector far_steering(double psi, double phi, const SystemConfig &cfg);

    // Two-branch arctangent in BS-local coordinates; result in (-pi/2, 3pi/2].
    double inter_cell_angle(const Vec2 &user, const BaseStation &bs);
    double inter_cell_distance(const Vec2 &user, const BaseStation &bs);

    // Free-space LoS gain (lambda / (4 pi r)) exp(-j 2 pi r / lambda).
    cdouble los_gain(double distance, double wavelength);
    // Standard deviation of an NLoS gain: free-space magnitude less 13 dB.
    double nlos_gain_scale(double distance, double wavelength);

    // ---- channels -------------------------------------------------------

    enum class Regime
    {
        NearField,
        FarField
    };

    struct ChannelVector
    {
        CVector coefficients; // h (column); received amplitude is h^H x
        Regime regime = Regime::NearField;
        int source = 0; // BS i
        int cell = 0;   // user (m, k)
        int user = 0;
        cdouble los_gain;
        std::vector<cdouble> nlos_gains;
    };

    class ChannelSet
    {
    public:
        ChannelSet() = default;
        ChannelSet(int antennas, std::vector<int> users_per_cell);

        int cell_count() const { return static_cast<int>(users_per_cell_.size()); }
        int users_in_cell(int m) const { return users_per_cell_.at(m); }
        int antenna_count() const { return antennas_; }
        const std::vector<int> &users_per_cell() const { return users_per_cell_; }

        // Channel from BS i to user k of cell m.
        const ChannelVector &at(int i, int m, int k) const { return entries_.at(slot(i, m, k)); }
        ChannelVector &at(int i, int m, int k) { return entries_.at(slot(i, m, k)); }

    private:
        std::size_t slot(int i, int m, int k) const;

        int antennas_ = 0;
        std::vector<int> users_per_cell_;
        std::vector<std::size_t> cell_offset_;
        std::size_t users_total_ = 0;
        std::vector<ChannelVector> entries_;
    };

    // Pure function of (scenario, rotations): every random quantity lives in the scenario.
    ChannelSet build_channels(const Scenario &scenario, const RotationVector &rotations);
}

#endif
