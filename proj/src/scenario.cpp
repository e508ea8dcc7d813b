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

#include "ramix/scenario.hpp"
#include "ramix/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ramix
{
    double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
    double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }
    double deg_to_rad(double deg) { return deg * kPi / 180.0; }

    double SystemConfig::rayleigh_distance(double theta) const
    {
        return effective_rayleigh_distance(theta, aperture(), wavelength(), rayleigh_coefficient);
    }

    void SystemConfig::validate() const
    {
        require(std::isfinite(carrier_frequency) && carrier_frequency > 0.0, "carrier frequency must be positive");
        require(antenna_count >= 3 && antenna_count % 2 == 1, "antenna count must be odd and >= 3");
        require(std::isfinite(spacing()) && spacing() > 0.0, "element spacing must be positive");
        require(cell_count >= 1, "cell count must be positive");
        require(users_per_cell >= 1, "users per cell must be positive");
        require(power_budget > 0.0, "power budget must be positive");
        require(noise_power > 0.0, "noise power must be positive");
        require(nlos_path_count >= 0, "NLoS path count must be non-negative");
        require(rayleigh_coefficient > 0.0 && rayleigh_coefficient <= 1.0, "Rayleigh coefficient must lie in (0, 1]");
    }

    double BaseStation::clamp(double phi) const { return std::max(std::min(phi, rotation_max), rotation_min); }

    int Scenario::total_users() const
    {
        int total = 0;
        for (const auto &cell : users)
            total += static_cast<int>(cell.size());
        return total;
    }

    Vec2 Scenario::local_to_global(int m, double angle, double range) const
    {
        const BaseStation &bs = stations.at(m);
        return {bs.position.x + range * std::cos(angle), bs.position.y + bs.facing * range * std::sin(angle)};
    }

    Vec2 Scenario::user_position(int m, int k) const
    {
        const UserPlacement &u = users.at(m).at(k);
        return local_to_global(m, u.angle, u.range);
    }

    RotationVector Scenario::zero_rotations() const
    {
        RotationVector phi(stations.size());
        for (std::size_t m = 0; m < stations.size(); ++m)
            phi[m] = stations[m].clamp(0.0);
        return phi;
    }

    void Scenario::validate() const
    {
        config.validate();
        require(!stations.empty(), "scenario has no base stations");
        require(users.size() == stations.size(), "user lists must match the number of cells");
        for (std::size_t m = 0; m < stations.size(); ++m)
        {
            const BaseStation &bs = stations[m];
            require(bs.facing == 1 || bs.facing == -1, "BS facing must be +1 or -1");
            require(bs.rotation_min <= bs.rotation_max, "rotation limits must be ordered");
            require(!users[m].empty(), "every cell needs at least one user");
            for (const UserPlacement &u : users[m])
            {
                require(u.range > 0.0 && std::isfinite(u.range), "user range must be positive");
                if (!(u.angle > 0.0 && u.angle < kPi))
                {
                    std::ostringstream os;
                    os << "user (" << m << "," << u.index << ") intra-cell angle " << u.angle << " outside (0, pi)";
                    fail(ErrorCode::InvalidArgument, os.str());
                }
                for (const Scatterer &s : u.scatterers)
                {
                    require(s.range > 0.0, "scatterer range must be positive");
                    require(s.fading.size() == stations.size(), "scatterer fading must have one draw per BS");
                }
            }
        }
    }

    std::vector<BaseStation> canonical_stations(const SystemConfig &cfg, double limit_lo, double limit_hi)
    {
        const double spacing = 2.0 * cfg.rayleigh_distance();
        std::vector<BaseStation> out(cfg.cell_count);
        for (int m = 0; m < cfg.cell_count; ++m)
        {
            out[m].index = m;
            out[m].position = {0.0, spacing * m};
            out[m].facing = (m % 2 == 0) ? 1 : -1;
            out[m].rotation_min = limit_lo;
            out[m].rotation_max = limit_hi;
        }
        return out;
    }

    double effective_rayleigh_distance(double theta, double aperture, double wavelength, double upsilon)
    {
        const double s = std::sin(theta);
        return upsilon * s * s * 2.0 * aperture * aperture / wavelength;
    }

    double element_distance(double r, double theta, double phi, int n, double d)
    {
        const double nd = n * d;
        return std::sqrt(r * r + nd * nd - 2.0 * r * nd * std::cos(phi - theta));
    }

    double element_distance_taylor(double r, double theta, double phi, int n, double d)
    {
        const double nd = n * d;
        const double s = std::sin(phi - theta);
        return r - nd * std::cos(phi - theta) + nd * nd * s * s / (2.0 * r);
    }

    CVector near_steering(double theta, double r, double phi, const SystemConfig &cfg)
    {
        const int N = cfg.antenna_count;
        const int half = cfg.half_count();
        const double k = 2.0 * kPi / cfg.wavelength();
        const double d = cfg.spacing();
        const double c = std::cos(phi - theta);
        const double s = std::sin(phi - theta);
        const double norm = 1.0 / std::sqrt(static_cast<double>(N));
        CVector b(N);
        for (int n = -half; n <= half; ++n)
        {
            const double nd = n * d;
            // r_n - r without forming r_n, so the phase keeps full precision at large r.
            const double excess = -nd * c + nd * nd * s * s / (2.0 * r);
            b(n + half) = std::polar(norm, k * excess);
        }
        return b;
    }

    CVector far_steering(double psi, double phi, const SystemConfig &cfg)
    {
        const int N = cfg.antenna_count;
        const int half = cfg.half_count();
        const double k = 2.0 * kPi / cfg.wavelength();
        const double d = cfg.spacing();
        const double c = std::cos(psi - phi);
        const double norm = 1.0 / std::sqrt(static_cast<double>(N));
        CVector a(N);
        for (int n = -half; n <= half; ++n)
            a(n + half) = std::polar(norm, -k * n * d * c);
        return a;
    }

    namespace
    {
        Vec2 local_offset(const Vec2 &p, const BaseStation &bs)
        {
            return {p.x - bs.position.x, bs.facing * (p.y - bs.position.y)};
        }
    }

    double inter_cell_angle(const Vec2 &user, const BaseStation &bs)
    {
        const Vec2 v = local_offset(user, bs);
        if (v.x == 0.0 && v.y == 0.0)
            fail(ErrorCode::DegenerateGeometry, "degenerate geometry: user co-located with BS");
        if (v.x == 0.0)
            return v.y > 0.0 ? kPi / 2 : 3.0 * kPi / 2;
        const double base = std::atan(v.y / v.x);
        return v.x > 0.0 ? base : base + kPi;
    }

    double inter_cell_distance(const Vec2 &user, const BaseStation &bs)
    {
        const Vec2 v = local_offset(user, bs);
        return std::hypot(v.x, v.y);
    }

    cdouble los_gain(double distance, double wavelength)
    {
        return std::polar(wavelength / (4.0 * kPi * distance), -2.0 * kPi * distance / wavelength);
    }

    double nlos_gain_scale(double distance, double wavelength)
    {
        return std::pow(10.0, -13.0 / 20.0) * wavelength / (4.0 * kPi * distance);
    }

    ChannelSet::ChannelSet(int antennas, std::vector<int> users_per_cell)
        : antennas_(antennas), users_per_cell_(std::move(users_per_cell))
    {
        cell_offset_.resize(users_per_cell_.size());
        for (std::size_t m = 0; m < users_per_cell_.size(); ++m)
        {
            cell_offset_[m] = users_total_;
            users_total_ += users_per_cell_[m];
        }
        entries_.resize(users_per_cell_.size() * users_total_);
    }

    std::size_t ChannelSet::slot(int i, int m, int k) const
    {
        return static_cast<std::size_t>(i) * users_total_ + cell_offset_.at(m) + static_cast<std::size_t>(k);
    }

    ChannelSet build_channels(const Scenario &scenario, const RotationVector &rotations)
    {
        scenario.validate();
        const SystemConfig &cfg = scenario.config;
        const int M = scenario.cell_count();
        require(static_cast<int>(rotations.size()) == M, "rotation vector length must equal the number of cells");
        for (int m = 0; m < M; ++m)
        {
            if (!scenario.stations[m].admissible(rotations[m]))
            {
                std::ostringstream os;
                os << "rotation " << rotations[m] << " of BS " << m << " outside ["
                   << scenario.stations[m].rotation_min << ", " << scenario.stations[m].rotation_max << "]";
                fail(ErrorCode::InvalidArgument, os.str());
            }
        }

        std::vector<int> counts(M);
        for (int m = 0; m < M; ++m)
            counts[m] = scenario.users_in_cell(m);
        ChannelSet set(cfg.antenna_count, counts);

        const double lambda = cfg.wavelength();
        const double sqrtN = std::sqrt(static_cast<double>(cfg.antenna_count));

        for (int i = 0; i < M; ++i)
        {
            const BaseStation &bs = scenario.stations[i];
            const double phi = rotations[i];
            for (int m = 0; m < M; ++m)
            {
                for (int k = 0; k < counts[m]; ++k)
                {
                    const UserPlacement &u = scenario.users[m][k];
                    ChannelVector &ch = set.at(i, m, k);
                    ch.source = i;
                    ch.cell = m;
                    ch.user = k;
                    ch.nlos_gains.clear();
                    const std::size_t L = u.scatterers.size();
                    const double nlos_norm = L > 0 ? std::sqrt(static_cast<double>(cfg.antenna_count) / L) : 0.0;

                    if (i == m)
                    {
                        ch.regime = Regime::NearField;
                        ch.los_gain = los_gain(u.range, lambda);
                        // h = sqrt(N) conj(beta) b + sqrt(N/L) sum conj(beta_l) b_l
                        ch.coefficients = (sqrtN * std::conj(ch.los_gain)) * near_steering(u.angle, u.range, phi, cfg);
                        for (const Scatterer &s : u.scatterers)
                        {
                            const cdouble g = nlos_gain_scale(s.range, lambda) * s.fading[i];
                            ch.nlos_gains.push_back(g);
                            ch.coefficients += (nlos_norm * std::conj(g)) * near_steering(s.angle, s.range, phi, cfg);
                        }
                    }
                    else
                    {
                        ch.regime = Regime::FarField;
                        const Vec2 p = scenario.user_position(m, k);
                        const double dist = inter_cell_distance(p, bs);
                        ch.los_gain = los_gain(dist, lambda);
                        ch.coefficients =
                            (sqrtN * std::conj(ch.los_gain)) * far_steering(inter_cell_angle(p, bs), phi, cfg);
                        for (const Scatterer &s : u.scatterers)
                        {
                            const Vec2 q = scenario.local_to_global(m, s.angle, s.range);
                            const cdouble g = nlos_gain_scale(inter_cell_distance(q, bs), lambda) * s.fading[i];
                            ch.nlos_gains.push_back(g);
                            ch.coefficients +=
                                (nlos_norm * std::conj(g)) * far_steering(inter_cell_angle(q, bs), phi, cfg);
                        }
                    }
                }
            }
        }
        return set;
    }
}
