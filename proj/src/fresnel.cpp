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

#include "ramix/fresnel.hpp"
#include "ramix/error.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace ramix
{
    namespace
    {
        constexpr double kEps = 1e-16;
        constexpr int kMaxIter = 200;
        constexpr double kSeriesLimit = 1.5;

        // Alternating series; odd powers of (pi/2) x^2 feed S, even powers feed C.
        FresnelPair series(double ax)
        {
            const double arg = 0.5 * std::numbers::pi * ax * ax;
            double term = ax;
            double sum_c = ax;
            double sum_s = 0.0;
            double sign_c = 1.0;
            double sign_s = 1.0;
            for (int k = 1; k < kMaxIter; ++k)
            {
                term *= arg / k;
                const double contrib = term / (2 * k + 1);
                if (k % 2 == 1)
                {
                    sum_s += sign_s * contrib;
                    sign_s = -sign_s;
                }
                else
                {
                    sign_c = -sign_c;
                    sum_c += sign_c * contrib;
                }
                if (contrib < kEps * std::max(std::abs(sum_c), std::abs(sum_s)))
                    break;
            }
            return {sum_c, sum_s};
        }

        // erfc-type continued fraction evaluated with the modified Lentz method.
        FresnelPair continued_fraction(double ax)
        {
            using cplx = std::complex<double>;
            const double tiny = std::numeric_limits<double>::min();
            const double pix2 = std::numbers::pi * ax * ax;
            cplx b(1.0, -pix2);
            cplx cc(1.0 / tiny, 0.0);
            cplx d = 1.0 / b;
            cplx h = d;
            int n = -1;
            bool converged = false;
            for (int k = 2; k < kMaxIter; ++k)
            {
                n += 2;
                const double a = -static_cast<double>(n) * (n + 1);
                b += 4.0;
                d = 1.0 / (a * d + b);
                cc = b + a / cc;
                const cplx del = cc * d;
                h *= del;
                if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < kEps)
                {
                    converged = true;
                    break;
                }
            }
            if (!converged)
                fail(ErrorCode::Solver, "Fresnel continued fraction did not converge");
            h *= cplx(ax, -ax);
            const cplx cs = cplx(0.5, 0.5) * (1.0 - std::polar(1.0, 0.5 * pix2) * h);
            return {cs.real(), cs.imag()};
        }
    }

    FresnelPair fresnel(double x)
    {
        if (!std::isfinite(x))
            fail(ErrorCode::Domain, "Fresnel integral of a non-finite argument");
        const double ax = std::abs(x);
        FresnelPair out;
        if (ax < std::sqrt(std::numeric_limits<double>::min()))
            out = {ax, 0.0};
        else if (ax <= kSeriesLimit)
            out = series(ax);
        else
            out = continued_fraction(ax);
        if (x < 0.0)
        {
            out.c = -out.c;
            out.s = -out.s;
        }
        return out;
    }
}
