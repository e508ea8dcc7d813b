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

#ifndef RAMIX_FRESNEL_HPP
#define RAMIX_FRESNEL_HPP

namespace ramix
{
    struct FresnelPair
    {
        double c = 0.0;
        double s = 0.0;
    };

    // C(x) = int_0^x cos(pi t^2 / 2) dt and S(x) = int_0^x sin(pi t^2 / 2) dt.
    // Power series for |x| <= 1.5, Lentz continued fraction beyond; ~1e-15 absolute.
    FresnelPair fresnel(double x);
    inline double fresnel_c(double x) { return fresnel(x).c; }
    inline double fresnel_s(double x) { return fresnel(x).s; }
}

#endif
