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

#ifndef RAMIX_ERROR_HPP
#define RAMIX_ERROR_HPP

#include <stdexcept>
#include <string>

namespace ramix
{
    // Mirrors ramix_status in ramix.h; the C layer maps one to the other.
    enum class ErrorCode
    {
        InvalidArgument = 1,
        DegenerateGeometry = 2,
        Domain = 3,
        Infeasible = 4,
        Solver = 5,
        Io = 6,
        Parse = 7,
        Unsupported = 8,
    };

    class Error : public std::runtime_error
    {
    public:
        Error(ErrorCode code, const std::string &what) : std::runtime_error(what), code_(code) {}
        ErrorCode code() const noexcept { return code_; }

    private:
        ErrorCode code_;
    };

    [[noreturn]] inline void fail(ErrorCode code, const std::string &what) { throw Error(code, what); }

    inline void require(bool cond, const std::string &what)
    {
        if (!cond)
            throw Error(ErrorCode::InvalidArgument, what);
    }
}

#endif
