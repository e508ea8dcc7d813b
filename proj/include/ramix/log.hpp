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

#ifndef RAMIX_LOG_HPP
#define RAMIX_LOG_HPP

#include <sstream>
#include <string>

namespace ramix::log
{
    enum class Level
    {
        Debug = 0,
        Info = 1,
        Warn = 2,
        Off = 3,
    };

    // Initial level comes from RAMIX_LOG (debug|info|warn|off), default warn.
    Level level();
    void set_level(Level lvl);
    void write(Level lvl, const std::string &msg);

    template <typename... Args>
    void emit(Level lvl, const Args &...args)
    {
        if (lvl < level())
            return;
        std::ostringstream os;
        (os << ... << args);
        write(lvl, os.str());
    }

    template <typename... Args>
    void debug(const Args &...args) { emit(Level::Debug, args...); }
    template <typename... Args>
    void info(const Args &...args) { emit(Level::Info, args...); }
    template <typename... Args>
    void warn(const Args &...args) { emit(Level::Warn, args...); }
}

#endif
