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

#include "ramix/log.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <mutex>

namespace ramix::log
{
    namespace
    {
        Level level_from_env()
        {
            const char *env = std::getenv("RAMIX_LOG");
            if (env == nullptr)
                return Level::Warn;
            if (std::strcmp(env, "debug") == 0)
                return Level::Debug;
            if (std::strcmp(env, "info") == 0)
                return Level::Info;
            if (std::strcmp(env, "off") == 0)
                return Level::Off;
            return Level::Warn;
        }

        std::atomic<int> &current()
        {
            static std::atomic<int> lvl{static_cast<int>(level_from_env())};
            return lvl;
        }

        std::mutex sink_mutex;
    }

    Level level() { return static_cast<Level>(current().load(std::memory_order_relaxed)); }

    void set_level(Level lvl) { current().store(static_cast<int>(lvl), std::memory_order_relaxed); }

    void write(Level lvl, const std::string &msg)
    {
        static const char *tags[] = {"debug", "info", "warn"};
        std::lock_guard<std::mutex> lock(sink_mutex);
        std::clog << "[ramix:" << tags[static_cast<int>(lvl)] << "] " << msg << '\n';
    }
}
