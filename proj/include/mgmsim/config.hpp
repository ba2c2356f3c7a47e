// SPDX-License-Identifier: Apache-2.0
//
// mgmsim: link-level simulator for mode-group multiplexed IM-DD transmission
// Copyright (C) 2026 The mgmsim Authors
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

#ifndef MGMSIM_CONFIG_HPP
#define MGMSIM_CONFIG_HPP

#include "mgmsim/harness.hpp"

#include <stdexcept>
#include <string>

namespace mgmsim
{
    /// Configuration problem. `where()` is a dotted field path, `line()` is
    /// 1-based or 0 when unknown.
    class ConfigError : public std::runtime_error
    {
    public:
        ConfigError(const std::string &where, int line, const std::string &what);

        const std::string &where() const { return where_; }
        int line() const { return line_; }

    private:
        std::string where_;
        int line_;
    };

    SweepSpec parse_config_text(const std::string &text);
    SweepSpec parse_config(const std::string &path);

    /// Canonical YAML with every field spelled out; parses back to `spec`.
    std::string emit_config(const SweepSpec &spec);

    /// Markdown page listing every key with its default.
    std::string config_reference();
}

#endif
