// Copyright 2026 The shapeprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shapeprobe/ir.hpp"
#include "shapeprobe/session.hpp"

namespace shapeprobe {

struct CheckOptions {
    bool trace = false;
    std::optional<std::int64_t> max_iterations{};
};

struct TraceLine {
    std::int64_t iteration;
    std::string node;
    OpKind op;
    Shape shape;
};

struct RunVerdict {
    std::size_t index = 0;
    std::string graph;
    std::int64_t iterations = 0;
    std::optional<Diagnostic> diagnostic;
    std::vector<TraceLine> trace;

    bool ok() const { return !diagnostic; }
};

struct ExitReport {
    std::vector<RunVerdict> runs;

    bool ok() const;
    /// 0 when every run is clean, 1 when any run reported a diagnostic.
    int exit_code() const { return ok() ? 0 : 1; }
};

/// Exit status for inputs that fail to load.
inline constexpr int kExitInvalidInput = 2;

/// Executes every run plan in order, each in a fresh session.
ExitReport check(const ProgramIR& ir, const CheckOptions& options = {});

struct FormattedReport {
    std::string out;
    std::string err;
};

/// Verdicts and traces go to `out`, diagnostics to `err`.
FormattedReport format_text(const ExitReport& report);
/// Single JSON document; everything goes to `out`.
FormattedReport format_json(const ExitReport& report);

/// {node, op, inputs, iteration, kind, message}
std::string diagnostic_to_json(const Diagnostic& d);

}  // namespace shapeprobe
