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

// JSON program format: graphs of shape operations plus the session runs to
// perform on them.
//
//   {
//     "version": 1,
//     "graphs": { "main": [ {"id": "x", "op": "placeholder", "shape": [null, 784]}, ... ] },
//     "runs": [ {"graph": "main", "fetches": ["loss"],
//                "feeds": [ {"x": [50, 784]} ], "repeat": 3} ]
//   }
//
// Shape literals: an integer is a known extent, null an unknown one, and the
// string "?" stands for a shape of unknown rank.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "shapeprobe/graph.hpp"
#include "shapeprobe/session.hpp"

namespace shapeprobe {

struct RunPlan {
    std::string graph;
    std::vector<std::string> fetches;
    /// Empty means a single run without feeds.
    std::vector<FeedSet> feeds;
    std::int64_t repeat = 1;

    bool operator==(const RunPlan&) const = default;
};

struct ProgramIR {
    int version = 1;
    std::map<std::string, ShapeGraph> graphs;
    std::vector<RunPlan> runs;

    bool operator==(const ProgramIR&) const = default;
};

/// Base of all load failures. `path()` is a JSON path such as
/// `$.graphs.main[2].attrs.ksize`, or empty when it does not apply.
class IrError : public std::runtime_error {
public:
    IrError(std::string path, const std::string& message);
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// Not well-formed JSON, or the file could not be read.
class ParseError : public IrError {
public:
    using IrError::IrError;
};

/// Well-formed JSON that does not match the program schema.
class SchemaError : public IrError {
public:
    using IrError::IrError;
};

/// A graph failed structural validation (cycle, dangling input, arity, ...).
class IrGraphError : public IrError {
public:
    using IrError::IrError;
};

ProgramIR parse_ir(std::string_view text);
ProgramIR load_ir(const std::filesystem::path& path);

/// Canonical form: sorted keys, canonical shape literals, defaults omitted.
std::string serialize_ir(const ProgramIR& ir);

std::vector<FeedSet> effective_feeds(const RunPlan& plan);

}  // namespace shapeprobe
