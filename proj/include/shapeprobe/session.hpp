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
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "shapeprobe/graph.hpp"

namespace shapeprobe {

/// Placeholder id -> shape of the data a program would feed.
struct FeedSet {
    std::map<std::string, Shape> bindings;

    bool operator==(const FeedSet&) const = default;
};

enum class DiagnosticKind { ShapeMismatch, UnboundPlaceholder, IllegalAttribute };

std::string_view diagnostic_kind_name(DiagnosticKind kind);

struct Diagnostic {
    std::string node_id;
    OpKind op = OpKind::Identity;
    std::vector<Shape> input_shapes;
    std::int64_t iteration = 1;
    std::string message;
    DiagnosticKind kind = DiagnosticKind::ShapeMismatch;
};

struct NodeShape {
    std::string id;
    OpKind op;
    Shape shape;
};

struct RunResult {
    /// Every evaluated node in evaluation order. On failure, the nodes
    /// evaluated before the failing one.
    std::vector<NodeShape> shapes;
    std::optional<Diagnostic> diagnostic;

    bool ok() const { return !diagnostic; }
    const Shape* shape_of(const std::string& id) const;
};

/// Mutable per-session state over a graph that must outlive it. Not safe for
/// concurrent runs; separate sessions over one graph are independent.
class SessionState {
public:
    explicit SessionState(const ShapeGraph& graph);

    const ShapeGraph& graph() const { return *graph_; }
    const std::map<std::string, Shape>& var_shapes() const { return var_shapes_; }
    std::int64_t iteration() const { return iteration_; }

private:
    friend RunResult run(SessionState&, std::span<const std::string>, const FeedSet&);

    const ShapeGraph* graph_;
    std::map<std::string, Shape> var_shapes_;
    std::int64_t iteration_ = 1;
};

/// One session.run over the ancestor closure of `fetches`. Stops at the first
/// shape error. Throws std::invalid_argument for an empty fetch list or a feed
/// that names anything other than a placeholder, and ReferenceError for an
/// unknown fetch.
RunResult run(SessionState& state, std::span<const std::string> fetches, const FeedSet& feed);

struct LoopOptions {
    std::int64_t repeat = 1;
    /// Upper bound on the total number of runs.
    std::optional<std::int64_t> max_iterations{};
    /// Called after every run, successful or not.
    std::function<void(const RunResult&, std::int64_t iteration)> on_run;
};

struct LoopOutcome {
    std::optional<Diagnostic> diagnostic;
    std::int64_t iterations = 0;

    bool ok() const { return !diagnostic; }
};

inline constexpr std::string_view kNoErrorDetected = "no error detected";

/// Runs repeat x feeds.size() iterations, cycling through feeds, and keeps
/// variable shapes between iterations.
LoopOutcome run_loop(SessionState& state, std::span<const std::string> fetches,
                     std::span<const FeedSet> feeds, const LoopOptions& options = {});

/// Re-setting the static shape of a tensor that already has one.
std::variant<Shape, Diagnostic> set_shape_semantics(const NodeSpec& node, const Shape& declared,
                                                    const Shape& reasserted,
                                                    std::int64_t iteration = 1);

}  // namespace shapeprobe
