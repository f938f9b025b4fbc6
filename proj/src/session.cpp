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

#include "shapeprobe/session.hpp"

#include <sstream>
#include <stdexcept>

namespace shapeprobe {

namespace {

std::string join_shapes(const std::vector<Shape>& shapes) {
    std::string out;
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        if (i) out += ", ";
        out += shapes[i].to_string();
    }
    return out;
}

std::string node_label(const NodeSpec& node) {
    return "'" + node.id + "' (" + std::string(op_name(node.kind)) + ")";
}

// First point where two shapes disagree, e.g. "dimension 1 is 784 vs 10".
std::string describe_conflict(const Shape& a, const Shape& b) {
    if (!a.rank_known() || !b.rank_known()) return {};
    if (a.rank() != b.rank())
        return "rank " + std::to_string(a.rank()) + " vs " + std::to_string(b.rank());
    for (std::size_t i = 0; i < a.rank(); ++i) {
        if (a[i].is_known() && b[i].is_known() && a[i].value() != b[i].value())
            return "dimension " + std::to_string(i) + " is " + std::to_string(a[i].value()) + " vs " +
                   std::to_string(b[i].value());
    }
    return {};
}

Diagnostic make_diagnostic(const NodeSpec& node, std::vector<Shape> inputs, std::int64_t iteration,
                           DiagnosticKind kind) {
    std::ostringstream msg;
    switch (kind) {
    case DiagnosticKind::UnboundPlaceholder:
        msg << "placeholder " << node_label(node) << " declared " << inputs.front().to_string()
            << " must be fed before run";
        break;
    case DiagnosticKind::IllegalAttribute: {
        msg << "cannot set shape " << inputs.back().to_string() << " on " << node_label(node)
            << " whose shape is already " << inputs.front().to_string();
        auto why = describe_conflict(inputs.front(), inputs.back());
        if (!why.empty()) msg << ": " << why;
        break;
    }
    case DiagnosticKind::ShapeMismatch:
        if (node.kind == OpKind::Placeholder) {
            msg << "cannot feed shape " << inputs.back().to_string() << " to placeholder "
                << node_label(node) << " declared " << inputs.front().to_string();
            auto why = describe_conflict(inputs.front(), inputs.back());
            if (!why.empty()) msg << ": " << why;
        } else {
            msg << "incompatible shapes at " << node_label(node) << ": inputs "
                << join_shapes(inputs);
        }
        break;
    }
    msg << " (iteration " << iteration << ")";

    Diagnostic d;
    d.node_id = node.id;
    d.op = node.kind;
    d.input_shapes = std::move(inputs);
    d.iteration = iteration;
    d.message = msg.str();
    d.kind = kind;
    return d;
}

}  // namespace

std::string_view diagnostic_kind_name(DiagnosticKind kind) {
    switch (kind) {
    case DiagnosticKind::ShapeMismatch: return "ShapeMismatch";
    case DiagnosticKind::UnboundPlaceholder: return "UnboundPlaceholder";
    case DiagnosticKind::IllegalAttribute: return "IllegalAttribute";
    }
    return "ShapeMismatch";
}

const Shape* RunResult::shape_of(const std::string& id) const {
    for (const auto& n : shapes)
        if (n.id == id) return &n.shape;
    return nullptr;
}

SessionState::SessionState(const ShapeGraph& graph) : graph_(&graph) {
    for (const auto& node : graph.nodes())
        if (node.kind == OpKind::Variable) var_shapes_.emplace(node.id, *node.shape);
}

RunResult run(SessionState& state, std::span<const std::string> fetches, const FeedSet& feed) {
    if (fetches.empty()) throw std::invalid_argument("run needs at least one fetch");
    const ShapeGraph& g = *state.graph_;
    for (const auto& [id, shape] : feed.bindings) {
        auto idx = g.index_of(id);
        if (!idx) throw ReferenceError(id, "feed");
        if (g.node(*idx).kind != OpKind::Placeholder)
            throw std::invalid_argument("feed binds '" + id + "', which is not a placeholder");
    }

    const auto order = topo_order_indices(g, fetches);
    const std::int64_t iteration = state.iteration_;
    RunResult result;

    for (auto n : order) {
        const auto& node = g.node(n);
        if (node.kind == OpKind::Placeholder && !feed.bindings.contains(node.id)) {
            result.diagnostic =
                make_diagnostic(node, {*node.shape}, iteration, DiagnosticKind::UnboundPlaceholder);
            return result;
        }
    }

    std::vector<Shape> shapes(g.size());
    std::vector<Shape> inputs;
    result.shapes.reserve(order.size());
    for (auto n : order) {
        const auto& node = g.node(n);
        inputs.clear();
        switch (node.kind) {
        case OpKind::Placeholder:
            inputs = {*node.shape, feed.bindings.at(node.id)};
            break;
        case OpKind::Constant: inputs = {*node.shape}; break;
        case OpKind::Variable: inputs = {state.var_shapes_.at(node.id)}; break;
        case OpKind::SetShape: inputs = {shapes[g.input_indices(n)[0]], *node.shape}; break;
        case OpKind::Assign:
            inputs = {state.var_shapes_.at(node.inputs[0]), shapes[g.input_indices(n)[1]]};
            break;
        default:
            for (auto in : g.input_indices(n)) inputs.push_back(shapes[in]);
        }

        Shape out = apply_transfer(node.kind, inputs, node.attrs);
        if (out.is_bottom()) {
            const auto kind = node.kind == OpKind::SetShape ? DiagnosticKind::IllegalAttribute
                                                            : DiagnosticKind::ShapeMismatch;
            result.diagnostic = make_diagnostic(node, inputs, iteration, kind);
            return result;
        }
        if (node.kind == OpKind::Assign) state.var_shapes_[node.inputs[0]] = out;
        shapes[n] = out;
        result.shapes.push_back({node.id, node.kind, std::move(out)});
    }
    ++state.iteration_;
    return result;
}

LoopOutcome run_loop(SessionState& state, std::span<const std::string> fetches,
                     std::span<const FeedSet> feeds, const LoopOptions& options) {
    if (feeds.empty()) throw std::invalid_argument("run_loop needs at least one feed set");
    if (options.repeat < 1) throw std::invalid_argument("repeat must be positive");

    std::int64_t total = options.repeat * static_cast<std::int64_t>(feeds.size());
    if (options.max_iterations) total = std::min(total, *options.max_iterations);

    LoopOutcome outcome;
    for (std::int64_t i = 0; i < total; ++i) {
        const std::int64_t iteration = state.iteration();
        RunResult r = run(state, fetches, feeds[static_cast<std::size_t>(i) % feeds.size()]);
        ++outcome.iterations;
        if (options.on_run) options.on_run(r, iteration);
        if (r.diagnostic) {
            outcome.diagnostic = std::move(r.diagnostic);
            break;
        }
    }
    return outcome;
}

std::variant<Shape, Diagnostic> set_shape_semantics(const NodeSpec& node, const Shape& declared,
                                                    const Shape& reasserted, std::int64_t iteration) {
    Shape out = set_shape_transfer(declared, reasserted);
    if (out.is_bottom())
        return make_diagnostic(node, {declared, reasserted}, iteration, DiagnosticKind::IllegalAttribute);
    return out;
}

}  // namespace shapeprobe
