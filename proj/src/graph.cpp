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

#include "shapeprobe/graph.hpp"

#include <functional>
#include <queue>

namespace shapeprobe {

CycleError::CycleError(std::string node)
    : GraphError("cycle through node '" + node + "'"), node_(std::move(node)) {}

ReferenceError::ReferenceError(std::string id, const std::string& context)
    : GraphError("unknown node '" + id + "'" + (context.empty() ? "" : " referenced by " + context)),
      id_(std::move(id)) {}

std::optional<std::size_t> ShapeGraph::index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const NodeSpec& ShapeGraph::node(const std::string& id) const {
    auto idx = index_of(id);
    if (!idx) throw ReferenceError(id, "");
    return nodes_[*idx];
}

namespace {

bool carries_shape(OpKind kind) {
    return op_family(kind) == OpFamily::Source || kind == OpKind::SetShape;
}

// Walks input edges among nodes Kahn's algorithm could not place until a node
// repeats on the current path.
std::string find_cycle_node(const std::vector<std::vector<std::size_t>>& inputs,
                            const std::vector<std::size_t>& pending_in_degree,
                            const std::vector<NodeSpec>& nodes) {
    std::size_t start = 0;
    while (pending_in_degree[start] == 0) ++start;
    std::vector<int> state(nodes.size(), 0);  // 0 unvisited, 1 on path, 2 done
    std::vector<std::pair<std::size_t, std::size_t>> stack{{start, 0}};
    state[start] = 1;
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next == inputs[node].size()) {
            state[node] = 2;
            stack.pop_back();
            continue;
        }
        const std::size_t in = inputs[node][next++];
        if (state[in] == 1) return nodes[in].id;
        if (state[in] == 0 && pending_in_degree[in] != 0) {
            state[in] = 1;
            stack.emplace_back(in, 0);
        }
    }
    return nodes[start].id;
}

}  // namespace

ShapeGraph build_graph(std::vector<NodeSpec> specs) {
    ShapeGraph g;
    g.index_.reserve(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& spec = specs[i];
        if (spec.id.empty()) throw AttributeError("node " + std::to_string(i) + " has an empty id");
        if (!g.index_.emplace(spec.id, i).second)
            throw DuplicateIdError("duplicate node id '" + spec.id + "'");
    }

    g.inputs_.resize(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& spec = specs[i];
        const std::string where = "'" + spec.id + "' (" + std::string(op_name(spec.kind)) + ")";
        if (!op_arity(spec.kind).accepts(spec.inputs.size()))
            throw ArityError(where + " takes " + std::to_string(op_arity(spec.kind).min) +
                             (op_arity(spec.kind).max ? "" : " or more") + " inputs, got " +
                             std::to_string(spec.inputs.size()));
        if (auto err = validate_attributes(spec.kind, spec.attrs))
            throw AttributeError(where + ": " + *err);
        if (carries_shape(spec.kind) && !spec.shape)
            throw AttributeError(where + " requires a shape");
        if (!carries_shape(spec.kind) && spec.shape)
            throw AttributeError(where + " does not take a shape");
        if (spec.shape && spec.shape->is_bottom())
            throw AttributeError(where + " declares a bottom shape");

        for (const auto& in : spec.inputs) {
            auto idx = g.index_of(in);
            if (!idx) throw ReferenceError(in, where);
            g.inputs_[i].push_back(*idx);
        }
        if (spec.kind == OpKind::Assign && specs[g.inputs_[i][0]].kind != OpKind::Variable)
            throw AttributeError(where + ": first input must be a variable");
    }

    // Kahn's algorithm over the whole graph to reject cycles.
    std::vector<std::size_t> in_degree(specs.size());
    std::vector<std::vector<std::size_t>> users(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) {
        in_degree[i] = g.inputs_[i].size();
        for (auto in : g.inputs_[i]) users[in].push_back(i);
    }
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < specs.size(); ++i)
        if (in_degree[i] == 0) ready.push_back(i);
    std::size_t placed = 0;
    while (!ready.empty()) {
        auto n = ready.back();
        ready.pop_back();
        ++placed;
        for (auto u : users[n])
            if (--in_degree[u] == 0) ready.push_back(u);
    }
    if (placed != specs.size()) throw CycleError(find_cycle_node(g.inputs_, in_degree, specs));

    g.nodes_ = std::move(specs);
    return g;
}

std::vector<std::size_t> topo_order_indices(const ShapeGraph& g, std::span<const std::string> fetches) {
    std::vector<bool> needed(g.size(), false);
    std::vector<std::size_t> stack;
    for (const auto& f : fetches) {
        auto idx = g.index_of(f);
        if (!idx) throw ReferenceError(f, "fetches");
        if (!needed[*idx]) {
            needed[*idx] = true;
            stack.push_back(*idx);
        }
    }
    std::vector<std::size_t> closure;
    while (!stack.empty()) {
        auto n = stack.back();
        stack.pop_back();
        closure.push_back(n);
        for (auto in : g.input_indices(n)) {
            if (!needed[in]) {
                needed[in] = true;
                stack.push_back(in);
            }
        }
    }

    std::vector<std::size_t> in_degree(g.size(), 0);
    std::vector<std::vector<std::size_t>> users(g.size());
    for (auto n : closure) {
        in_degree[n] = g.input_indices(n).size();
        for (auto in : g.input_indices(n)) users[in].push_back(n);
    }

    auto later = [&g](std::size_t a, std::size_t b) { return g.node(a).id > g.node(b).id; };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(later)> ready(later);
    for (auto n : closure)
        if (in_degree[n] == 0) ready.push(n);

    std::vector<std::size_t> order;
    order.reserve(closure.size());
    while (!ready.empty()) {
        auto n = ready.top();
        ready.pop();
        order.push_back(n);
        for (auto u : users[n])
            if (--in_degree[u] == 0) ready.push(u);
    }
    return order;
}

std::vector<std::string> topo_order(const ShapeGraph& g, std::span<const std::string> fetches) {
    std::vector<std::string> ids;
    for (auto n : topo_order_indices(g, fetches)) ids.push_back(g.node(n).id);
    return ids;
}

}  // namespace shapeprobe
