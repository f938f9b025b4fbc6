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

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "shapeprobe/ops.hpp"
#include "shapeprobe/shape.hpp"

namespace shapeprobe {

struct NodeSpec {
    std::string id;
    OpKind kind = OpKind::Identity;
    std::vector<std::string> inputs;
    Attributes attrs;
    /// Declared shape for sources; the reasserted shape for set_shape.
    std::optional<Shape> shape;

    bool operator==(const NodeSpec&) const = default;
};

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised with one node id that lies on the cycle.
class CycleError : public GraphError {
public:
    explicit CycleError(std::string node);
    const std::string& node() const { return node_; }

private:
    std::string node_;
};

/// A referenced node id does not exist.
class ReferenceError : public GraphError {
public:
    explicit ReferenceError(std::string id, const std::string& context);
    const std::string& id() const { return id_; }

private:
    std::string id_;
};

class ArityError : public GraphError {
public:
    using GraphError::GraphError;
};

class DuplicateIdError : public GraphError {
public:
    using GraphError::GraphError;
};

class AttributeError : public GraphError {
public:
    using GraphError::GraphError;
};

/// Validated, immutable DAG of shape operations.
class ShapeGraph {
public:
    ShapeGraph() = default;

    const std::vector<NodeSpec>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    bool contains(const std::string& id) const { return index_.contains(id); }
    std::optional<std::size_t> index_of(const std::string& id) const;
    const NodeSpec& node(std::size_t index) const { return nodes_[index]; }
    /// Throws ReferenceError for an unknown id.
    const NodeSpec& node(const std::string& id) const;
    /// Indices of each node's inputs, parallel to nodes().
    const std::vector<std::size_t>& input_indices(std::size_t index) const { return inputs_[index]; }

    bool operator==(const ShapeGraph& other) const { return nodes_ == other.nodes_; }

private:
    friend ShapeGraph build_graph(std::vector<NodeSpec> specs);

    std::vector<NodeSpec> nodes_;
    std::vector<std::vector<std::size_t>> inputs_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Validates ids, arity, attributes, references and acyclicity.
ShapeGraph build_graph(std::vector<NodeSpec> specs);

/// Ancestor closure of `fetches`, ordered so every node follows its inputs.
/// Ties between ready nodes go to the lexicographically smallest id.
std::vector<std::string> topo_order(const ShapeGraph& g, std::span<const std::string> fetches);

/// Same as topo_order but in node indices.
std::vector<std::size_t> topo_order_indices(const ShapeGraph& g, std::span<const std::string> fetches);

}  // namespace shapeprobe
