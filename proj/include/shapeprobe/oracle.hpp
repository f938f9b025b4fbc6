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

// Reference interpreter that executes programs on small zero-filled tensors.
// It shares the graph and IR types with the abstract engine but none of its
// shape rules: every op computes its result the long way, and a shape error
// is whatever makes that computation impossible.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "shapeprobe/ir.hpp"

namespace shapeprobe::oracle {

using Extents = std::vector<std::int64_t>;

struct ConcreteTensor {
    Extents shape;
    std::vector<float> data;

    static ConcreteTensor zeros(Extents shape);
};

/// Thrown by execute() when the inputs cannot be combined.
class ConcreteShapeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Replaces unknown dims with sizes in [1, 6]; an unknown rank becomes a rank
/// in [0, 4]. Deterministic per seed. Throws std::invalid_argument on Bottom.
Extents concretize(const Shape& declared, std::uint64_t seed);

/// Runs one non-source op. Assign and set_shape are handled by the runner.
ConcreteTensor execute(OpKind kind, std::span<const ConcreteTensor* const> inputs, const Attributes& attrs);

struct ConcreteError {
    std::string node;
    std::int64_t iteration = 1;
    std::string message;
};

struct NodeExtents {
    std::string id;
    Extents shape;
};

struct ConcreteRunResult {
    std::size_t index = 0;
    std::string graph;
    std::int64_t iterations = 0;
    std::optional<ConcreteError> error;
    /// Per iteration, every evaluated node in evaluation order.
    std::vector<std::vector<NodeExtents>> shapes;

    bool ok() const { return !error; }
};

struct OracleOptions {
    bool record_shapes = true;
    std::optional<std::int64_t> max_iterations{};
};

/// Executes every run plan with feeds concretized from `seed`.
std::vector<ConcreteRunResult> concrete_run(const ProgramIR& ir, std::uint64_t seed,
                                            const OracleOptions& options = {});

std::string format_oracle_text(const std::vector<ConcreteRunResult>& results);
std::string format_oracle_json(const std::vector<ConcreteRunResult>& results);

}  // namespace shapeprobe::oracle
