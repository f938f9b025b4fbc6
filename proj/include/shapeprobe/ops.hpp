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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shapeprobe/shape.hpp"

namespace shapeprobe {

enum class OpKind : std::uint8_t {
    Placeholder,
    Constant,
    Variable,
    Assign,
    SetShape,
    Reshape,
    ReduceMean,
    ReduceSum,
    ReduceMax,
    MatMul,
    Conv2D,
    MaxPool,
    AvgPool,
    Add,
    Sub,
    Mul,
    Div,
    BiasAdd,
    Relu,
    Dropout,
    Tanh,
    Sigmoid,
    Softmax,
    Cast,
    Identity,
    Transpose,
    Concat,
    ExpandDims,
    Squeeze,
    ArgMax,
    OneHot,
    Flatten,
};

inline constexpr std::size_t kOpKindCount = static_cast<std::size_t>(OpKind::Flatten) + 1;

/// Grouping of op kinds that share one transfer rule.
enum class OpFamily : std::uint8_t {
    Source,
    Assign,
    SetShape,
    Reshape,
    Reduce,
    MatMul,
    Conv2D,
    Pool2D,
    Elementwise,
    BiasAdd,
    Identity,
    Transpose,
    Concat,
    ExpandDims,
    Squeeze,
    ArgMax,
    OneHot,
    Flatten,
};

enum class Padding : std::uint8_t { Same, Valid };

/// Static operation parameters. Which fields are meaningful depends on the op.
struct Attributes {
    std::optional<DesiredShape> desired;          // reshape
    std::optional<std::int64_t> axis;             // reduce, concat, expand_dims, argmax
    std::optional<std::vector<std::int64_t>> axes;  // squeeze
    bool keep_dims = false;                       // reduce
    std::optional<std::array<std::int64_t, 4>> ksize;    // pool
    std::optional<std::array<std::int64_t, 4>> strides;  // conv, pool
    std::optional<Padding> padding;               // conv, pool
    std::optional<std::vector<std::int64_t>> perm;  // transpose
    std::optional<std::int64_t> depth;            // one_hot
    bool validate = true;                         // assign

    bool operator==(const Attributes&) const = default;
};

std::string_view op_name(OpKind kind);
std::optional<OpKind> op_from_name(std::string_view name);
OpFamily op_family(OpKind kind);
std::string_view padding_name(Padding p);

/// Number of graph inputs an op takes. `max` is absent for variadic ops.
struct Arity {
    std::size_t min = 0;
    std::optional<std::size_t> max;
    bool accepts(std::size_t n) const { return n >= min && (!max || n <= *max); }
};
Arity op_arity(OpKind kind);

/// Checks the attribute constraints for `kind` (list lengths, ranges, required
/// fields). Returns a description of the first violation, or nothing.
std::optional<std::string> validate_attributes(OpKind kind, const Attributes& attrs);

// Individual transfer rules. All are total: a shape error is reported as
// Shape::bottom(), and a Bottom input always produces Bottom.

Shape reshape_transfer(const Shape& input, const std::optional<DesiredShape>& desired);
// Raw target list, -1 for the wildcard. An ill-formed list (two wildcards,
// entries below 1) is itself an error value and yields Bottom.
Shape reshape_transfer(const Shape& input, const std::vector<std::int64_t>& raw_desired);
Shape reduce_transfer(const Shape& input, std::optional<std::int64_t> axis, bool keep_dims);
Shape matmul_transfer(const Shape& a, const Shape& b);
Shape conv2d_transfer(const Shape& input, const Shape& filter,
                      const std::array<std::int64_t, 4>& strides, Padding padding);
Shape pool2d_transfer(const Shape& input, const std::array<std::int64_t, 4>& ksize,
                      const std::array<std::int64_t, 4>& strides, Padding padding);
Shape elementwise_transfer(const Shape& a, const Shape& b);
Shape bias_add_transfer(const Shape& value, const Shape& bias);
Shape identity_transfer(const Shape& input);
Shape concat_transfer(std::span<const Shape> inputs, std::int64_t axis);
Shape transpose_transfer(const Shape& input, const std::optional<std::vector<std::int64_t>>& perm);
Shape expand_dims_transfer(const Shape& input, std::int64_t axis);
Shape squeeze_transfer(const Shape& input, const std::optional<std::vector<std::int64_t>>& axes);
Shape flatten_transfer(const Shape& input);
Shape argmax_transfer(const Shape& input, std::int64_t axis);
Shape one_hot_transfer(const Shape& input, std::int64_t depth);
Shape set_shape_transfer(const Shape& current, const Shape& reasserted);
Shape assign_transfer(const Shape& variable, const Shape& value, bool validate);

/// Uniform entry point used by the session. The meaning of `inputs` per family:
///   Source    - shapes to be met: {declared, fed} for placeholders,
///               {declared} for constants, {stored} for variables
///   SetShape  - {input, reasserted}
///   Assign    - {variable, value}
///   otherwise - the node's graph inputs in order
using TransferFn = Shape (*)(std::span<const Shape> inputs, const Attributes& attrs);
TransferFn transfer_for(OpKind kind);

inline Shape apply_transfer(OpKind kind, std::span<const Shape> inputs, const Attributes& attrs) {
    return transfer_for(kind)(inputs, attrs);
}

}  // namespace shapeprobe
