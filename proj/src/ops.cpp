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

#include "shapeprobe/ops.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace shapeprobe {

namespace {

struct OpInfo {
    OpKind kind;
    std::string_view name;
    OpFamily family;
};

constexpr std::array<OpInfo, kOpKindCount> kOps{{
    {OpKind::Placeholder, "placeholder", OpFamily::Source},
    {OpKind::Constant, "constant", OpFamily::Source},
    {OpKind::Variable, "variable", OpFamily::Source},
    {OpKind::Assign, "assign", OpFamily::Assign},
    {OpKind::SetShape, "set_shape", OpFamily::SetShape},
    {OpKind::Reshape, "reshape", OpFamily::Reshape},
    {OpKind::ReduceMean, "reduce_mean", OpFamily::Reduce},
    {OpKind::ReduceSum, "reduce_sum", OpFamily::Reduce},
    {OpKind::ReduceMax, "reduce_max", OpFamily::Reduce},
    {OpKind::MatMul, "matmul", OpFamily::MatMul},
    {OpKind::Conv2D, "conv2d", OpFamily::Conv2D},
    {OpKind::MaxPool, "max_pool", OpFamily::Pool2D},
    {OpKind::AvgPool, "avg_pool", OpFamily::Pool2D},
    {OpKind::Add, "add", OpFamily::Elementwise},
    {OpKind::Sub, "sub", OpFamily::Elementwise},
    {OpKind::Mul, "mul", OpFamily::Elementwise},
    {OpKind::Div, "div", OpFamily::Elementwise},
    {OpKind::BiasAdd, "bias_add", OpFamily::BiasAdd},
    {OpKind::Relu, "relu", OpFamily::Identity},
    {OpKind::Dropout, "dropout", OpFamily::Identity},
    {OpKind::Tanh, "tanh", OpFamily::Identity},
    {OpKind::Sigmoid, "sigmoid", OpFamily::Identity},
    {OpKind::Softmax, "softmax", OpFamily::Identity},
    {OpKind::Cast, "cast", OpFamily::Identity},
    {OpKind::Identity, "identity", OpFamily::Identity},
    {OpKind::Transpose, "transpose", OpFamily::Transpose},
    {OpKind::Concat, "concat", OpFamily::Concat},
    {OpKind::ExpandDims, "expand_dims", OpFamily::ExpandDims},
    {OpKind::Squeeze, "squeeze", OpFamily::Squeeze},
    {OpKind::ArgMax, "argmax", OpFamily::ArgMax},
    {OpKind::OneHot, "one_hot", OpFamily::OneHot},
    {OpKind::Flatten, "flatten", OpFamily::Flatten},
}};

const OpInfo& info(OpKind kind) { return kOps[static_cast<std::size_t>(kind)]; }

// Maps a possibly negative axis onto [0, rank). Absent when out of range.
std::optional<std::size_t> normalize_axis(std::int64_t axis, std::size_t rank) {
    const auto r = static_cast<std::int64_t>(rank);
    if (axis < -r || axis >= r) return std::nullopt;
    return static_cast<std::size_t>(axis < 0 ? axis + r : axis);
}

bool any_bottom(std::span<const Shape> shapes) {
    return std::any_of(shapes.begin(), shapes.end(), [](const Shape& s) { return s.is_bottom(); });
}

// Spatial extent after a sliding window. Absent means the window does not fit.
std::optional<Dim> window_extent(Dim in, Dim k, std::int64_t stride, Padding padding) {
    if (padding == Padding::Same) {
        if (!in.is_known()) return Dim::unknown();
        return Dim::known((in.value() + stride - 1) / stride);
    }
    if (!in.is_known() || !k.is_known()) return Dim::unknown();
    if (in.value() < k.value()) return std::nullopt;
    return Dim::known((in.value() - k.value() + stride) / stride);
}

bool valid_window_params(const std::array<std::int64_t, 4>& v) {
    return std::all_of(v.begin(), v.end(), [](std::int64_t x) { return x >= 1; }) && v[0] == 1 &&
           v[3] == 1;
}

}  // namespace

std::string_view op_name(OpKind kind) { return info(kind).name; }

std::optional<OpKind> op_from_name(std::string_view name) {
    for (const auto& op : kOps)
        if (op.name == name) return op.kind;
    return std::nullopt;
}

OpFamily op_family(OpKind kind) { return info(kind).family; }

std::string_view padding_name(Padding p) { return p == Padding::Same ? "SAME" : "VALID"; }

Arity op_arity(OpKind kind) {
    switch (op_family(kind)) {
    case OpFamily::Source: return {0, 0};
    case OpFamily::Assign:
    case OpFamily::MatMul:
    case OpFamily::Conv2D:
    case OpFamily::Elementwise:
    case OpFamily::BiasAdd: return {2, 2};
    case OpFamily::Concat: return {1, std::nullopt};
    default: return {1, 1};
    }
}

std::optional<std::string> validate_attributes(OpKind kind, const Attributes& attrs) {
    switch (op_family(kind)) {
    case OpFamily::Conv2D:
        if (!attrs.strides) return "conv2d requires strides";
        if (!valid_window_params(*attrs.strides))
            return "strides must be 4 entries >= 1 with strides[0] = strides[3] = 1";
        if (!attrs.padding) return "conv2d requires padding";
        break;
    case OpFamily::Pool2D:
        if (!attrs.ksize) return "pooling requires ksize";
        if (!attrs.strides) return "pooling requires strides";
        if (!valid_window_params(*attrs.ksize))
            return "ksize must be 4 entries >= 1 with ksize[0] = ksize[3] = 1";
        if (!valid_window_params(*attrs.strides))
            return "strides must be 4 entries >= 1 with strides[0] = strides[3] = 1";
        if (!attrs.padding) return "pooling requires padding";
        break;
    case OpFamily::Concat:
        if (!attrs.axis) return "concat requires axis";
        break;
    case OpFamily::ExpandDims:
        if (!attrs.axis) return "expand_dims requires axis";
        break;
    case OpFamily::OneHot:
        if (!attrs.depth) return "one_hot requires depth";
        if (*attrs.depth < 0 || *attrs.depth > kMaxDim) return "depth must be in [0, 2^31-1]";
        break;
    default: break;
    }
    return std::nullopt;
}

Shape reshape_transfer(const Shape& input, const std::optional<DesiredShape>& desired) {
    if (input.is_bottom() || !desired) return Shape::bottom();
    const auto& entries = desired->entries();
    const auto wildcard = desired->wildcard();

    // `others` saturates: a product past 2^63-1 can never match a real count.
    std::int64_t others = 1;
    bool huge = false;
    for (const auto& e : entries)
        if (e && !huge) huge = __builtin_mul_overflow(others, *e, &others);

    std::optional<std::int64_t> count;
    if (input.fully_known()) {
        count = element_count(input);
        if (!count) return Shape::bottom();  // no tensor this large can exist
    }

    std::vector<Dim> dims;
    dims.reserve(entries.size());
    if (!wildcard) {
        if (count && (huge || *count != others)) return Shape::bottom();
        for (const auto& e : entries) dims.push_back(Dim::known(*e));
        return Shape::of(std::move(dims));
    }

    Dim inferred = Dim::unknown();
    if (count) {
        if (huge) {
            if (*count != 0) return Shape::bottom();
            inferred = Dim::known(0);
        } else {
            if (*count % others != 0) return Shape::bottom();
            inferred = Dim::known(*count / others);
        }
    }
    for (const auto& e : entries) dims.push_back(e ? Dim::known(*e) : inferred);
    return Shape::of(std::move(dims));
}

Shape reshape_transfer(const Shape& input, const std::vector<std::int64_t>& raw_desired) {
    try {
        return reshape_transfer(input, DesiredShape::from_ints(raw_desired));
    } catch (const std::invalid_argument&) {
        return Shape::bottom();
    }
}

Shape reduce_transfer(const Shape& input, std::optional<std::int64_t> axis, bool keep_dims) {
    if (input.is_bottom()) return Shape::bottom();
    if (!axis) {
        if (keep_dims) {
            if (input.rank_unknown()) return input;
            return Shape::of(std::vector<Dim>(input.rank(), Dim::known(1)));
        }
        return Shape::scalar();
    }
    if (input.rank_unknown()) return Shape::unknown_rank();
    const auto a = normalize_axis(*axis, input.rank());
    if (!a) return Shape::bottom();
    std::vector<Dim> dims = input.dims();
    if (keep_dims)
        dims[*a] = Dim::known(1);
    else
        dims.erase(dims.begin() + static_cast<std::ptrdiff_t>(*a));
    return Shape::of(std::move(dims));
}

Shape matmul_transfer(const Shape& a, const Shape& b) {
    if (a.is_bottom() || b.is_bottom()) return Shape::bottom();
    if ((a.rank_known() && a.rank() != 2) || (b.rank_known() && b.rank() != 2))
        return Shape::bottom();
    if (a.rank_unknown() || b.rank_unknown()) return Shape::unknown_rank();
    const Dim inner_a = a[1];
    const Dim inner_b = b[0];
    if (inner_a.is_known() && inner_b.is_known() && inner_a.value() != inner_b.value())
        return Shape::bottom();
    return Shape::of({a[0], b[1]});
}

Shape conv2d_transfer(const Shape& input, const Shape& filter,
                      const std::array<std::int64_t, 4>& strides, Padding padding) {
    if (input.is_bottom() || filter.is_bottom()) return Shape::bottom();
    if (!valid_window_params(strides)) return Shape::bottom();
    if ((input.rank_known() && input.rank() != 4) || (filter.rank_known() && filter.rank() != 4))
        return Shape::bottom();
    if (input.rank_unknown() || filter.rank_unknown()) return Shape::unknown_rank();

    const Dim channels = input[3];
    const Dim in_channels = filter[2];
    if (channels.is_known() && in_channels.is_known() && channels.value() != in_channels.value())
        return Shape::bottom();

    const auto h = window_extent(input[1], filter[0], strides[1], padding);
    const auto w = window_extent(input[2], filter[1], strides[2], padding);
    if (!h || !w) return Shape::bottom();
    return Shape::of({input[0], *h, *w, filter[3]});
}

Shape pool2d_transfer(const Shape& input, const std::array<std::int64_t, 4>& ksize,
                      const std::array<std::int64_t, 4>& strides, Padding padding) {
    if (input.is_bottom()) return Shape::bottom();
    if (!valid_window_params(ksize) || !valid_window_params(strides)) return Shape::bottom();
    if (input.rank_unknown()) return Shape::unknown_rank();
    if (input.rank() != 4) return Shape::bottom();
    const auto h = window_extent(input[1], Dim::known(ksize[1]), strides[1], padding);
    const auto w = window_extent(input[2], Dim::known(ksize[2]), strides[2], padding);
    if (!h || !w) return Shape::bottom();
    return Shape::of({input[0], *h, *w, input[3]});
}

Shape elementwise_transfer(const Shape& a, const Shape& b) { return broadcast(a, b); }

Shape bias_add_transfer(const Shape& value, const Shape& bias) {
    if (value.is_bottom() || bias.is_bottom()) return Shape::bottom();
    if ((value.rank_known() && value.rank() < 2) || (bias.rank_known() && bias.rank() != 1))
        return Shape::bottom();
    if (value.rank_unknown()) return Shape::unknown_rank();
    if (bias.rank_unknown()) return value;
    const Dim last = value[value.rank() - 1];
    const Dim b = bias[0];
    if (last.is_known() && b.is_known() && last.value() != b.value()) return Shape::bottom();
    std::vector<Dim> dims = value.dims();
    if (!last.is_known()) dims.back() = b;
    return Shape::of(std::move(dims));
}

Shape identity_transfer(const Shape& input) { return input; }

Shape concat_transfer(std::span<const Shape> inputs, std::int64_t axis) {
    if (inputs.empty() || any_bottom(inputs)) return Shape::bottom();

    std::optional<std::size_t> rank;
    bool any_rank_unknown = false;
    for (const auto& s : inputs) {
        if (s.rank_unknown()) {
            any_rank_unknown = true;
            continue;
        }
        if (rank && *rank != s.rank()) return Shape::bottom();
        rank = s.rank();
    }
    if (!rank) return Shape::unknown_rank();

    const auto a = normalize_axis(axis, *rank);
    if (!a) return Shape::bottom();

    std::vector<Dim> dims(*rank, Dim::unknown());
    std::optional<std::int64_t> total = any_rank_unknown ? std::nullopt : std::optional<std::int64_t>(0);
    for (const auto& s : inputs) {
        if (s.rank_unknown()) continue;
        for (std::size_t i = 0; i < *rank; ++i) {
            if (i == *a) {
                if (total && s[i].is_known())
                    *total += s[i].value();
                else
                    total.reset();
                continue;
            }
            if (!s[i].is_known()) continue;
            if (dims[i].is_known() && dims[i].value() != s[i].value()) return Shape::bottom();
            dims[i] = s[i];
        }
    }
    dims[*a] = total ? Dim::known(*total) : Dim::unknown();
    return Shape::of(std::move(dims));
}

Shape transpose_transfer(const Shape& input, const std::optional<std::vector<std::int64_t>>& perm) {
    if (input.is_bottom()) return Shape::bottom();
    if (!perm) {
        if (input.rank_unknown()) return input;
        std::vector<Dim> dims(input.dims().rbegin(), input.dims().rend());
        return Shape::of(std::move(dims));
    }
    const std::size_t n = perm->size();
    std::vector<bool> seen(n, false);
    for (auto p : *perm) {
        if (p < 0 || static_cast<std::size_t>(p) >= n || seen[static_cast<std::size_t>(p)])
            return Shape::bottom();
        seen[static_cast<std::size_t>(p)] = true;
    }
    if (input.rank_unknown()) return Shape::of(std::vector<Dim>(n, Dim::unknown()));
    if (input.rank() != n) return Shape::bottom();
    std::vector<Dim> dims;
    dims.reserve(n);
    for (auto p : *perm) dims.push_back(input[static_cast<std::size_t>(p)]);
    return Shape::of(std::move(dims));
}

Shape expand_dims_transfer(const Shape& input, std::int64_t axis) {
    if (input.is_bottom()) return Shape::bottom();
    if (input.rank_unknown()) return input;
    const auto a = normalize_axis(axis, input.rank() + 1);
    if (!a) return Shape::bottom();
    std::vector<Dim> dims = input.dims();
    dims.insert(dims.begin() + static_cast<std::ptrdiff_t>(*a), Dim::known(1));
    return Shape::of(std::move(dims));
}

Shape squeeze_transfer(const Shape& input, const std::optional<std::vector<std::int64_t>>& axes) {
    if (input.is_bottom()) return Shape::bottom();
    if (input.rank_unknown()) return input;
    std::vector<Dim> dims;
    if (!axes) {
        // An unknown extent might be 1, so the output rank is undetermined.
        if (!input.fully_known()) return Shape::unknown_rank();
        for (const auto& d : input.dims())
            if (d.value() != 1) dims.push_back(d);
        return Shape::of(std::move(dims));
    }
    std::vector<bool> drop(input.rank(), false);
    for (auto axis : *axes) {
        const auto a = normalize_axis(axis, input.rank());
        if (!a || drop[*a]) return Shape::bottom();
        const Dim& d = input[*a];
        if (!d.is_known() || d.value() != 1) return Shape::bottom();
        drop[*a] = true;
    }
    for (std::size_t i = 0; i < input.rank(); ++i)
        if (!drop[i]) dims.push_back(input[i]);
    return Shape::of(std::move(dims));
}

Shape flatten_transfer(const Shape& input) {
    if (input.is_bottom()) return Shape::bottom();
    if (input.rank_unknown()) return Shape::of({Dim::unknown(), Dim::unknown()});
    if (input.rank() == 0) return Shape::bottom();
    std::optional<std::int64_t> rest = 1;
    for (std::size_t i = 1; i < input.rank(); ++i) {
        if (!input[i].is_known()) {
            rest.reset();
            break;
        }
        if (__builtin_mul_overflow(*rest, input[i].value(), &*rest)) return Shape::bottom();
    }
    return Shape::of({input[0], rest ? Dim::known(*rest) : Dim::unknown()});
}

Shape argmax_transfer(const Shape& input, std::int64_t axis) {
    if (input.is_bottom()) return Shape::bottom();
    if (input.rank_unknown()) return input;
    const auto a = normalize_axis(axis, input.rank());
    if (!a) return Shape::bottom();
    // the index of the maximum over an empty axis is undefined
    if (input[*a].is_known() && input[*a].value() == 0) return Shape::bottom();
    std::vector<Dim> dims = input.dims();
    dims.erase(dims.begin() + static_cast<std::ptrdiff_t>(*a));
    return Shape::of(std::move(dims));
}

Shape one_hot_transfer(const Shape& input, std::int64_t depth) {
    if (input.is_bottom() || depth < 0) return Shape::bottom();
    if (input.rank_unknown()) return input;
    std::vector<Dim> dims = input.dims();
    dims.push_back(Dim::known(depth));
    return Shape::of(std::move(dims));
}

Shape set_shape_transfer(const Shape& current, const Shape& reasserted) {
    return shape_meet(current, reasserted);
}

Shape assign_transfer(const Shape& variable, const Shape& value, bool validate) {
    if (variable.is_bottom() || value.is_bottom()) return Shape::bottom();
    return validate ? shape_meet(variable, value) : value;
}

namespace {

Shape source_fn(std::span<const Shape> in, const Attributes&) {
    Shape out = Shape::unknown_rank();
    for (const auto& s : in) out = shape_meet(out, s);
    return out;
}

Shape assign_fn(std::span<const Shape> in, const Attributes& at) {
    if (in.size() != 2) return Shape::bottom();
    return assign_transfer(in[0], in[1], at.validate);
}

Shape set_shape_fn(std::span<const Shape> in, const Attributes&) {
    if (in.size() != 2) return Shape::bottom();
    return set_shape_transfer(in[0], in[1]);
}

Shape reshape_fn(std::span<const Shape> in, const Attributes& at) {
    if (in.size() != 1) return Shape::bottom();
    return reshape_transfer(in[0], at.desired);
}

Shape reduce_fn(std::span<const Shape> in, const Attributes& at) {
    if (in.size() != 1) return Shape::bottom();
    return reduce_transfer(in[0], at.axis, at.keep_dims);
}

Shape matmul_fn(std::span<const Shape> in, const Attributes&) {
    if (in.size() != 2) return Shape::bottom();
    return matmul_transfer(in[0], in[1]);
}

Shape conv2d_fn(std::span<const Shape> in, const Attributes& at) {
    if (in.size() != 2 || !at.strides || !at.padding) return Shape::bottom();
    return conv2d_transfer(in[0], in[1], *at.strides, *at.padding);
}

Shape pool2d_fn(std::span<const Shape> in, const Attributes& at) {
    if (in.size() != 1 || !at.ksize || !at.strides || !at.padding) return Shape::bottom();
    return pool2d_transfer(in[0], *at.ksize, *at.strides, *at.padding);
}

Shape elementwise_fn(std::span<const Shape> in, const Attributes&) {
    if (in.size() != 2) return Shape::bottom();
    return elementwise_transfer(in[0], in[1]);
}

Shape bias_add_fn(std::span<const Shape> in, const Attributes&) {
    if (in.size() != 2) return Shape::bottom();
    return bias_add_transfer(in[0], in[1]);
}

Shape identity_fn(std::span<const Shape> in, const Attributes&) {
    if (in.size() != 1) return Shape::bottom();
    return identity_transfer(in[0]);
}

Shape transpose_fn(std::span<const Shape> in, const Attributes& at) {
    if (in.size() != 1) return Shape::bottom();
    return transpose_transfer(in[0], at.perm);
}

Shape concat_fn(std::span<const Shape> in, const Attributes& at) {
    if (!at.axis) return Shape::bottom();
    return concat_transfer(in, *at.axis);
}

Shape expand_dims_fn(std::span<const Shape> in, const Attributes& at) {
    if (in.size() != 1 || !at.axis) return Shape::bottom();
    return expand_dims_transfer(in[0], *at.axis);
}

Shape squeeze_fn(std::span<const Shape> in, const Attributes& at) {
    if (in.size() != 1) return Shape::bottom();
    return squeeze_transfer(in[0], at.axes);
}

Shape argmax_fn(std::span<const Shape> in, const Attributes& at) {
    if (in.size() != 1) return Shape::bottom();
    return argmax_transfer(in[0], at.axis.value_or(0));
}

Shape one_hot_fn(std::span<const Shape> in, const Attributes& at) {
    if (in.size() != 1 || !at.depth) return Shape::bottom();
    return one_hot_transfer(in[0], *at.depth);
}

Shape flatten_fn(std::span<const Shape> in, const Attributes&) {
    if (in.size() != 1) return Shape::bottom();
    return flatten_transfer(in[0]);
}

}  // namespace

TransferFn transfer_for(OpKind kind) {
    switch (op_family(kind)) {
    case OpFamily::Source: return source_fn;
    case OpFamily::Assign: return assign_fn;
    case OpFamily::SetShape: return set_shape_fn;
    case OpFamily::Reshape: return reshape_fn;
    case OpFamily::Reduce: return reduce_fn;
    case OpFamily::MatMul: return matmul_fn;
    case OpFamily::Conv2D: return conv2d_fn;
    case OpFamily::Pool2D: return pool2d_fn;
    case OpFamily::Elementwise: return elementwise_fn;
    case OpFamily::BiasAdd: return bias_add_fn;
    case OpFamily::Identity: return identity_fn;
    case OpFamily::Transpose: return transpose_fn;
    case OpFamily::Concat: return concat_fn;
    case OpFamily::ExpandDims: return expand_dims_fn;
    case OpFamily::Squeeze: return squeeze_fn;
    case OpFamily::ArgMax: return argmax_fn;
    case OpFamily::OneHot: return one_hot_fn;
    case OpFamily::Flatten: return flatten_fn;
    }
    return identity_fn;
}

}  // namespace shapeprobe
