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

#include "shapeprobe/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "json.hpp"

namespace shapeprobe::oracle {

namespace {

constexpr std::int64_t kMaxElements = std::int64_t{1} << 30;

[[noreturn]] void fail(const std::string& msg) { throw ConcreteShapeError(msg); }

std::string str(const Extents& e) {
    std::string s = "[";
    for (std::size_t i = 0; i < e.size(); ++i) s += (i ? "," : "") + std::to_string(e[i]);
    return s + "]";
}

std::int64_t numel(const Extents& shape) {
    std::int64_t n = 1;
    for (auto d : shape)
        if (__builtin_mul_overflow(n, d, &n)) fail("element count of " + str(shape) + " overflows");
    return n;
}

Extents strides_of(const Extents& shape) {
    Extents s(shape.size(), 1);
    for (std::size_t i = shape.size(); i-- > 1;) s[i - 1] = s[i] * shape[i];
    return s;
}

// Visits every multi-index of `shape` in row-major order.
template <typename F>
void for_each_index(const Extents& shape, F&& f) {
    const std::int64_t total = numel(shape);
    Extents idx(shape.size(), 0);
    for (std::int64_t flat = 0; flat < total; ++flat) {
        f(idx, flat);
        for (std::size_t a = shape.size(); a-- > 0;) {
            if (++idx[a] < shape[a]) break;
            idx[a] = 0;
        }
    }
}

std::int64_t offset(const Extents& idx, const Extents& strides) {
    std::int64_t o = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) o += idx[i] * strides[i];
    return o;
}

std::size_t resolve_axis(std::int64_t axis, std::size_t rank, const char* what) {
    const auto r = static_cast<std::int64_t>(rank);
    if (axis < -r || axis >= r)
        fail(std::string(what) + ": axis " + std::to_string(axis) + " out of range for rank " +
             std::to_string(rank));
    return static_cast<std::size_t>(axis < 0 ? axis + r : axis);
}

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
    return h;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return splitmix(a ^ splitmix(b)); }

const ConcreteTensor& arg(std::span<const ConcreteTensor* const> in, std::size_t i, const char* op) {
    if (i >= in.size()) fail(std::string(op) + ": missing input");
    return *in[i];
}

// Number of window positions along one axis, found by sliding the window.
// VALID windows must fit entirely; SAME windows start at every stride step
// inside the input and are padded as needed.
struct WindowAxis {
    std::int64_t count = 0;
    std::int64_t pad_before = 0;
};

WindowAxis slide(std::int64_t in, std::int64_t k, std::int64_t stride, Padding padding, const char* op) {
    WindowAxis w;
    if (padding == Padding::Valid) {
        for (std::int64_t start = 0; start + k <= in; start += stride) ++w.count;
        if (w.count == 0) fail(std::string(op) + ": window " + std::to_string(k) + " larger than input " + std::to_string(in));
        return w;
    }
    for (std::int64_t start = 0; start < in; start += stride) ++w.count;
    const std::int64_t needed = w.count == 0 ? 0 : (w.count - 1) * stride + k;
    w.pad_before = std::max<std::int64_t>(needed - in, 0) / 2;
    return w;
}

void check_window(const std::array<std::int64_t, 4>& w, const char* what, const char* op) {
    if (w[0] != 1 || w[3] != 1 || w[1] < 1 || w[2] < 1)
        fail(std::string(op) + ": " + what + " must be [1,h,w,1] with h,w >= 1");
}

ConcreteTensor run_reshape(const ConcreteTensor& x, const Attributes& at) {
    if (!at.desired) fail("reshape: no target shape");
    const std::int64_t count = static_cast<std::int64_t>(x.data.size());
    Extents target;
    std::optional<std::size_t> hole;
    __int128 fixed = 1;
    for (std::size_t i = 0; i < at.desired->entries().size(); ++i) {
        const auto& e = at.desired->entries()[i];
        if (e) {
            target.push_back(*e);
            fixed *= *e;
            if (fixed > kMaxElements * 8) fixed = kMaxElements * 8;
        } else {
            hole = i;
            target.push_back(0);
        }
    }
    if (!hole) {
        if (fixed != count) fail("reshape: cannot reshape " + std::to_string(count) + " elements into " + str(target));
    } else {
        // search for the extent that makes the counts agree
        std::optional<std::int64_t> found;
        for (std::int64_t t = 0; t <= count; ++t) {
            if (fixed * t == count) {
                found = t;
                break;
            }
            if (fixed * t > count) break;
        }
        if (!found) fail("reshape: " + std::to_string(count) + " elements do not fill " + str(target));
        target[*hole] = *found;
    }
    ConcreteTensor out;
    out.shape = std::move(target);
    out.data = x.data;
    return out;
}

ConcreteTensor run_reduce(OpKind kind, const ConcreteTensor& x, const Attributes& at) {
    const std::size_t rank = x.shape.size();
    std::vector<bool> reduced(rank, true);
    if (at.axis) {
        std::fill(reduced.begin(), reduced.end(), false);
        reduced[resolve_axis(*at.axis, rank, "reduce")] = true;
    }
    Extents out_shape;
    Extents kept;  // full-rank shape with reduced axes set to 1
    for (std::size_t i = 0; i < rank; ++i) {
        kept.push_back(reduced[i] ? 1 : x.shape[i]);
        if (!reduced[i] || at.keep_dims) out_shape.push_back(kept.back());
    }
    const float init = kind == OpKind::ReduceMax ? -std::numeric_limits<float>::infinity() : 0.0f;
    std::vector<float> acc(static_cast<std::size_t>(numel(kept)), init);
    std::vector<std::int64_t> counts(acc.size(), 0);
    const Extents kept_strides = strides_of(kept);
    for_each_index(x.shape, [&](const Extents& idx, std::int64_t flat) {
        std::int64_t o = 0;
        for (std::size_t i = 0; i < rank; ++i) o += (reduced[i] ? 0 : idx[i]) * kept_strides[i];
        const float v = x.data[static_cast<std::size_t>(flat)];
        auto& a = acc[static_cast<std::size_t>(o)];
        a = kind == OpKind::ReduceMax ? std::max(a, v) : a + v;
        ++counts[static_cast<std::size_t>(o)];
    });
    if (kind == OpKind::ReduceMean)
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = counts[i] ? acc[i] / counts[i] : NAN;
    return {std::move(out_shape), std::move(acc)};
}

ConcreteTensor run_matmul(const ConcreteTensor& a, const ConcreteTensor& b) {
    if (a.shape.size() != 2 || b.shape.size() != 2)
        fail("matmul: operands must be matrices, got " + str(a.shape) + " and " + str(b.shape));
    const auto m = a.shape[0], k = a.shape[1], k2 = b.shape[0], n = b.shape[1];
    if (k != k2) fail("matmul: inner dimensions " + std::to_string(k) + " and " + std::to_string(k2) + " differ");
    auto out = ConcreteTensor::zeros({m, n});
    for (std::int64_t i = 0; i < m; ++i)
        for (std::int64_t j = 0; j < n; ++j) {
            float s = 0;
            for (std::int64_t p = 0; p < k; ++p) s += a.data[i * k + p] * b.data[p * n + j];
            out.data[i * n + j] = s;
        }
    return out;
}

ConcreteTensor run_conv2d(const ConcreteTensor& x, const ConcreteTensor& f, const Attributes& at) {
    if (x.shape.size() != 4) fail("conv2d: input must be rank 4 (NHWC), got " + str(x.shape));
    if (f.shape.size() != 4) fail("conv2d: filter must be rank 4, got " + str(f.shape));
    if (!at.strides || !at.padding) fail("conv2d: missing strides or padding");
    const auto N = x.shape[0], H = x.shape[1], W = x.shape[2], C = x.shape[3];
    const auto KH = f.shape[0], KW = f.shape[1], CI = f.shape[2], CO = f.shape[3];
    if (C != CI) fail("conv2d: input has " + std::to_string(C) + " channels, filter expects " + std::to_string(CI));
    check_window(*at.strides, "strides", "conv2d");
    const auto& s = *at.strides;
    const auto wh = slide(H, KH, s[1], *at.padding, "conv2d");
    const auto ww = slide(W, KW, s[2], *at.padding, "conv2d");
    auto out = ConcreteTensor::zeros({N, wh.count, ww.count, CO});
    for (std::int64_t n = 0; n < N; ++n)
        for (std::int64_t oh = 0; oh < wh.count; ++oh)
            for (std::int64_t ow = 0; ow < ww.count; ++ow)
                for (std::int64_t co = 0; co < CO; ++co) {
                    float acc = 0;
                    for (std::int64_t kh = 0; kh < KH; ++kh) {
                        const auto ih = oh * s[1] + kh - wh.pad_before;
                        if (ih < 0 || ih >= H) continue;
                        for (std::int64_t kw = 0; kw < KW; ++kw) {
                            const auto iw = ow * s[2] + kw - ww.pad_before;
                            if (iw < 0 || iw >= W) continue;
                            for (std::int64_t c = 0; c < C; ++c)
                                acc += x.data[((n * H + ih) * W + iw) * C + c] *
                                       f.data[((kh * KW + kw) * CI + c) * CO + co];
                        }
                    }
                    out.data[((n * wh.count + oh) * ww.count + ow) * CO + co] = acc;
                }
    return out;
}

ConcreteTensor run_pool(OpKind kind, const ConcreteTensor& x, const Attributes& at) {
    const char* op = kind == OpKind::MaxPool ? "max_pool" : "avg_pool";
    if (x.shape.size() != 4) fail(std::string(op) + ": input must be rank 4 (NHWC), got " + str(x.shape));
    if (!at.ksize || !at.strides || !at.padding) fail(std::string(op) + ": missing window parameters");
    const auto N = x.shape[0], H = x.shape[1], W = x.shape[2], C = x.shape[3];
    check_window(*at.ksize, "ksize", op);
    check_window(*at.strides, "strides", op);
    const auto& k = *at.ksize;
    const auto& s = *at.strides;
    const auto wh = slide(H, k[1], s[1], *at.padding, op);
    const auto ww = slide(W, k[2], s[2], *at.padding, op);
    auto out = ConcreteTensor::zeros({N, wh.count, ww.count, C});
    for (std::int64_t n = 0; n < N; ++n)
        for (std::int64_t oh = 0; oh < wh.count; ++oh)
            for (std::int64_t ow = 0; ow < ww.count; ++ow)
                for (std::int64_t c = 0; c < C; ++c) {
                    float best = -std::numeric_limits<float>::infinity();
                    float sum = 0;
                    std::int64_t cnt = 0;
                    for (std::int64_t kh = 0; kh < k[1]; ++kh) {
                        const auto ih = oh * s[1] + kh - wh.pad_before;
                        if (ih < 0 || ih >= H) continue;
                        for (std::int64_t kw = 0; kw < k[2]; ++kw) {
                            const auto iw = ow * s[2] + kw - ww.pad_before;
                            if (iw < 0 || iw >= W) continue;
                            const float v = x.data[((n * H + ih) * W + iw) * C + c];
                            best = std::max(best, v);
                            sum += v;
                            ++cnt;
                        }
                    }
                    out.data[((n * wh.count + oh) * ww.count + ow) * C + c] =
                        kind == OpKind::MaxPool ? best : (cnt ? sum / cnt : 0.0f);
                }
    return out;
}

ConcreteTensor run_binary(OpKind kind, const ConcreteTensor& a, const ConcreteTensor& b) {
    const std::size_t rank = std::max(a.shape.size(), b.shape.size());
    Extents ea(rank, 1), eb(rank, 1), out_shape(rank);
    std::copy(a.shape.begin(), a.shape.end(), ea.begin() + static_cast<std::ptrdiff_t>(rank - a.shape.size()));
    std::copy(b.shape.begin(), b.shape.end(), eb.begin() + static_cast<std::ptrdiff_t>(rank - b.shape.size()));
    for (std::size_t i = 0; i < rank; ++i) {
        if (ea[i] == eb[i])
            out_shape[i] = ea[i];
        else if (ea[i] == 1)
            out_shape[i] = eb[i];
        else if (eb[i] == 1)
            out_shape[i] = ea[i];
        else
            fail(std::string(op_name(kind)) + ": cannot broadcast " + str(a.shape) + " with " + str(b.shape));
    }
    const Extents sa = strides_of(ea), sb = strides_of(eb);
    auto out = ConcreteTensor::zeros(out_shape);
    for_each_index(out_shape, [&](const Extents& idx, std::int64_t flat) {
        std::int64_t oa = 0, ob = 0;
        for (std::size_t i = 0; i < rank; ++i) {
            if (ea[i] != 1) oa += idx[i] * sa[i];
            if (eb[i] != 1) ob += idx[i] * sb[i];
        }
        const float x = a.data[static_cast<std::size_t>(oa)], y = b.data[static_cast<std::size_t>(ob)];
        float r = 0;
        switch (kind) {
        case OpKind::Add: r = x + y; break;
        case OpKind::Sub: r = x - y; break;
        case OpKind::Mul: r = x * y; break;
        default: r = y != 0 ? x / y : 0.0f; break;
        }
        out.data[static_cast<std::size_t>(flat)] = r;
    });
    return out;
}

ConcreteTensor run_bias_add(const ConcreteTensor& v, const ConcreteTensor& b) {
    if (v.shape.size() < 2) fail("bias_add: value must have rank >= 2, got " + str(v.shape));
    if (b.shape.size() != 1) fail("bias_add: bias must be rank 1, got " + str(b.shape));
    if (v.shape.back() != b.shape[0])
        fail("bias_add: bias length " + std::to_string(b.shape[0]) + " does not match last dimension " +
             std::to_string(v.shape.back()));
    ConcreteTensor out = v;
    const auto n = b.shape[0];
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i % static_cast<std::size_t>(n)];
    return out;
}

ConcreteTensor run_unary(OpKind kind, const ConcreteTensor& x) {
    ConcreteTensor out = x;
    switch (kind) {
    case OpKind::Relu:
        for (auto& v : out.data) v = v > 0 ? v : 0;
        break;
    case OpKind::Tanh:
        for (auto& v : out.data) v = std::tanh(v);
        break;
    case OpKind::Sigmoid:
        for (auto& v : out.data) v = 1.0f / (1.0f + std::exp(-v));
        break;
    case OpKind::Softmax: {
        const std::int64_t row = x.shape.empty() ? 1 : x.shape.back();
        if (row == 0) break;
        for (std::size_t start = 0; start < out.data.size(); start += static_cast<std::size_t>(row)) {
            float z = 0;
            for (std::int64_t j = 0; j < row; ++j) z += std::exp(out.data[start + j]);
            for (std::int64_t j = 0; j < row; ++j) out.data[start + j] = std::exp(out.data[start + j]) / z;
        }
        break;
    }
    default: break;  // dropout at keep probability 1, cast, identity
    }
    return out;
}

ConcreteTensor run_transpose(const ConcreteTensor& x, const Attributes& at) {
    const std::size_t rank = x.shape.size();
    Extents perm;
    if (at.perm) {
        perm = *at.perm;
        if (perm.size() != rank) fail("transpose: perm " + str(perm) + " does not match rank " + std::to_string(rank));
        Extents sorted = perm;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < rank; ++i)
            if (sorted[i] != static_cast<std::int64_t>(i)) fail("transpose: " + str(perm) + " is not a permutation");
    } else {
        for (std::size_t i = rank; i-- > 0;) perm.push_back(static_cast<std::int64_t>(i));
    }
    Extents out_shape(rank);
    for (std::size_t i = 0; i < rank; ++i) out_shape[i] = x.shape[static_cast<std::size_t>(perm[i])];
    const Extents in_strides = strides_of(x.shape);
    auto out = ConcreteTensor::zeros(out_shape);
    for_each_index(out_shape, [&](const Extents& idx, std::int64_t flat) {
        std::int64_t o = 0;
        for (std::size_t i = 0; i < rank; ++i) o += idx[i] * in_strides[static_cast<std::size_t>(perm[i])];
        out.data[static_cast<std::size_t>(flat)] = x.data[static_cast<std::size_t>(o)];
    });
    return out;
}

ConcreteTensor run_concat(std::span<const ConcreteTensor* const> in, const Attributes& at) {
    if (in.empty()) fail("concat: no inputs");
    if (!at.axis) fail("concat: missing axis");
    const Extents& first = in[0]->shape;
    const std::size_t rank = first.size();
    const std::size_t axis = resolve_axis(*at.axis, rank, "concat");
    Extents out_shape = first;
    out_shape[axis] = 0;
    for (const auto* t : in) {
        if (t->shape.size() != rank) fail("concat: rank mismatch " + str(first) + " vs " + str(t->shape));
        for (std::size_t i = 0; i < rank; ++i)
            if (i != axis && t->shape[i] != first[i])
                fail("concat: dimension " + std::to_string(i) + " differs: " + str(first) + " vs " + str(t->shape));
        out_shape[axis] += t->shape[axis];
    }
    auto out = ConcreteTensor::zeros(out_shape);
    const Extents out_strides = strides_of(out_shape);
    std::int64_t base = 0;
    for (const auto* t : in) {
        for_each_index(t->shape, [&](const Extents& idx, std::int64_t flat) {
            Extents o = idx;
            o[axis] += base;
            out.data[static_cast<std::size_t>(offset(o, out_strides))] = t->data[static_cast<std::size_t>(flat)];
        });
        base += t->shape[axis];
    }
    return out;
}

ConcreteTensor run_squeeze(const ConcreteTensor& x, const Attributes& at) {
    const std::size_t rank = x.shape.size();
    std::vector<bool> drop(rank, false);
    if (!at.axes) {
        for (std::size_t i = 0; i < rank; ++i) drop[i] = x.shape[i] == 1;
    } else {
        for (auto a : *at.axes) {
            const auto i = resolve_axis(a, rank, "squeeze");
            if (drop[i]) fail("squeeze: axis " + std::to_string(a) + " listed twice");
            if (x.shape[i] != 1) fail("squeeze: dimension " + std::to_string(i) + " of " + str(x.shape) + " is not 1");
            drop[i] = true;
        }
    }
    ConcreteTensor out;
    for (std::size_t i = 0; i < rank; ++i)
        if (!drop[i]) out.shape.push_back(x.shape[i]);
    out.data = x.data;
    return out;
}

ConcreteTensor run_argmax(const ConcreteTensor& x, const Attributes& at) {
    const std::size_t rank = x.shape.size();
    const std::size_t axis = resolve_axis(at.axis.value_or(0), rank, "argmax");
    if (x.shape[axis] == 0) fail("argmax: reduction axis " + std::to_string(axis) + " is empty");
    Extents out_shape;
    for (std::size_t i = 0; i < rank; ++i)
        if (i != axis) out_shape.push_back(x.shape[i]);
    auto out = ConcreteTensor::zeros(out_shape);
    std::vector<float> best(out.data.size(), -std::numeric_limits<float>::infinity());
    const Extents out_strides = strides_of(out_shape);
    for_each_index(x.shape, [&](const Extents& idx, std::int64_t flat) {
        std::int64_t o = 0;
        for (std::size_t i = 0, j = 0; i < rank; ++i)
            if (i != axis) o += idx[i] * out_strides[j++];
        const float v = x.data[static_cast<std::size_t>(flat)];
        if (v > best[static_cast<std::size_t>(o)]) {
            best[static_cast<std::size_t>(o)] = v;
            out.data[static_cast<std::size_t>(o)] = static_cast<float>(idx[axis]);
        }
    });
    return out;
}

ConcreteTensor run_one_hot(const ConcreteTensor& x, const Attributes& at) {
    if (!at.depth || *at.depth < 0) fail("one_hot: depth must be non-negative");
    const auto depth = *at.depth;
    Extents out_shape = x.shape;
    out_shape.push_back(depth);
    auto out = ConcreteTensor::zeros(out_shape);
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        const auto hot = static_cast<std::int64_t>(x.data[i]);
        if (hot >= 0 && hot < depth) out.data[i * static_cast<std::size_t>(depth) + static_cast<std::size_t>(hot)] = 1;
    }
    return out;
}

ConcreteTensor run_flatten(const ConcreteTensor& x) {
    if (x.shape.empty()) fail("flatten: input must have rank >= 1");
    ConcreteTensor out;
    const std::int64_t rest = x.shape[0] == 0 ? numel(Extents(x.shape.begin() + 1, x.shape.end()))
                                              : static_cast<std::int64_t>(x.data.size()) / x.shape[0];
    out.shape = {x.shape[0], rest};
    out.data = x.data;
    return out;
}

ConcreteTensor run_expand_dims(const ConcreteTensor& x, const Attributes& at) {
    if (!at.axis) fail("expand_dims: missing axis");
    const std::size_t axis = resolve_axis(*at.axis, x.shape.size() + 1, "expand_dims");
    ConcreteTensor out;
    out.shape = x.shape;
    out.shape.insert(out.shape.begin() + static_cast<std::ptrdiff_t>(axis), 1);
    out.data = x.data;
    return out;
}

// Concrete shape of fed data: the feed literal, with gaps filled from the
// declaration where it is more specific, then sampled.
Extents feed_extents(const Shape& declared, const Shape& fed, std::uint64_t seed) {
    Shape hint = fed;
    if (fed.rank_unknown()) {
        hint = declared;
    } else if (declared.rank_known() && declared.rank() == fed.rank()) {
        std::vector<Dim> dims = fed.dims();
        for (std::size_t i = 0; i < dims.size(); ++i)
            if (!dims[i].is_known()) dims[i] = declared[i];
        hint = Shape::of(std::move(dims));
    }
    return concretize(hint, seed);
}

void check_declared(const Shape& declared, const Extents& actual, const std::string& what) {
    if (declared.rank_unknown()) return;
    bool ok = declared.rank() == actual.size();
    for (std::size_t i = 0; ok && i < actual.size(); ++i)
        ok = !declared[i].is_known() || declared[i].value() == actual[i];
    if (!ok) fail(what + ": tensor of shape " + str(actual) + " is incompatible with " + declared.to_string());
}

}  // namespace

ConcreteTensor ConcreteTensor::zeros(Extents shape) {
    const auto n = numel(shape);
    if (n > kMaxElements) throw std::length_error("tensor " + str(shape) + " is too large for the oracle");
    ConcreteTensor t;
    t.shape = std::move(shape);
    t.data.assign(static_cast<std::size_t>(n), 0.0f);
    return t;
}

Extents concretize(const Shape& declared, std::uint64_t seed) {
    if (declared.is_bottom()) throw std::invalid_argument("cannot concretize bottom");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> extent(1, 6);
    if (declared.rank_unknown()) {
        std::uniform_int_distribution<std::int64_t> rank(0, 4);
        Extents out(static_cast<std::size_t>(rank(rng)));
        for (auto& d : out) d = extent(rng);
        return out;
    }
    Extents out;
    for (const auto& d : declared.dims()) out.push_back(d.is_known() ? d.value() : extent(rng));
    return out;
}

ConcreteTensor execute(OpKind kind, std::span<const ConcreteTensor* const> in, const Attributes& at) {
    const char* name = op_name(kind).data();
    switch (op_family(kind)) {
    case OpFamily::Reshape: return run_reshape(arg(in, 0, name), at);
    case OpFamily::Reduce: return run_reduce(kind, arg(in, 0, name), at);
    case OpFamily::MatMul: return run_matmul(arg(in, 0, name), arg(in, 1, name));
    case OpFamily::Conv2D: return run_conv2d(arg(in, 0, name), arg(in, 1, name), at);
    case OpFamily::Pool2D: return run_pool(kind, arg(in, 0, name), at);
    case OpFamily::Elementwise: return run_binary(kind, arg(in, 0, name), arg(in, 1, name));
    case OpFamily::BiasAdd: return run_bias_add(arg(in, 0, name), arg(in, 1, name));
    case OpFamily::Identity: return run_unary(kind, arg(in, 0, name));
    case OpFamily::Transpose: return run_transpose(arg(in, 0, name), at);
    case OpFamily::Concat: return run_concat(in, at);
    case OpFamily::ExpandDims: return run_expand_dims(arg(in, 0, name), at);
    case OpFamily::Squeeze: return run_squeeze(arg(in, 0, name), at);
    case OpFamily::ArgMax: return run_argmax(arg(in, 0, name), at);
    case OpFamily::OneHot: return run_one_hot(arg(in, 0, name), at);
    case OpFamily::Flatten: return run_flatten(arg(in, 0, name));
    case OpFamily::Source:
    case OpFamily::Assign:
    case OpFamily::SetShape: break;
    }
    throw std::logic_error(std::string(name) + " is evaluated by the runner");
}

std::vector<ConcreteRunResult> concrete_run(const ProgramIR& ir, std::uint64_t seed, const OracleOptions& options) {
    std::vector<ConcreteRunResult> results;
    for (std::size_t r = 0; r < ir.runs.size(); ++r) {
        const RunPlan& plan = ir.runs[r];
        const ShapeGraph& g = ir.graphs.at(plan.graph);
        const std::uint64_t run_seed = mix(seed, r);
        ConcreteRunResult result;
        result.index = r;
        result.graph = plan.graph;

        // fresh session: variables and constants are materialized once
        std::vector<Extents> source_extents(g.size());
        std::vector<std::optional<ConcreteTensor>> variables(g.size());
        for (std::size_t n = 0; n < g.size(); ++n) {
            const auto& node = g.node(n);
            if (node.kind == OpKind::Constant || node.kind == OpKind::Variable)
                source_extents[n] = concretize(*node.shape, mix(run_seed, fnv1a(node.id)));
            if (node.kind == OpKind::Variable) variables[n] = ConcreteTensor::zeros(source_extents[n]);
        }

        const auto feeds = effective_feeds(plan);
        std::vector<std::vector<std::optional<Extents>>> fed(feeds.size(), std::vector<std::optional<Extents>>(g.size()));
        for (std::size_t f = 0; f < feeds.size(); ++f)
            for (const auto& [id, shape] : feeds[f].bindings) {
                const auto n = *g.index_of(id);
                fed[f][n] = feed_extents(*g.node(n).shape, shape, mix(mix(run_seed, f + 1), fnv1a(id)));
            }

        const auto order = topo_order_indices(g, plan.fetches);
        std::vector<std::size_t> uses(g.size(), 0);
        for (auto n : order)
            for (auto in : g.input_indices(n)) ++uses[in];

        std::int64_t total = plan.repeat * static_cast<std::int64_t>(feeds.size());
        if (options.max_iterations) total = std::min(total, *options.max_iterations);

        for (std::int64_t it = 0; it < total && !result.error; ++it) {
            const std::int64_t iteration = it + 1;
            const std::size_t f = static_cast<std::size_t>(it) % feeds.size();
            ++result.iterations;

            for (auto n : order)
                if (g.node(n).kind == OpKind::Placeholder && !fed[f][n]) {
                    result.error = ConcreteError{g.node(n).id, iteration, "placeholder was not fed"};
                    break;
                }
            if (result.error) break;

            std::vector<std::optional<ConcreteTensor>> values(g.size());
            std::vector<std::size_t> remaining = uses;
            std::vector<NodeExtents> recorded;
            std::vector<const ConcreteTensor*> args;
            for (auto n : order) {
                const auto& node = g.node(n);
                const auto& ins = g.input_indices(n);
                try {
                    ConcreteTensor out;
                    switch (node.kind) {
                    case OpKind::Placeholder:
                        check_declared(*node.shape, *fed[f][n], "placeholder '" + node.id + "'");
                        out = ConcreteTensor::zeros(*fed[f][n]);
                        break;
                    case OpKind::Constant: out = ConcreteTensor::zeros(source_extents[n]); break;
                    case OpKind::Variable: out = *variables[n]; break;
                    case OpKind::SetShape:
                        check_declared(*node.shape, values[ins[0]]->shape, "set_shape '" + node.id + "'");
                        out = *values[ins[0]];
                        break;
                    case OpKind::Assign: {
                        const auto& value = *values[ins[1]];
                        auto& var = variables[ins[0]];
                        if (node.attrs.validate && var->shape != value.shape)
                            fail("assign: value of shape " + str(value.shape) + " does not match variable of shape " +
                                 str(var->shape));
                        var = value;
                        out = value;
                        break;
                    }
                    default:
                        args.clear();
                        for (auto in : ins) args.push_back(&*values[in]);
                        out = execute(node.kind, args, node.attrs);
                    }
                    if (options.record_shapes) recorded.push_back({node.id, out.shape});
                    values[n] = std::move(out);
                } catch (const ConcreteShapeError& e) {
                    result.error = ConcreteError{node.id, iteration, e.what()};
                    break;
                }
                for (auto in : ins)
                    if (--remaining[in] == 0) values[in].reset();
            }
            if (options.record_shapes) result.shapes.push_back(std::move(recorded));
        }
        results.push_back(std::move(result));
    }
    return results;
}

std::string format_oracle_text(const std::vector<ConcreteRunResult>& results) {
    std::ostringstream os;
    for (const auto& r : results) {
        if (!r.shapes.empty())
            for (const auto& n : r.shapes.back())
                os << "run " << r.index << " iteration " << r.iterations << ": " << n.id << " " << str(n.shape) << "\n";
        os << "run " << r.index << " (graph '" << r.graph << "'): ";
        if (r.error)
            os << "concrete error at '" << r.error->node << "' iteration " << r.error->iteration << ": "
               << r.error->message << "\n";
        else
            os << "ok after " << r.iterations << (r.iterations == 1 ? " iteration" : " iterations") << "\n";
    }
    return os.str();
}

std::string format_oracle_json(const std::vector<ConcreteRunResult>& results) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : results) {
        nlohmann::json j{{"index", r.index}, {"graph", r.graph}, {"iterations", r.iterations}, {"status", r.ok() ? "ok" : "error"}};
        if (r.error) j["error"] = {{"node", r.error->node}, {"iteration", r.error->iteration}, {"message", r.error->message}};
        if (!r.shapes.empty()) {
            nlohmann::json shapes = nlohmann::json::object();
            for (const auto& n : r.shapes.back()) shapes[n.id] = n.shape;
            j["shapes"] = std::move(shapes);
        }
        runs.push_back(std::move(j));
    }
    return nlohmann::json{{"runs", std::move(runs)}}.dump(2) + "\n";
}

}  // namespace shapeprobe::oracle
