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

#include "random_program.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <numeric>
#include <optional>

namespace shapeprobe::testing {
namespace {

using oracle::ConcreteTensor;
using oracle::Extents;

constexpr std::int64_t kMaxElements = 4096;

constexpr std::array kGrowOps = {
    OpKind::Reshape,  OpKind::ReduceMean, OpKind::ReduceSum, OpKind::ReduceMax, OpKind::MatMul,
    OpKind::Conv2D,   OpKind::MaxPool,    OpKind::AvgPool,   OpKind::Add,       OpKind::Sub,
    OpKind::Mul,      OpKind::Div,        OpKind::BiasAdd,   OpKind::Relu,      OpKind::Dropout,
    OpKind::Tanh,     OpKind::Sigmoid,    OpKind::Softmax,   OpKind::Cast,      OpKind::Identity,
    OpKind::Transpose, OpKind::Concat,    OpKind::ExpandDims, OpKind::Squeeze,  OpKind::ArgMax,
    OpKind::OneHot,   OpKind::Flatten,    OpKind::SetShape,  OpKind::Assign,
};

std::int64_t count_of(const Extents& e) {
    std::int64_t n = 1;
    for (auto d : e) n *= d;
    return n;
}

struct Proposal {
    std::vector<NodeSpec> aux;  // fresh variables or constants feeding `node`
    std::vector<Extents> aux_ref;
    NodeSpec node;
};

class Builder {
public:
    Builder(std::mt19937_64& rng, const GeneratorOptions& options) : rng_(rng), options_(options) {}

    RandomGraph build() {
        const auto n_placeholders = uniform(1, 3);
        for (std::int64_t i = 0; i < n_placeholders; ++i) add_placeholder();

        while (nodes_.size() < options_.max_nodes) {
            const bool want_compatible = chance(options_.compatible_rate);
            std::optional<Proposal> chosen;
            for (int attempt = 0; attempt < 12; ++attempt) {
                auto p = propose(kGrowOps[pick(kGrowOps.size())]);
                if (!p || nodes_.size() + p->aux.size() + 1 > options_.max_nodes) continue;
                const bool ok = compatible(*p).has_value();
                chosen = std::move(p);
                if (ok || !want_compatible) break;
            }
            if (!chosen) break;
            commit(std::move(*chosen));
        }

        RandomGraph g;
        g.nodes = nodes_;
        g.placeholders = placeholders_;
        g.reference = source_ref_;
        g.fetches.push_back(nodes_.back().id);
        if (nodes_.size() > 2 && chance(0.5)) {
            const auto& extra = nodes_[pick(nodes_.size())].id;
            if (extra != g.fetches.front()) g.fetches.push_back(extra);
        }
        return g;
    }

private:
    std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
    }
    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(n) - 1)); }
    bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

    std::string fresh(char prefix) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%c%02d", prefix, counter_++);
        return buf;
    }

    Extents random_extents(std::int64_t min_rank, std::int64_t max_rank) {
        Extents e(static_cast<std::size_t>(uniform(min_rank, max_rank)));
        for (auto& d : e) d = uniform(1, 6);
        return e;
    }

    void add_placeholder() {
        NodeSpec n;
        n.id = fresh('p');
        n.kind = OpKind::Placeholder;
        const auto e = random_extents(1, 4);
        if (options_.mode == ShapeMode::PartlyKnown && chance(0.15)) {
            n.shape = Shape::unknown_rank();
        } else {
            std::vector<Dim> dims;
            for (auto d : e)
                dims.push_back(options_.mode == ShapeMode::PartlyKnown && chance(0.4) ? Dim::unknown() : Dim::known(d));
            n.shape = Shape::of(std::move(dims));
        }
        placeholders_.push_back(n.id);
        source_ref_[n.id] = e;
        nodes_.push_back(std::move(n));
        ref_.push_back(e);
    }

    // Prefer recent nodes so chains get deep.
    std::optional<std::size_t> pick_input() {
        std::vector<std::size_t> live;
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (ref_[i]) live.push_back(i);
        if (live.empty()) return std::nullopt;
        if (chance(0.7)) {
            const auto from = live.size() > 6 ? live.size() - 6 : 0;
            return live[from + pick(live.size() - from)];
        }
        return live[pick(live.size())];
    }

    NodeSpec source(OpKind kind, const Extents& e, Proposal& p) {
        NodeSpec s;
        s.id = fresh(kind == OpKind::Variable ? 'v' : 'c');
        s.kind = kind;
        s.shape = Shape::from_extents(e);
        p.aux.push_back(s);
        p.aux_ref.push_back(e);
        return s;
    }

    std::optional<Proposal> propose(OpKind kind) {
        const auto xi = pick_input();
        if (!xi) return std::nullopt;
        const Extents& e = *ref_[*xi];
        const auto r = static_cast<std::int64_t>(e.size());
        Proposal p;
        NodeSpec& n = p.node;
        n.kind = kind;
        n.inputs = {nodes_[*xi].id};

        switch (op_family(kind)) {
        case OpFamily::Reshape: {
            std::vector<std::int64_t> desired;
            if (chance(0.8)) {
                auto rest = count_of(e);
                const auto rank = uniform(1, 4);
                for (std::int64_t i = 0; i + 1 < rank; ++i) {
                    std::vector<std::int64_t> divisors;
                    for (std::int64_t d = 1; d <= rest; ++d)
                        if (rest % d == 0) divisors.push_back(d);
                    desired.push_back(divisors[pick(divisors.size())]);
                    rest /= desired.back();
                }
                desired.push_back(rest);
                std::shuffle(desired.begin(), desired.end(), rng_);
            } else {
                for (auto d : random_extents(1, 3)) desired.push_back(d);
            }
            if (chance(0.5)) desired[pick(desired.size())] = -1;
            n.attrs.desired = DesiredShape::from_ints(desired);
            break;
        }
        case OpFamily::Reduce:
            if (chance(0.7)) n.attrs.axis = uniform(-r - 1, r);
            n.attrs.keep_dims = chance(0.3);
            break;
        case OpFamily::MatMul: {
            const auto k = r == 2 && chance(0.85) ? e[1] : uniform(1, 6);
            if (r == 2 && e[0] == e[1] && chance(0.3)) {
                n.inputs.push_back(nodes_[*xi].id);
            } else {
                n.inputs.push_back(source(OpKind::Variable, {k, uniform(1, 6)}, p).id);
            }
            break;
        }
        case OpFamily::Conv2D: {
            const auto cin = r == 4 && chance(0.85) ? e[3] : uniform(1, 4);
            n.inputs.push_back(source(OpKind::Variable, {uniform(1, 3), uniform(1, 3), cin, uniform(1, 4)}, p).id);
            n.attrs.strides = std::array<std::int64_t, 4>{1, uniform(1, 2), uniform(1, 2), 1};
            n.attrs.padding = chance(0.5) ? Padding::Same : Padding::Valid;
            break;
        }
        case OpFamily::Pool2D:
            n.attrs.ksize = std::array<std::int64_t, 4>{1, uniform(1, 3), uniform(1, 3), 1};
            n.attrs.strides = std::array<std::int64_t, 4>{1, uniform(1, 2), uniform(1, 2), 1};
            n.attrs.padding = chance(0.5) ? Padding::Same : Padding::Valid;
            break;
        case OpFamily::Elementwise: {
            if (chance(0.35)) {
                const auto yi = pick_input();
                n.inputs.push_back(nodes_[*yi].id);
            } else {
                Extents suffix(e.end() - uniform(0, r), e.end());
                for (auto& d : suffix)
                    if (chance(0.25)) d = chance(0.8) ? 1 : uniform(1, 6);
                const bool swap = chance(0.3);
                n.inputs.push_back(source(chance(0.5) ? OpKind::Constant : OpKind::Variable, suffix, p).id);
                if (swap) std::swap(n.inputs[0], n.inputs[1]);
            }
            break;
        }
        case OpFamily::BiasAdd: {
            const auto last = r > 0 && chance(0.85) ? e.back() : uniform(1, 6);
            n.inputs.push_back(source(OpKind::Variable, {last}, p).id);
            break;
        }
        case OpFamily::Identity: break;
        case OpFamily::Transpose:
            if (chance(0.7)) {
                std::vector<std::int64_t> perm(e.size());
                std::iota(perm.begin(), perm.end(), 0);
                std::shuffle(perm.begin(), perm.end(), rng_);
                if (chance(0.1) && !perm.empty()) perm.push_back(0);
                n.attrs.perm = perm;
            }
            break;
        case OpFamily::Concat: {
            const auto axis = r > 0 ? uniform(-r, r - 1) : 0;
            n.attrs.axis = chance(0.9) ? axis : uniform(-4, 4);
            const auto extra = uniform(0, 2);
            for (std::int64_t i = 0; i < extra; ++i) {
                if (chance(0.3)) {
                    n.inputs.push_back(nodes_[*xi].id);
                    continue;
                }
                Extents other = e;
                if (!other.empty()) other[static_cast<std::size_t>(axis < 0 ? axis + r : axis)] = uniform(1, 6);
                if (chance(0.1) && !other.empty()) other[pick(other.size())] = uniform(1, 6);
                n.inputs.push_back(source(OpKind::Variable, other, p).id);
            }
            break;
        }
        case OpFamily::ExpandDims: n.attrs.axis = uniform(-r - 2, r + 1); break;
        case OpFamily::Squeeze:
            if (chance(0.6)) {
                std::vector<std::int64_t> axes;
                for (std::int64_t i = 0; i < r; ++i)
                    if ((e[static_cast<std::size_t>(i)] == 1 && chance(0.7)) || chance(0.05))
                        axes.push_back(chance(0.5) ? i : i - r);
                n.attrs.axes = axes;
            }
            break;
        case OpFamily::ArgMax:
            if (chance(0.8)) n.attrs.axis = uniform(-r - 1, r);
            break;
        case OpFamily::OneHot: n.attrs.depth = uniform(1, 5); break;
        case OpFamily::Flatten: break;
        case OpFamily::SetShape: {
            std::vector<Dim> dims;
            for (auto d : e) dims.push_back(chance(0.5) ? Dim::unknown() : Dim::known(d));
            if (chance(0.15) && !dims.empty()) dims[pick(dims.size())] = Dim::known(uniform(1, 6));
            n.shape = chance(0.1) ? Shape::unknown_rank() : Shape::of(std::move(dims));
            break;
        }
        case OpFamily::Assign: {
            std::vector<std::size_t> vars;
            for (std::size_t i = 0; i < nodes_.size(); ++i)
                if (nodes_[i].kind == OpKind::Variable) vars.push_back(i);
            std::string var;
            if (!vars.empty() && chance(0.6)) {
                var = nodes_[vars[pick(vars.size())]].id;
            } else {
                var = source(OpKind::Variable, chance(0.7) ? e : random_extents(0, 3), p).id;
            }
            n.inputs.insert(n.inputs.begin(), var);
            n.attrs.validate = chance(0.5);
            break;
        }
        case OpFamily::Source: return std::nullopt;
        }
        return p;
    }

    const Extents* extents_of(const Proposal& p, const std::string& id) const {
        for (std::size_t i = 0; i < p.aux.size(); ++i)
            if (p.aux[i].id == id) return &p.aux_ref[i];
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (nodes_[i].id == id) return ref_[i] ? &*ref_[i] : nullptr;
        return nullptr;
    }

    // Output extents when the op runs on the reference shapes, nullopt otherwise.
    std::optional<Extents> compatible(const Proposal& p) const {
        std::vector<ConcreteTensor> storage;
        storage.reserve(p.node.inputs.size());
        for (const auto& id : p.node.inputs) {
            const auto* e = extents_of(p, id);
            if (!e) return std::nullopt;
            storage.push_back(ConcreteTensor::zeros(*e));
        }
        switch (p.node.kind) {
        case OpKind::SetShape:
            if (!concretizes(*p.node.shape, storage[0].shape)) return std::nullopt;
            return storage[0].shape;
        case OpKind::Assign:
            if (p.node.attrs.validate && storage[0].shape != storage[1].shape) return std::nullopt;
            return storage[1].shape;
        default: break;
        }
        std::vector<const ConcreteTensor*> args;
        for (const auto& t : storage) args.push_back(&t);
        try {
            auto out = oracle::execute(p.node.kind, args, p.node.attrs);
            if (out.shape.size() > 5 || count_of(out.shape) > kMaxElements) return std::nullopt;
            return out.shape;
        } catch (const oracle::ConcreteShapeError&) {
            return std::nullopt;
        }
    }

    void commit(Proposal p) {
        auto out = compatible(p);
        for (std::size_t i = 0; i < p.aux.size(); ++i) {
            source_ref_[p.aux[i].id] = p.aux_ref[i];
            nodes_.push_back(std::move(p.aux[i]));
            ref_.push_back(p.aux_ref[i]);
        }
        p.node.id = fresh('n');
        nodes_.push_back(std::move(p.node));
        ref_.push_back(std::move(out));
    }

    std::mt19937_64& rng_;
    GeneratorOptions options_;
    std::vector<NodeSpec> nodes_;
    std::vector<std::optional<Extents>> ref_;
    std::map<std::string, Extents> source_ref_;
    std::vector<std::string> placeholders_;
    int counter_ = 0;
};

}  // namespace

RandomGraph random_graph(std::mt19937_64& rng, const GeneratorOptions& options) {
    return Builder(rng, options).build();
}

ProgramIR random_program(const RandomGraph& graph, std::mt19937_64& rng, ShapeMode mode) {
    auto uniform = [&](std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
    };
    auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };

    RunPlan plan;
    plan.graph = "main";
    plan.fetches = graph.fetches;
    plan.repeat = uniform(1, 3);
    const auto n_feeds = uniform(1, 2);
    for (std::int64_t f = 0; f < n_feeds; ++f) {
        FeedSet feed;
        for (const auto& id : graph.placeholders) {
            const auto& node = *std::find_if(graph.nodes.begin(), graph.nodes.end(),
                                             [&](const NodeSpec& n) { return n.id == id; });
            Extents e = graph.reference.at(id);
            if (mode == ShapeMode::PartlyKnown) {
                if (node.shape->rank_unknown()) {
                    if (chance(0.2)) {
                        e.assign(static_cast<std::size_t>(uniform(1, 4)), 1);
                        for (auto& d : e) d = uniform(1, 6);
                    }
                } else {
                    for (std::size_t i = 0; i < e.size(); ++i)
                        if (!(*node.shape)[i].is_known() && chance(0.35)) e[i] = uniform(1, 6);
                }
            }
            if (chance(0.1) && !e.empty()) e[static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(e.size()) - 1))] = uniform(1, 6);
            if (count_of(e) > kMaxElements) e = graph.reference.at(id);
            feed.bindings[id] = Shape::from_extents(e);
        }
        plan.feeds.push_back(std::move(feed));
    }

    ProgramIR ir;
    ir.graphs["main"] = build_graph(graph.nodes);
    ir.runs.push_back(std::move(plan));
    return ir;
}

}  // namespace shapeprobe::testing
