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

#include "shapeprobe/ir.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace shapeprobe {

using nlohmann::json;

IrError::IrError(std::string path, const std::string& message)
    : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

namespace {

std::string key_path(const std::string& base, const std::string& key) { return base + "." + key; }
std::string index_path(const std::string& base, std::size_t i) {
    return base + "[" + std::to_string(i) + "]";
}

[[noreturn]] void schema(const std::string& path, const std::string& msg) { throw SchemaError(path, msg); }

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) schema(path, "expected an object");
}

void require_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) schema(key_path(path, key), "unexpected field");
    }
}

std::int64_t read_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) schema(path, "expected an integer");
    return j.get<std::int64_t>();
}

bool read_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) schema(path, "expected a boolean");
    return j.get<bool>();
}

std::string read_string(const json& j, const std::string& path) {
    if (!j.is_string()) schema(path, "expected a string");
    return j.get<std::string>();
}

std::vector<std::int64_t> read_int_list(const json& j, const std::string& path) {
    if (!j.is_array()) schema(path, "expected a list of integers");
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_int(j[i], index_path(path, i)));
    return out;
}

std::array<std::int64_t, 4> read_window(const json& j, const std::string& path) {
    auto v = read_int_list(j, path);
    if (v.size() != 4) schema(path, "expected exactly 4 entries (NHWC)");
    for (std::size_t i = 0; i < 4; ++i)
        if (v[i] < 1) schema(index_path(path, i), "entries must be >= 1");
    return {v[0], v[1], v[2], v[3]};
}

Shape read_shape(const json& j, const std::string& path) {
    if (j.is_string()) {
        if (j.get<std::string>() != "?") schema(path, "shape string must be \"?\" (unknown rank)");
        return Shape::unknown_rank();
    }
    if (!j.is_array()) schema(path, "expected a shape literal: list of integers/null, or \"?\"");
    std::vector<Dim> dims;
    std::int64_t product = 1;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& d = j[i];
        const auto p = index_path(path, i);
        if (d.is_null()) {
            dims.push_back(Dim::unknown());
            continue;
        }
        const auto n = read_int(d, p);
        if (n < 0 || n > kMaxDim) schema(p, "dimension must be in [0, 2^31-1]");
        if (__builtin_mul_overflow(product, n, &product))
            schema(path, "element count overflows 64 bits");
        dims.push_back(Dim::known(n));
    }
    return Shape::of(std::move(dims));
}

// Shape of a nested list literal; scalars have rank 0.
Shape literal_shape(const json& j, const std::string& path) {
    if (j.is_number() || j.is_boolean()) return Shape::scalar();
    if (!j.is_array()) schema(path, "constant value must be a number or a nested list");
    if (j.empty()) return Shape::of({0});
    const Shape first = literal_shape(j[0], index_path(path, 0));
    for (std::size_t i = 1; i < j.size(); ++i)
        if (literal_shape(j[i], index_path(path, i)) != first) schema(path, "ragged constant value");
    std::vector<Dim> dims{Dim::known(static_cast<std::int64_t>(j.size()))};
    dims.insert(dims.end(), first.dims().begin(), first.dims().end());
    return Shape::of(std::move(dims));
}

Attributes read_attrs(OpKind kind, const json& j, const std::string& path,
                      std::optional<Shape>& value_shape) {
    Attributes a;
    require_object(j, path);
    std::vector<std::string_view> allowed;
    switch (op_family(kind)) {
    case OpFamily::Source:
        if (kind == OpKind::Constant) allowed = {"value"};
        break;
    case OpFamily::Assign: allowed = {"validate"}; break;
    case OpFamily::Reshape: allowed = {"desired"}; break;
    case OpFamily::Reduce: allowed = {"axis", "keep_dims"}; break;
    case OpFamily::Conv2D: allowed = {"strides", "padding"}; break;
    case OpFamily::Pool2D: allowed = {"ksize", "strides", "padding"}; break;
    case OpFamily::Transpose: allowed = {"perm"}; break;
    case OpFamily::Concat:
    case OpFamily::ExpandDims:
    case OpFamily::ArgMax: allowed = {"axis"}; break;
    case OpFamily::Squeeze: allowed = {"axes"}; break;
    case OpFamily::OneHot: allowed = {"depth"}; break;
    default: break;
    }
    for (const auto& [key, v] : j.items()) {
        const auto p = key_path(path, key);
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            schema(p, "attribute not accepted by " + std::string(op_name(kind)));
        if (key == "value") {
            value_shape = literal_shape(v, p);
        } else if (key == "validate") {
            a.validate = read_bool(v, p);
        } else if (key == "desired") {
            try {
                a.desired = DesiredShape::from_ints(read_int_list(v, p));
            } catch (const std::invalid_argument& e) {
                schema(p, e.what());
            }
            std::int64_t product = 1;
            for (const auto& e : a.desired->entries())
                if (e && __builtin_mul_overflow(product, *e, &product))
                    schema(p, "element count overflows 64 bits");
        } else if (key == "axis") {
            a.axis = read_int(v, p);
        } else if (key == "keep_dims") {
            a.keep_dims = read_bool(v, p);
        } else if (key == "strides") {
            a.strides = read_window(v, p);
        } else if (key == "ksize") {
            a.ksize = read_window(v, p);
        } else if (key == "padding") {
            const auto s = read_string(v, p);
            if (s == "SAME")
                a.padding = Padding::Same;
            else if (s == "VALID")
                a.padding = Padding::Valid;
            else
                schema(p, "padding must be \"SAME\" or \"VALID\"");
        } else if (key == "perm") {
            a.perm = read_int_list(v, p);
        } else if (key == "axes") {
            a.axes = read_int_list(v, p);
        } else if (key == "depth") {
            a.depth = read_int(v, p);
        }
    }
    if (auto err = validate_attributes(kind, a)) schema(path, *err);
    return a;
}

NodeSpec read_node(const json& j, const std::string& path) {
    require_object(j, path);
    require_keys(j, path, {"id", "op", "inputs", "attrs", "shape"});
    NodeSpec n;
    if (!j.contains("id")) schema(path, "missing field 'id'");
    n.id = read_string(j["id"], key_path(path, "id"));
    if (n.id.empty()) schema(key_path(path, "id"), "id must not be empty");
    if (!j.contains("op")) schema(path, "missing field 'op'");
    const auto op = read_string(j["op"], key_path(path, "op"));
    const auto kind = op_from_name(op);
    if (!kind) schema(key_path(path, "op"), "unknown op '" + op + "'");
    n.kind = *kind;
    if (j.contains("inputs")) {
        const auto& ins = j["inputs"];
        const auto p = key_path(path, "inputs");
        if (!ins.is_array()) schema(p, "expected a list of node ids");
        for (std::size_t i = 0; i < ins.size(); ++i) n.inputs.push_back(read_string(ins[i], index_path(p, i)));
    }
    std::optional<Shape> value_shape;
    if (j.contains("attrs")) n.attrs = read_attrs(n.kind, j["attrs"], key_path(path, "attrs"), value_shape);
    else if (auto err = validate_attributes(n.kind, n.attrs)) schema(path, *err);
    if (j.contains("shape")) n.shape = read_shape(j["shape"], key_path(path, "shape"));
    if (value_shape) {
        if (n.shape && *n.shape != *value_shape)
            schema(key_path(path, "shape"), "declared shape " + n.shape->to_string() +
                                                " differs from the value's shape " + value_shape->to_string());
        n.shape = value_shape;
    }
    return n;
}

FeedSet read_feed(const json& j, const std::string& path, const ShapeGraph& g) {
    require_object(j, path);
    FeedSet f;
    for (const auto& [key, v] : j.items()) {
        const auto p = key_path(path, key);
        auto idx = g.index_of(key);
        if (!idx) schema(p, "feed names unknown node '" + key + "'");
        if (g.node(*idx).kind != OpKind::Placeholder)
            schema(p, "only placeholders can be fed; '" + key + "' is a " +
                          std::string(op_name(g.node(*idx).kind)));
        f.bindings.emplace(key, read_shape(v, p));
    }
    return f;
}

RunPlan read_run(const json& j, const std::string& path, const std::map<std::string, ShapeGraph>& graphs) {
    require_object(j, path);
    require_keys(j, path, {"graph", "fetches", "feeds", "repeat"});
    RunPlan r;
    if (!j.contains("graph")) schema(path, "missing field 'graph'");
    r.graph = read_string(j["graph"], key_path(path, "graph"));
    auto it = graphs.find(r.graph);
    if (it == graphs.end()) schema(key_path(path, "graph"), "unknown graph '" + r.graph + "'");
    const ShapeGraph& g = it->second;

    if (!j.contains("fetches")) schema(path, "missing field 'fetches'");
    const auto& fetches = j["fetches"];
    const auto fp = key_path(path, "fetches");
    if (!fetches.is_array() || fetches.empty()) schema(fp, "expected a non-empty list of node ids");
    for (std::size_t i = 0; i < fetches.size(); ++i) {
        auto id = read_string(fetches[i], index_path(fp, i));
        if (!g.contains(id)) schema(index_path(fp, i), "unknown node '" + id + "'");
        r.fetches.push_back(std::move(id));
    }
    if (j.contains("feeds")) {
        const auto& feeds = j["feeds"];
        const auto p = key_path(path, "feeds");
        if (!feeds.is_array()) schema(p, "expected a list of feed objects");
        for (std::size_t i = 0; i < feeds.size(); ++i) r.feeds.push_back(read_feed(feeds[i], index_path(p, i), g));
    }
    if (j.contains("repeat")) {
        r.repeat = read_int(j["repeat"], key_path(path, "repeat"));
        if (r.repeat < 1) schema(key_path(path, "repeat"), "repeat must be positive");
    }
    return r;
}

json shape_json(const Shape& s) {
    if (s.rank_unknown()) return "?";
    json arr = json::array();
    for (const auto& d : s.dims()) {
        if (d.is_known())
            arr.push_back(d.value());
        else
            arr.push_back(nullptr);
    }
    return arr;
}

json attrs_json(const Attributes& a) {
    json j = json::object();
    if (a.desired) j["desired"] = a.desired->to_ints();
    if (a.axis) j["axis"] = *a.axis;
    if (a.axes) j["axes"] = *a.axes;
    if (a.keep_dims) j["keep_dims"] = true;
    if (a.ksize) j["ksize"] = *a.ksize;
    if (a.strides) j["strides"] = *a.strides;
    if (a.padding) j["padding"] = std::string(padding_name(*a.padding));
    if (a.perm) j["perm"] = *a.perm;
    if (a.depth) j["depth"] = *a.depth;
    if (!a.validate) j["validate"] = false;
    return j;
}

}  // namespace

ProgramIR parse_ir(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError("", std::string("malformed JSON: ") + e.what());
    }
    const std::string path = "$";
    require_object(root, path);
    require_keys(root, path, {"version", "graphs", "runs"});

    ProgramIR ir;
    if (!root.contains("version")) schema(path, "missing field 'version'");
    const auto version = read_int(root["version"], "$.version");
    if (version != 1) schema("$.version", "unsupported version " + std::to_string(version));
    ir.version = 1;

    if (!root.contains("graphs")) schema(path, "missing field 'graphs'");
    const auto& graphs = root["graphs"];
    require_object(graphs, "$.graphs");
    if (graphs.empty()) schema("$.graphs", "at least one graph is required");
    for (const auto& [name, body] : graphs.items()) {
        auto gpath = key_path("$.graphs", name);
        const json* nodes = &body;
        if (body.is_object()) {
            require_keys(body, gpath, {"nodes"});
            if (!body.contains("nodes")) schema(gpath, "missing field 'nodes'");
            nodes = &body["nodes"];
            gpath = key_path(gpath, "nodes");
        }
        if (!nodes->is_array()) schema(gpath, "expected a list of nodes");
        std::vector<NodeSpec> specs;
        for (std::size_t i = 0; i < nodes->size(); ++i) specs.push_back(read_node((*nodes)[i], index_path(gpath, i)));
        try {
            ir.graphs.emplace(name, build_graph(std::move(specs)));
        } catch (const GraphError& e) {
            throw IrGraphError(key_path("$.graphs", name), e.what());
        }
    }

    if (root.contains("runs")) {
        const auto& runs = root["runs"];
        if (!runs.is_array()) schema("$.runs", "expected a list of runs");
        for (std::size_t i = 0; i < runs.size(); ++i)
            ir.runs.push_back(read_run(runs[i], index_path("$.runs", i), ir.graphs));
    }
    return ir;
}

ProgramIR load_ir(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("", "cannot read '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_ir(buf.str());
}

std::string serialize_ir(const ProgramIR& ir) {
    json root;
    root["version"] = ir.version;
    json graphs = json::object();
    for (const auto& [name, g] : ir.graphs) {
        json nodes = json::array();
        for (const auto& n : g.nodes()) {
            json node;
            node["id"] = n.id;
            node["op"] = std::string(op_name(n.kind));
            node["inputs"] = n.inputs;
            json attrs = attrs_json(n.attrs);
            if (!attrs.empty()) node["attrs"] = std::move(attrs);
            if (n.shape) node["shape"] = shape_json(*n.shape);
            nodes.push_back(std::move(node));
        }
        graphs[name] = std::move(nodes);
    }
    root["graphs"] = std::move(graphs);
    json runs = json::array();
    for (const auto& r : ir.runs) {
        json run;
        run["graph"] = r.graph;
        run["fetches"] = r.fetches;
        json feeds = json::array();
        for (const auto& f : r.feeds) {
            json feed = json::object();
            for (const auto& [id, s] : f.bindings) feed[id] = shape_json(s);
            feeds.push_back(std::move(feed));
        }
        run["feeds"] = std::move(feeds);
        run["repeat"] = r.repeat;
        runs.push_back(std::move(run));
    }
    root["runs"] = std::move(runs);
    return root.dump(2) + "\n";
}

std::vector<FeedSet> effective_feeds(const RunPlan& plan) {
    if (plan.feeds.empty()) return {FeedSet{}};
    return plan.feeds;
}

}  // namespace shapeprobe
