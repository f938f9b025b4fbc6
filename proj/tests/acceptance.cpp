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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "random_program.hpp"
#include "shapeprobe/check.hpp"
#include "shapeprobe/corpus.hpp"
#include "shapeprobe/oracle.hpp"
#include "sweep.hpp"

using namespace shapeprobe;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(bool pass, const char* name, const std::string& detail) {
    if (!pass) ++failures;
    std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const std::string kCorpus = SHAPEPROBE_CORPUS_DIR;

void reshape_table() {
    constexpr std::int64_t U = -1;
    const auto start = Clock::now();
    const Shape rows[] = {Shape::of({2, 6}), Shape::of({U, 6}), Shape::unknown_rank(), Shape::bottom()};
    const std::optional<std::vector<std::int64_t>> cols[] = {std::vector<std::int64_t>{3, 4},
                                                             std::vector<std::int64_t>{4, -1}, std::nullopt,
                                                             std::vector<std::int64_t>{-1, -1}};
    const auto K = ShapeCategory::Known, P = ShapeCategory::PartlyKnown, B = ShapeCategory::Bottom;
    const ShapeCategory expected[4][4] = {{K, K, B, B}, {K, P, B, B}, {K, P, B, B}, {B, B, B, B}};
    int agree = 0;
    std::string mismatches;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            const auto out = cols[c] ? reshape_transfer(rows[r], *cols[c])
                                     : reshape_transfer(rows[r], std::optional<DesiredShape>{});
            if (out.category() == expected[r][c])
                ++agree;
            else
                mismatches += fmt(" [%d,%d]=%s", r, c, category_name(out.category()));
        }
    const double t = seconds_since(start);
    report(agree == 16 && t < 1.0, "reshape table", fmt("%d/16 cells, %.6fs%s", agree, t, mismatches.c_str()));
}

void reduce_table() {
    const Shape inputs[] = {Shape::of({3, 4}), Shape::of({-1, 4}), Shape::unknown_rank()};
    int agree = 0;
    for (const auto& in : inputs)
        if (reduce_transfer(in, std::nullopt, false) == Shape::scalar()) ++agree;
    if (reduce_transfer(Shape::bottom(), std::nullopt, false).is_bottom()) ++agree;
    report(agree == 4, "reduce table", fmt("%d/4 columns", agree));
}

void oracle_sweep() {
    const auto start = Clock::now();
    const auto sweeps = testing::conformance_sweep(testing::SweepScale::Full);
    const double t = seconds_since(start);
    std::size_t cases = 0, agree = 0;
    std::set<OpKind> covered;
    std::string bad;
    for (const auto& s : sweeps) {
        cases += s.cases;
        agree += s.agreements;
        covered.insert(s.kind);
        if (!s.passed()) {
            bad += fmt(" %s(%zu/%zu)", std::string(op_name(s.kind)).c_str(), s.agreements, s.cases);
            for (const auto& f : s.failures) std::printf("  sweep mismatch: %s\n", f.c_str());
        }
    }
    const bool all_ops = covered.size() == kOpKindCount;
    report(cases == agree && all_ops && t < 60.0, "oracle conformance sweep",
           fmt("%zu/%zu cases agree across %zu/%zu ops, %.1fs%s", agree, cases, covered.size(), kOpKindCount, t,
               bad.c_str()));
}

void corpus_accuracy() {
    const auto cases = load_corpus(kCorpus);
    const auto r = run_corpus(cases);
    std::optional<std::int64_t> late;
    for (const auto& c : r.cases)
        if (c.name == "second_minibatch" && c.diagnostic) late = c.diagnostic->iteration;
    const bool pass = cases.size() >= 10 && r.recall() == 1.0 && r.false_positives() == 0 && r.invalid() == 0 &&
                      late == 2;
    report(pass, "corpus accuracy",
           fmt("%zu cases, recall %.3f, false positives %zu, second mini-batch at iteration %lld", cases.size(),
               r.recall(), r.false_positives(), static_cast<long long>(late.value_or(-1))));
}

void motivating_example() {
    const auto buggy = check(load_ir(kCorpus + "/mnist_feed_swap.buggy.json"));
    const auto fixed = check(load_ir(kCorpus + "/mnist_feed_swap.fixed.json"));
    const auto& d = buggy.runs.at(0).diagnostic;
    const bool at_x = d && d->node_id == "x" && d->message.find("784 vs 10") != std::string::npos;
    const auto fixed_text = format_text(fixed).out;
    const bool clean = fixed.exit_code() == 0 && fixed_text.find("no error detected") != std::string::npos;
    report(at_x && buggy.exit_code() == 1 && clean, "motivating example",
           fmt("buggy: %s; fixed: exit %d%s", d ? d->message.c_str() : "no diagnostic", fixed.exit_code(),
               clean ? ", no error detected" : ""));
}

struct DiffCounts {
    std::atomic<std::size_t> runs{0};
    std::atomic<std::size_t> concrete_errors{0};
    std::atomic<std::size_t> disagreements{0};
    std::atomic<std::size_t> unsound{0};  // abstract ok, concrete error
};

void differential(testing::ShapeMode mode, std::size_t graphs, std::uint64_t seeds, DiffCounts& counts) {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t g; (g = next.fetch_add(1)) < graphs;) {
                std::mt19937_64 rng(1000003 * g + (mode == testing::ShapeMode::FullyKnown ? 1 : 2));
                const auto rg = testing::random_graph(rng, {.max_nodes = 20, .mode = mode});
                for (std::uint64_t seed = 0; seed < seeds; ++seed) {
                    std::mt19937_64 feed_rng(seed * 0x9e3779b97f4a7c15ULL ^ g);
                    const auto ir = testing::random_program(rg, feed_rng, mode);
                    const auto a = check(ir).runs.at(0);
                    const auto c = oracle::concrete_run(ir, seed, {.record_shapes = false}).at(0);
                    ++counts.runs;
                    if (!c.ok()) ++counts.concrete_errors;
                    bool same = a.ok() == c.ok();
                    if (same && !a.ok())
                        same = a.diagnostic->node_id == c.error->node && a.diagnostic->iteration == c.error->iteration;
                    if (!same) ++counts.disagreements;
                    if (a.ok() && !c.ok()) ++counts.unsound;
                }
            }
        });
    for (auto& th : pool) th.join();
}

void random_differential() {
    constexpr std::size_t kGraphs = 1000;
    constexpr std::uint64_t kSeeds = 20;
    const auto start = Clock::now();
    DiffCounts known, partly;
    differential(testing::ShapeMode::FullyKnown, kGraphs, kSeeds, known);
    differential(testing::ShapeMode::PartlyKnown, kGraphs, kSeeds, partly);
    const bool pass = known.disagreements == 0 && partly.unsound == 0;
    report(pass, "random differential",
           fmt("%zu graphs x %llu seeds per mode; fully known: %zu runs (%zu concrete errors), %zu disagreements; "
               "partly known: %zu runs (%zu concrete errors), %zu abstract-ok/concrete-error; %.1fs",
               kGraphs, static_cast<unsigned long long>(kSeeds), known.runs.load(), known.concrete_errors.load(),
               known.disagreements.load(), partly.runs.load(), partly.concrete_errors.load(), partly.unsound.load(),
               seconds_since(start)));
}

ProgramIR chain(std::size_t length, std::int64_t dim) {
    constexpr OpKind kSteps[] = {OpKind::Relu, OpKind::Tanh, OpKind::Sigmoid, OpKind::Identity};
    std::vector<NodeSpec> nodes;
    NodeSpec x;
    x.id = "n00000";
    x.kind = OpKind::Placeholder;
    x.shape = Shape::of({-1, dim});
    nodes.push_back(x);
    for (std::size_t i = 1; i < length; ++i) {
        NodeSpec n;
        n.id = fmt("n%05zu", i);
        n.kind = kSteps[i % 4];
        n.inputs = {nodes.back().id};
        nodes.push_back(std::move(n));
    }
    ProgramIR ir;
    const std::string last = nodes.back().id;
    ir.graphs["main"] = build_graph(std::move(nodes));
    ir.runs.push_back(RunPlan{"main", {last}, {FeedSet{{{"n00000", Shape::of({dim, dim})}}}}, 1});
    return ir;
}

void performance() {
    const auto text = serialize_ir(chain(10000, 256));
    const auto start = Clock::now();
    const auto ir = parse_ir(text);
    const auto verdict = check(ir);
    const double abstract = seconds_since(start);

    const auto ostart = Clock::now();
    const auto concrete = oracle::concrete_run(ir, 0, {.record_shapes = false});
    const double oracle_t = seconds_since(ostart);
    const double ratio = oracle_t / abstract;
    report(verdict.ok() && concrete.at(0).ok() && abstract < 1.0 && ratio >= 10.0, "performance",
           fmt("10000-node chain: abstract %.4fs (parse + check), oracle at 256x256 %.3fs, ratio %.0fx", abstract,
               oracle_t, ratio));
}

}  // namespace

int main() {
    reshape_table();
    reduce_table();
    oracle_sweep();
    corpus_accuracy();
    motivating_example();
    random_differential();
    performance();
    std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
    return failures ? 1 : 0;
}
