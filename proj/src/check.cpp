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

#include "shapeprobe/check.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace shapeprobe {

using nlohmann::json;

namespace {

json diagnostic_json(const Diagnostic& d) {
    json inputs = json::array();
    for (const auto& s : d.input_shapes) inputs.push_back(s.to_string());
    return json{{"node", d.node_id},
                {"op", std::string(op_name(d.op))},
                {"inputs", std::move(inputs)},
                {"iteration", d.iteration},
                {"kind", std::string(diagnostic_kind_name(d.kind))},
                {"message", d.message}};
}

}  // namespace

bool ExitReport::ok() const {
    return std::all_of(runs.begin(), runs.end(), [](const RunVerdict& r) { return r.ok(); });
}

ExitReport check(const ProgramIR& ir, const CheckOptions& options) {
    ExitReport report;
    for (std::size_t i = 0; i < ir.runs.size(); ++i) {
        const RunPlan& plan = ir.runs[i];
        RunVerdict verdict;
        verdict.index = i;
        verdict.graph = plan.graph;

        SessionState state(ir.graphs.at(plan.graph));
        const auto feeds = effective_feeds(plan);
        LoopOptions loop;
        loop.repeat = plan.repeat;
        loop.max_iterations = options.max_iterations;
        if (options.trace) {
            loop.on_run = [&verdict](const RunResult& r, std::int64_t iteration) {
                for (const auto& n : r.shapes) verdict.trace.push_back({iteration, n.id, n.op, n.shape});
            };
        }
        auto outcome = run_loop(state, plan.fetches, feeds, loop);
        verdict.iterations = outcome.iterations;
        verdict.diagnostic = std::move(outcome.diagnostic);
        report.runs.push_back(std::move(verdict));
    }
    return report;
}

FormattedReport format_text(const ExitReport& report) {
    std::ostringstream out;
    std::ostringstream err;
    for (const auto& r : report.runs) {
        for (const auto& t : r.trace)
            out << "trace run " << r.index << " iteration " << t.iteration << ": " << t.node << " ("
                << op_name(t.op) << ") " << t.shape.to_string() << "\n";
        if (r.ok()) {
            out << "run " << r.index << " (graph '" << r.graph << "'): " << kNoErrorDetected << " after "
                << r.iterations << (r.iterations == 1 ? " iteration" : " iterations") << "\n";
            continue;
        }
        const auto& d = *r.diagnostic;
        out << "run " << r.index << " (graph '" << r.graph << "'): shape error at iteration " << d.iteration
            << "\n";
        err << "error: " << d.message << "\n"
            << "  kind: " << diagnostic_kind_name(d.kind) << "\n"
            << "  node: " << d.node_id << " (" << op_name(d.op) << ")\n"
            << "  inputs:";
        for (const auto& s : d.input_shapes) err << " " << s.to_string();
        err << "\n  iteration: " << d.iteration << "\n";
    }
    if (report.runs.empty()) out << "no runs; " << kNoErrorDetected << "\n";
    return {out.str(), err.str()};
}

FormattedReport format_json(const ExitReport& report) {
    json runs = json::array();
    for (const auto& r : report.runs) {
        json run{{"index", r.index},
                 {"graph", r.graph},
                 {"iterations", r.iterations},
                 {"status", r.ok() ? "ok" : "error"}};
        if (r.diagnostic) run["diagnostic"] = diagnostic_json(*r.diagnostic);
        if (!r.trace.empty()) {
            json trace = json::array();
            for (const auto& t : r.trace)
                trace.push_back({{"iteration", t.iteration},
                                 {"node", t.node},
                                 {"op", std::string(op_name(t.op))},
                                 {"shape", t.shape.to_string()}});
            run["trace"] = std::move(trace);
        }
        runs.push_back(std::move(run));
    }
    json root{{"runs", std::move(runs)},
              {"exit_code", report.exit_code()},
              {"result", report.ok() ? std::string(kNoErrorDetected) : "shape error detected"}};
    return {root.dump(2) + "\n", {}};
}

std::string diagnostic_to_json(const Diagnostic& d) { return diagnostic_json(d).dump(); }

}  // namespace shapeprobe
