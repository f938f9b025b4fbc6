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

#include "shapeprobe.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "shapeprobe/check.hpp"
#include "shapeprobe/corpus.hpp"
#include "shapeprobe/ir.hpp"
#include "shapeprobe/oracle.hpp"

struct sp_program {
    shapeprobe::ProgramIR ir;
};

struct sp_report_diag {
    std::string node;
    std::string kind;
    std::int64_t iteration;
};

struct sp_report {
    int exit_code = 0;
    std::string out;
    std::string err;
    std::vector<sp_report_diag> diagnostics;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_error_path;

sp_status set_error(sp_status status, const std::string& message, const std::string& path = {}) {
    g_error = message;
    g_error_path = path;
    return status;
}

void clear_error() {
    g_error.clear();
    g_error_path.clear();
}

// Runs `body`, mapping exceptions onto status codes.
template <typename F>
sp_status guarded(F&& body) {
    try {
        clear_error();
        return body();
    } catch (const shapeprobe::ParseError& e) {
        return set_error(SP_ERR_PARSE, e.what(), e.path());
    } catch (const shapeprobe::SchemaError& e) {
        return set_error(SP_ERR_SCHEMA, e.what(), e.path());
    } catch (const shapeprobe::IrGraphError& e) {
        return set_error(SP_ERR_GRAPH, e.what(), e.path());
    } catch (const shapeprobe::GraphError& e) {
        return set_error(SP_ERR_GRAPH, e.what());
    } catch (const std::invalid_argument& e) {
        return set_error(SP_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return set_error(SP_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(SP_ERR_INTERNAL, "unknown error");
    }
}

sp_status null_argument(const char* what) {
    return set_error(SP_ERR_INVALID_ARGUMENT, std::string(what) + " must not be null");
}

}  // namespace

extern "C" {

const char* sp_version(void) { return "1.0.0"; }

const char* sp_status_name(sp_status status) {
    switch (status) {
    case SP_OK: return "ok";
    case SP_ERR_PARSE: return "parse error";
    case SP_ERR_SCHEMA: return "schema error";
    case SP_ERR_GRAPH: return "graph error";
    case SP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SP_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* sp_last_error(void) { return g_error.c_str(); }
const char* sp_last_error_path(void) { return g_error_path.c_str(); }

sp_status sp_program_parse(const char* text, size_t length, sp_program** out) {
    if (!text || !out) return null_argument("text and out");
    *out = nullptr;
    return guarded([&] {
        auto p = std::make_unique<sp_program>();
        p->ir = shapeprobe::parse_ir(std::string_view(text, length));
        *out = p.release();
        return SP_OK;
    });
}

sp_status sp_program_load(const char* path, sp_program** out) {
    if (!path || !out) return null_argument("path and out");
    *out = nullptr;
    return guarded([&] {
        auto p = std::make_unique<sp_program>();
        p->ir = shapeprobe::load_ir(path);
        *out = p.release();
        return SP_OK;
    });
}

void sp_program_free(sp_program* program) { delete program; }

size_t sp_program_graph_count(const sp_program* program) { return program ? program->ir.graphs.size() : 0; }
size_t sp_program_run_count(const sp_program* program) { return program ? program->ir.runs.size() : 0; }

sp_status sp_program_serialize(const sp_program* program, char** out) {
    if (!program || !out) return null_argument("program and out");
    *out = nullptr;
    return guarded([&] {
        const std::string s = shapeprobe::serialize_ir(program->ir);
        char* buf = static_cast<char*>(std::malloc(s.size() + 1));
        if (!buf) return set_error(SP_ERR_INTERNAL, "out of memory");
        std::memcpy(buf, s.c_str(), s.size() + 1);
        *out = buf;
        return SP_OK;
    });
}

void sp_string_free(char* s) { std::free(s); }

sp_status sp_check(const sp_program* program, const sp_check_options* options, sp_report** out) {
    if (!program || !out) return null_argument("program and out");
    *out = nullptr;
    return guarded([&] {
        shapeprobe::CheckOptions opts;
        sp_format format = SP_FORMAT_TEXT;
        if (options) {
            opts.trace = options->trace != 0;
            if (options->max_iterations > 0) opts.max_iterations = options->max_iterations;
            format = options->format;
        }
        const auto report = shapeprobe::check(program->ir, opts);
        auto r = std::make_unique<sp_report>();
        r->exit_code = report.exit_code();
        const auto text = format == SP_FORMAT_JSON ? shapeprobe::format_json(report) : shapeprobe::format_text(report);
        r->out = text.out;
        r->err = text.err;
        for (const auto& run : report.runs)
            if (run.diagnostic)
                r->diagnostics.push_back({run.diagnostic->node_id,
                                          std::string(shapeprobe::diagnostic_kind_name(run.diagnostic->kind)),
                                          run.diagnostic->iteration});
        *out = r.release();
        return SP_OK;
    });
}

sp_status sp_corpus_run(const char* dir, sp_format format, sp_report** out) {
    if (!dir || !out) return null_argument("dir and out");
    *out = nullptr;
    return guarded([&] {
        const auto report = shapeprobe::run_corpus(shapeprobe::load_corpus(dir));
        auto r = std::make_unique<sp_report>();
        r->exit_code = report.exit_code();
        r->out = format == SP_FORMAT_JSON ? shapeprobe::format_corpus_json(report)
                                          : shapeprobe::format_corpus_text(report);
        for (const auto& c : report.cases)
            if (c.diagnostic)
                r->diagnostics.push_back({c.diagnostic->node_id,
                                          std::string(shapeprobe::diagnostic_kind_name(c.diagnostic->kind)),
                                          c.diagnostic->iteration});
        *out = r.release();
        return SP_OK;
    });
}

sp_status sp_oracle_run(const sp_program* program, uint64_t seed, sp_format format, sp_report** out) {
    if (!program || !out) return null_argument("program and out");
    *out = nullptr;
    return guarded([&] {
        const auto results = shapeprobe::oracle::concrete_run(program->ir, seed);
        auto r = std::make_unique<sp_report>();
        for (const auto& run : results)
            if (run.error) {
                r->exit_code = 1;
                r->diagnostics.push_back({run.error->node, "ConcreteError", run.error->iteration});
            }
        r->out = format == SP_FORMAT_JSON ? shapeprobe::oracle::format_oracle_json(results)
                                          : shapeprobe::oracle::format_oracle_text(results);
        *out = r.release();
        return SP_OK;
    });
}

int sp_report_exit_code(const sp_report* report) { return report ? report->exit_code : -1; }
const char* sp_report_stdout(const sp_report* report) { return report ? report->out.c_str() : ""; }
const char* sp_report_stderr(const sp_report* report) { return report ? report->err.c_str() : ""; }
size_t sp_report_diagnostic_count(const sp_report* report) { return report ? report->diagnostics.size() : 0; }

const char* sp_report_diagnostic_node(const sp_report* report, size_t index) {
    if (!report || index >= report->diagnostics.size()) return nullptr;
    return report->diagnostics[index].node.c_str();
}

const char* sp_report_diagnostic_kind(const sp_report* report, size_t index) {
    if (!report || index >= report->diagnostics.size()) return nullptr;
    return report->diagnostics[index].kind.c_str();
}

int64_t sp_report_diagnostic_iteration(const sp_report* report, size_t index) {
    if (!report || index >= report->diagnostics.size()) return -1;
    return report->diagnostics[index].iteration;
}

void sp_report_free(sp_report* report) { delete report; }

}  // extern "C"
