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

// Command-line front end. Talks to the engine only through the C API.

#include <cstdio>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "shapeprobe.h"

namespace {

constexpr int kExitInvalidInput = 2;

int load_failure(sp_status status) {
    std::fprintf(stderr, "error: %s: %s\n", sp_status_name(status), sp_last_error());
    return kExitInvalidInput;
}

int emit(sp_report* report) {
    std::fputs(sp_report_stdout(report), stdout);
    std::fputs(sp_report_stderr(report), stderr);
    const int code = sp_report_exit_code(report);
    sp_report_free(report);
    return code;
}

struct ProgramHandle {
    sp_program* p = nullptr;
    ~ProgramHandle() { sp_program_free(p); }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"shapeprobe: tensor shape checker for dataflow graph programs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(sp_version()));

    const std::map<std::string, sp_format> formats{{"text", SP_FORMAT_TEXT}, {"json", SP_FORMAT_JSON}};

    std::string file;
    sp_format format = SP_FORMAT_TEXT;
    bool trace = false;
    std::int64_t max_iterations = 0;
    auto* check = app.add_subcommand("check", "Check a program for shape incompatibility errors");
    check->add_option("file", file, "Program IR (JSON)")->required();
    check->add_option("--format", format, "Output format")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    check->add_flag("--trace", trace, "Print every node's shape in evaluation order");
    check->add_option("--max-iterations", max_iterations, "Cap on iterations per run")
        ->check(CLI::PositiveNumber);

    std::string dir;
    sp_format corpus_format = SP_FORMAT_TEXT;
    auto* corpus = app.add_subcommand("corpus", "Run a buggy/fixed program corpus");
    corpus->add_option("dir", dir, "Corpus directory")->required();
    corpus->add_option("--format", corpus_format, "Output format")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));

    std::string oracle_file;
    std::uint64_t seed = 0;
    sp_format oracle_format = SP_FORMAT_TEXT;
    auto* oracle = app.add_subcommand("oracle", "Execute on concrete zero tensors (debugging aid)");
    oracle->group("");
    oracle->add_option("file", oracle_file, "Program IR (JSON)")->required();
    oracle->add_option("--seed", seed, "Sampling seed for unknown dimensions");
    oracle->add_option("--format", oracle_format, "Output format")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalidInput;
    }

    if (*check) {
        ProgramHandle prog;
        if (auto st = sp_program_load(file.c_str(), &prog.p); st != SP_OK) return load_failure(st);
        sp_check_options opts{format, trace ? 1 : 0, max_iterations};
        sp_report* report = nullptr;
        if (auto st = sp_check(prog.p, &opts, &report); st != SP_OK) return load_failure(st);
        return emit(report);
    }
    if (*corpus) {
        sp_report* report = nullptr;
        if (auto st = sp_corpus_run(dir.c_str(), corpus_format, &report); st != SP_OK) return load_failure(st);
        return emit(report);
    }
    ProgramHandle prog;
    if (auto st = sp_program_load(oracle_file.c_str(), &prog.p); st != SP_OK) return load_failure(st);
    sp_report* report = nullptr;
    if (auto st = sp_oracle_run(prog.p, seed, oracle_format, &report); st != SP_OK) return load_failure(st);
    return emit(report);
}
