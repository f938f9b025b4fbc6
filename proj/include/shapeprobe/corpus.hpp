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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "shapeprobe/check.hpp"

namespace shapeprobe {

/// A buggy program paired with its fixed version.
struct CorpusCase {
    std::string name;
    std::filesystem::path buggy;
    std::filesystem::path fixed;
    std::optional<std::string> expected_error_node;
    std::optional<std::int64_t> expected_iteration;
};

enum class CaseVerdict { BuggyDetected, Missed, FixedClean, FalsePositive, Invalid };

std::string_view case_verdict_name(CaseVerdict v);

struct CaseResult {
    std::string name;
    CaseVerdict buggy = CaseVerdict::Invalid;
    CaseVerdict fixed = CaseVerdict::Invalid;
    /// Diagnostic reported on the buggy program, if any.
    std::optional<Diagnostic> diagnostic;
    /// False when an expected node or iteration was given and differs.
    bool location_matches = true;
    std::string error;  // load failure details for Invalid verdicts
    double buggy_seconds = 0;
    double fixed_seconds = 0;
};

struct CorpusReport {
    std::vector<CaseResult> cases;

    std::size_t detected() const;
    std::size_t missed() const;
    std::size_t false_positives() const;
    std::size_t invalid() const;
    std::size_t mislocated() const;
    /// 1.0 when there is nothing to measure.
    double precision() const;
    double recall() const;
    /// 0 when every buggy case is caught at the expected location, no fixed
    /// case is flagged, and every file loaded; 1 otherwise.
    int exit_code() const;
};

/// Reads `dir/manifest.json` if present; otherwise pairs `<name>.buggy.json`
/// with `<name>.fixed.json`. A directory with neither is an empty corpus.
std::vector<CorpusCase> load_corpus(const std::filesystem::path& dir);

CorpusReport run_corpus(const std::vector<CorpusCase>& cases);

std::string format_corpus_text(const CorpusReport& report);
std::string format_corpus_json(const CorpusReport& report);

}  // namespace shapeprobe
