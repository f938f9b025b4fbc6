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

#include "shapeprobe/corpus.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace shapeprobe {

using nlohmann::json;

std::string_view case_verdict_name(CaseVerdict v) {
    switch (v) {
    case CaseVerdict::BuggyDetected: return "buggy-detected";
    case CaseVerdict::Missed: return "missed";
    case CaseVerdict::FixedClean: return "fixed-clean";
    case CaseVerdict::FalsePositive: return "false-positive";
    case CaseVerdict::Invalid: return "invalid";
    }
    return "invalid";
}

namespace {

template <typename Pred>
std::size_t count_if_case(const std::vector<CaseResult>& cases, Pred p) {
    return static_cast<std::size_t>(std::count_if(cases.begin(), cases.end(), p));
}

struct Timed {
    std::optional<Diagnostic> diagnostic;
    double seconds = 0;
};

// Loads and checks one program; the first diagnostic across its runs wins.
Timed check_file(const std::filesystem::path& path) {
    const auto start = std::chrono::steady_clock::now();
    const ProgramIR ir = load_ir(path);
    const ExitReport report = check(ir);
    Timed t;
    t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& r : report.runs)
        if (r.diagnostic) {
            t.diagnostic = r.diagnostic;
            break;
        }
    return t;
}

}  // namespace

std::size_t CorpusReport::detected() const {
    return count_if_case(cases, [](const CaseResult& c) { return c.buggy == CaseVerdict::BuggyDetected; });
}
std::size_t CorpusReport::missed() const {
    return count_if_case(cases, [](const CaseResult& c) { return c.buggy == CaseVerdict::Missed; });
}
std::size_t CorpusReport::false_positives() const {
    return count_if_case(cases, [](const CaseResult& c) { return c.fixed == CaseVerdict::FalsePositive; });
}
std::size_t CorpusReport::invalid() const {
    return count_if_case(cases, [](const CaseResult& c) {
        return c.buggy == CaseVerdict::Invalid || c.fixed == CaseVerdict::Invalid;
    });
}
std::size_t CorpusReport::mislocated() const {
    return count_if_case(cases, [](const CaseResult& c) {
        return c.buggy == CaseVerdict::BuggyDetected && !c.location_matches;
    });
}

double CorpusReport::precision() const {
    const auto tp = detected();
    const auto fp = false_positives();
    return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double CorpusReport::recall() const {
    const auto tp = detected();
    const auto fn = missed();
    return tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

int CorpusReport::exit_code() const {
    return missed() == 0 && false_positives() == 0 && invalid() == 0 && mislocated() == 0 ? 0 : 1;
}

std::vector<CorpusCase> load_corpus(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw ParseError("", "corpus directory '" + dir.string() + "' does not exist");
    std::vector<CorpusCase> cases;
    const fs::path manifest = dir / "manifest.json";
    if (fs::exists(manifest)) {
        std::ifstream in(manifest);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ParseError("", "manifest: " + std::string(e.what()));
        }
        if (!j.is_object() || !j.contains("cases") || !j["cases"].is_array())
            throw SchemaError("$", "manifest must be an object with a 'cases' list");
        for (std::size_t i = 0; i < j["cases"].size(); ++i) {
            const auto& c = j["cases"][i];
            const std::string path = "$.cases[" + std::to_string(i) + "]";
            if (!c.is_object() || !c.contains("name") || !c.contains("buggy") || !c.contains("fixed"))
                throw SchemaError(path, "case needs name, buggy and fixed");
            CorpusCase cc;
            try {
                cc.name = c["name"].get<std::string>();
                cc.buggy = dir / c["buggy"].get<std::string>();
                cc.fixed = dir / c["fixed"].get<std::string>();
                if (c.contains("expected_error_node")) cc.expected_error_node = c["expected_error_node"].get<std::string>();
                if (c.contains("expected_iteration")) cc.expected_iteration = c["expected_iteration"].get<std::int64_t>();
            } catch (const json::type_error& e) {
                throw SchemaError(path, e.what());
            }
            cases.push_back(std::move(cc));
        }
        return cases;
    }
    const std::string suffix = ".buggy.json";
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto file = entry.path().filename().string();
        if (file.size() <= suffix.size() || !file.ends_with(suffix)) continue;
        const auto name = file.substr(0, file.size() - suffix.size());
        const auto fixed = dir / (name + ".fixed.json");
        if (!fs::exists(fixed)) continue;
        cases.push_back({name, entry.path(), fixed, std::nullopt, std::nullopt});
    }
    std::sort(cases.begin(), cases.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return cases;
}

CorpusReport run_corpus(const std::vector<CorpusCase>& cases) {
    CorpusReport report;
    for (const auto& c : cases) {
        CaseResult r;
        r.name = c.name;
        try {
            auto buggy = check_file(c.buggy);
            r.buggy_seconds = buggy.seconds;
            r.buggy = buggy.diagnostic ? CaseVerdict::BuggyDetected : CaseVerdict::Missed;
            if (buggy.diagnostic) {
                if (c.expected_error_node && *c.expected_error_node != buggy.diagnostic->node_id)
                    r.location_matches = false;
                if (c.expected_iteration && *c.expected_iteration != buggy.diagnostic->iteration)
                    r.location_matches = false;
            }
            r.diagnostic = std::move(buggy.diagnostic);
        } catch (const IrError& e) {
            r.error = c.buggy.string() + ": " + e.what();
        }
        try {
            auto fixed = check_file(c.fixed);
            r.fixed_seconds = fixed.seconds;
            r.fixed = fixed.diagnostic ? CaseVerdict::FalsePositive : CaseVerdict::FixedClean;
        } catch (const IrError& e) {
            if (!r.error.empty()) r.error += "; ";
            r.error += c.fixed.string() + ": " + e.what();
        }
        report.cases.push_back(std::move(r));
    }
    return report;
}

std::string format_corpus_text(const CorpusReport& report) {
    std::ostringstream os;
    for (const auto& c : report.cases) {
        os << std::left << std::setw(28) << c.name << " buggy: " << std::setw(15) << case_verdict_name(c.buggy)
           << " fixed: " << std::setw(15) << case_verdict_name(c.fixed);
        if (c.diagnostic)
            os << " at " << c.diagnostic->node_id << " iteration " << c.diagnostic->iteration;
        if (!c.location_matches) os << " (unexpected location)";
        os << std::fixed << std::setprecision(6) << "  [" << c.buggy_seconds << "s / " << c.fixed_seconds << "s]";
        if (!c.error.empty()) os << "\n    " << c.error;
        os << "\n";
    }
    os << "cases: " << report.cases.size() << "  detected: " << report.detected() << "  missed: " << report.missed()
       << "  false positives: " << report.false_positives() << "  invalid: " << report.invalid() << "\n"
       << std::setprecision(3) << "precision: " << report.precision() << "  recall: " << report.recall() << "\n";
    return os.str();
}

std::string format_corpus_json(const CorpusReport& report) {
    json cases = json::array();
    for (const auto& c : report.cases) {
        json j{{"name", c.name},
               {"buggy", std::string(case_verdict_name(c.buggy))},
               {"fixed", std::string(case_verdict_name(c.fixed))},
               {"location_matches", c.location_matches},
               {"buggy_seconds", c.buggy_seconds},
               {"fixed_seconds", c.fixed_seconds}};
        if (c.diagnostic) j["diagnostic"] = json::parse(diagnostic_to_json(*c.diagnostic));
        if (!c.error.empty()) j["error"] = c.error;
        cases.push_back(std::move(j));
    }
    json root{{"cases", std::move(cases)},
              {"detected", report.detected()},
              {"missed", report.missed()},
              {"false_positives", report.false_positives()},
              {"invalid", report.invalid()},
              {"precision", report.precision()},
              {"recall", report.recall()},
              {"exit_code", report.exit_code()}};
    return root.dump(2) + "\n";
}

}  // namespace shapeprobe
