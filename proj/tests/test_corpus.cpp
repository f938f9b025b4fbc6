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

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

#include <json.hpp>

#include "shapeprobe/corpus.hpp"
#include "shapeprobe/oracle.hpp"

using namespace shapeprobe;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = SHAPEPROBE_CORPUS_DIR;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("shapeprobe-corpus-" + std::to_string(::getpid()) + "-" +
                                            std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static inline int counter = 0;
};

}  // namespace

TEST_CASE("shipped corpus: every bug found, no false alarms") {
    const auto cases = load_corpus(kCorpus);
    REQUIRE(cases.size() >= 10);
    const auto report = run_corpus(cases);
    CHECK(report.detected() == cases.size());
    CHECK(report.missed() == 0);
    CHECK(report.false_positives() == 0);
    CHECK(report.invalid() == 0);
    CHECK(report.mislocated() == 0);
    CHECK(report.recall() == 1.0);
    CHECK(report.precision() == 1.0);
    CHECK(report.exit_code() == 0);

    for (const auto& r : report.cases) {
        INFO(r.name);
        CHECK(r.buggy == CaseVerdict::BuggyDetected);
        CHECK(r.fixed == CaseVerdict::FixedClean);
        CHECK(r.location_matches);
        if (r.name == "second_minibatch") {
            CHECK(r.diagnostic->iteration == 2);
            CHECK(r.diagnostic->node_id == "product");
        }
    }
}

TEST_CASE("shipped corpus agrees with concrete execution") {
    for (const auto& c : load_corpus(kCorpus)) {
        INFO(c.name);
        const auto buggy = load_ir(c.buggy);
        const auto fixed = load_ir(c.fixed);
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const auto b = oracle::concrete_run(buggy, seed, {.record_shapes = false});
            REQUIRE_FALSE(b[0].ok());
            if (c.expected_error_node) CHECK(b[0].error->node == *c.expected_error_node);
            if (c.expected_iteration) CHECK(b[0].error->iteration == *c.expected_iteration);
            for (const auto& r : oracle::concrete_run(fixed, seed, {.record_shapes = false})) CHECK(r.ok());
        }
    }
}

TEST_CASE("a mislabeled case is reported as missed and as a false alarm") {
    TempDir dir;
    fs::copy_file(kCorpus / "broadcast_mismatch.buggy.json", dir.path / "b.json");
    fs::copy_file(kCorpus / "broadcast_mismatch.fixed.json", dir.path / "f.json");
    std::ofstream(dir.path / "manifest.json")
        << R"({"cases":[{"name":"swapped","buggy":"f.json","fixed":"b.json"}]})";
    const auto report = run_corpus(load_corpus(dir.path));
    REQUIRE(report.cases.size() == 1);
    CHECK(report.cases[0].buggy == CaseVerdict::Missed);
    CHECK(report.cases[0].fixed == CaseVerdict::FalsePositive);
    CHECK(report.missed() == 1);
    CHECK(report.false_positives() == 1);
    CHECK(report.recall() == 0.0);
    CHECK(report.exit_code() == 1);
    CHECK(format_corpus_text(report).find("missed") != std::string::npos);
}

TEST_CASE("wrong expected location is counted") {
    TempDir dir;
    fs::copy_file(kCorpus / "second_minibatch.buggy.json", dir.path / "b.json");
    fs::copy_file(kCorpus / "second_minibatch.fixed.json", dir.path / "f.json");
    std::ofstream(dir.path / "manifest.json") << R"({"cases":[{"name":"late","buggy":"b.json","fixed":"f.json",)"
                                                 R"("expected_error_node":"product","expected_iteration":1}]})";
    const auto report = run_corpus(load_corpus(dir.path));
    CHECK(report.mislocated() == 1);
    CHECK_FALSE(report.cases[0].location_matches);
    CHECK(report.exit_code() == 1);
}

TEST_CASE("pairs are discovered without a manifest") {
    TempDir dir;
    for (const auto* name : {"reduce_axis_out_of_range", "pooling_rank_error"}) {
        fs::copy_file(kCorpus / (std::string(name) + ".buggy.json"), dir.path / (std::string(name) + ".buggy.json"));
        fs::copy_file(kCorpus / (std::string(name) + ".fixed.json"), dir.path / (std::string(name) + ".fixed.json"));
    }
    const auto cases = load_corpus(dir.path);
    REQUIRE(cases.size() == 2);
    CHECK(cases[0].name == "pooling_rank_error");
    const auto report = run_corpus(cases);
    CHECK(report.detected() == 2);
    CHECK(report.exit_code() == 0);
}

TEST_CASE("unloadable programs are invalid, not detections") {
    TempDir dir;
    std::ofstream(dir.path / "bad.buggy.json") << "{";
    fs::copy_file(kCorpus / "pooling_rank_error.fixed.json", dir.path / "bad.fixed.json");
    const auto report = run_corpus(load_corpus(dir.path));
    REQUIRE(report.cases.size() == 1);
    CHECK(report.cases[0].buggy == CaseVerdict::Invalid);
    CHECK_FALSE(report.cases[0].error.empty());
    CHECK(report.invalid() == 1);
    CHECK(report.detected() == 0);
    CHECK(report.exit_code() != 0);
}

TEST_CASE("corpus json summary") {
    const auto j = nlohmann::json::parse(format_corpus_json(run_corpus(load_corpus(kCorpus))));
    CHECK(j["cases"].size() >= 10);
    CHECK(j.dump().find("second_minibatch") != std::string::npos);
}
