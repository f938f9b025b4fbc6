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

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kCorpus = SHAPEPROBE_CORPUS_DIR;

struct Outcome {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome cli(const std::string& args) {
    const auto dir = fs::temp_directory_path();
    const auto tag = std::to_string(::getpid());
    const auto out = dir / ("shapeprobe-cli-" + tag + ".out");
    const auto err = dir / ("shapeprobe-cli-" + tag + ".err");
    const std::string cmd = std::string("'") + SHAPEPROBE_CLI + "' " + args + " >'" + out.string() + "' 2>'" +
                            err.string() + "'";
    const int status = std::system(cmd.c_str());
    Outcome o{WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
    fs::remove(out);
    fs::remove(err);
    return o;
}

}  // namespace

TEST_CASE("buggy program exits 1 with the diagnostic on stderr") {
    const auto o = cli("check " + kCorpus + "/mnist_feed_swap.buggy.json");
    CHECK(o.exit_code == 1);
    CHECK(o.err.find("784 vs 10") != std::string::npos);
    CHECK(o.err.find("node: x (placeholder)") != std::string::npos);
    CHECK(o.out.find("shape error at iteration 1") != std::string::npos);
}

TEST_CASE("fixed program exits 0") {
    const auto o = cli("check " + kCorpus + "/mnist_feed_swap.fixed.json");
    CHECK(o.exit_code == 0);
    CHECK(o.out.find("no error detected") != std::string::npos);
    CHECK(o.err.empty());
}

TEST_CASE("json output is machine readable") {
    const auto o = cli("check --format json --trace " + kCorpus + "/second_minibatch.buggy.json");
    CHECK(o.exit_code == 1);
    const auto j = nlohmann::json::parse(o.out);
    CHECK(j["runs"][0]["diagnostic"]["iteration"] == 2);
    CHECK(j["runs"][0]["trace"].size() == 7);
}

TEST_CASE("iteration cap") {
    CHECK(cli("check --max-iterations 1 " + kCorpus + "/second_minibatch.buggy.json").exit_code == 0);
}

TEST_CASE("invalid input exits 2") {
    const auto missing = cli("check /nonexistent/program.json");
    CHECK(missing.exit_code == 2);
    CHECK(missing.err.rfind("error:", 0) == 0);
    CHECK(missing.out.empty());

    const auto path = fs::temp_directory_path() / ("shapeprobe-cli-" + std::to_string(::getpid()) + ".json");
    std::ofstream(path) << R"({"version":1,"graphs":{"main":[{"id":"c","op":"conv3d"}]},"runs":[]})";
    const auto schema = cli("check " + path.string());
    fs::remove(path);
    CHECK(schema.exit_code == 2);
    CHECK(schema.err.find("$.graphs.main[0].op") != std::string::npos);

    CHECK(cli("").exit_code == 2);
    CHECK(cli("check").exit_code == 2);
    CHECK(cli("check --format yaml " + kCorpus + "/mnist_feed_swap.fixed.json").exit_code == 2);
}

TEST_CASE("corpus subcommand") {
    const auto o = cli("corpus " + kCorpus);
    CHECK(o.exit_code == 0);
    CHECK(o.out.find("recall: 1.000") != std::string::npos);
    const auto j = nlohmann::json::parse(cli("corpus --format json " + kCorpus).out);
    CHECK(j["recall"] == 1.0);
    CHECK(j["false_positives"] == 0);
}

TEST_CASE("concrete reference run") {
    const auto o = cli("oracle --seed 1 " + kCorpus + "/second_minibatch.buggy.json");
    CHECK(o.exit_code == 1);
    CHECK(o.out.find("concrete error at 'product' iteration 2") != std::string::npos);
}
