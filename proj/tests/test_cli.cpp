#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ffrg/document.hpp"
#include "ffrg/synth.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("ffrg_cli_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& f) const { return (path / f).string(); }
};

int run(const std::string& args) {
    const std::string cmd = std::string(FFRG_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("cli: synth, bootstrap, eval") {
    TempDir t("basic");
    REQUIRE(run("synth --preset clean --n 30 --seed 7 --out-docs " + t / "d.jsonl" + " --out-gold " + t / "g.jsonl") == 0);
    CHECK(ffrg::read_documents(t / "d.jsonl").size() == 30);
    REQUIRE(run("bootstrap --docs " + t / "d.jsonl" + " --out " + t / "l.jsonl" + " --values " + t / "v.jsonl") == 0);
    REQUIRE(run("eval --pred " + t / "v.jsonl" + " --gold " + t / "g.jsonl" + " --report " + t / "r.json") == 0);
    const auto report = nlohmann::json::parse(slurp(t / "r.json"));
    CHECK(report.at("macro_f1").get<double>() >= 0.95);
    REQUIRE(run("group --in " + t / "d.jsonl" + " --out " + t / "p.jsonl") == 0);
    CHECK(ffrg::read_documents(t / "p.jsonl")[0].phrases.has_value());
}

TEST_CASE("cli: exit codes") {
    TempDir t("codes");
    CHECK(run("") == 1);
    CHECK(run("eval --bogus") == 1);
    CHECK(run("nosuchcommand") == 1);
    CHECK(run("eval --pred " + t / "missing.jsonl" + " --gold " + t / "missing_gold.jsonl") == 2);
    CHECK(run("bootstrap --docs " + t / "nope.jsonl" + " --out " + t / "l.jsonl") == 2);

    std::ofstream(t / "bad.jsonl") << "{\"doc_id\": \"x\", \"words\": [\n";
    CHECK(run("bootstrap --docs " + t / "bad.jsonl" + " --out " + t / "l.jsonl") == 1);
    std::ofstream(t / "box.jsonl")
        << R"({"doc_id":"x","page_width":1,"page_height":1,"words":[{"text":"a","box":[0.5,0.1,0.2,0.2]}]})" << "\n";
    CHECK(run("bootstrap --docs " + t / "box.jsonl" + " --out " + t / "l.jsonl") == 1);
}

TEST_CASE("cli: config file with flag overrides") {
    TempDir t("config");
    std::ofstream(t / "cfg.json") << R"({"seed": 3, "synth": {"preset": "noisy-bench", "n": 12}})";
    REQUIRE(run("--config " + t / "cfg.json" + " synth --out-docs " + t / "a.jsonl" + " --out-gold " + t / "ag.jsonl") == 0);
    CHECK(ffrg::read_documents(t / "a.jsonl").size() == 12);

    // flag beats config
    REQUIRE(run("--config " + t / "cfg.json" + " synth --n 5 --out-docs " + t / "b.jsonl" + " --out-gold " + t / "bg.jsonl") == 0);
    CHECK(ffrg::read_documents(t / "b.jsonl").size() == 5);

    // the config seed was applied: same output as an explicit --seed 3
    REQUIRE(run("synth --seed 3 --preset noisy-bench --n 12 --out-docs " + t / "c.jsonl" + " --out-gold " + t / "cg.jsonl") == 0);
    CHECK(slurp(t / "a.jsonl") == slurp(t / "c.jsonl"));

    std::ofstream(t / "unknown.json") << R"({"synth": {"bogus": 1}})";
    CHECK(run("--config " + t / "unknown.json" + " synth --out-docs " + t / "d.jsonl" + " --out-gold " + t / "dg.jsonl") == 1);
    CHECK(run("--config " + t / "absent.json" + " synth --out-docs " + t / "d.jsonl" + " --out-gold " + t / "dg.jsonl") == 2);
}

TEST_CASE("cli: train, extract, inspect") {
    TempDir t("model");
    REQUIRE(run("synth --preset clean --n 40 --out-docs " + t / "d.jsonl" + " --out-gold " + t / "g.jsonl") == 0);
    REQUIRE(run("bootstrap --docs " + t / "d.jsonl" + " --out " + t / "l.jsonl") == 0);
    REQUIRE(run("train --docs " + t / "d.jsonl" + " --labels " + t / "l.jsonl" + " --out " + t / "m.ffrg" +
                " --branches 2 --epochs-step1 1 --epochs-step2 1") == 0);
    CHECK(slurp(t / "m.ffrg").substr(0, 5) == "FFRG1");
    REQUIRE(run("extract --model " + t / "m.ffrg" + " --docs " + t / "d.jsonl" + " --out " + t / "v.jsonl" +
                " --overlay " + t / "o.jsonl" + " --svg " + t / "svg") == 0);
    CHECK(ffrg::read_annotations(t / "v.jsonl").size() == 40);
    CHECK(fs::exists(t / "svg"));
    REQUIRE(run("inspect --model " + t / "m.ffrg" + " --docs " + t / "d.jsonl" + " --gold " + t / "g.jsonl" +
                " --out " + t / "i.jsonl") == 0);
    const auto first = nlohmann::json::parse(ffrg::read_lines(t / "i.jsonl").at(0));
    CHECK(first.contains("fields"));
    CHECK(run("extract --model " + t / "nope.ffrg" + " --docs " + t / "d.jsonl" + " --out " + t / "v.jsonl") == 2);
}

TEST_CASE("cli: pipeline is byte-identical across runs and thread counts") {
    TempDir t("pipe");
    const std::string common = " pipeline --preset noisy-bench --n 40 --n-test 15 --seed 7 --epochs-step1 1 --epochs-step2 1";
    REQUIRE(run("--threads 1" + common + " --out-dir " + t / "a") == 0);
    REQUIRE(run("--threads 1" + common + " --out-dir " + t / "b") == 0);
    REQUIRE(run("--threads 4" + common + " --out-dir " + t / "c") == 0);
    for (const char* f : {"model.ffrg", "report.json", "labels.jsonl", "values.jsonl"}) {
        CAPTURE(f);
        const auto a = slurp(t / (std::string("a/") + f));
        CHECK_FALSE(a.empty());
        CHECK(a == slurp(t / (std::string("b/") + f)));
        CHECK(a == slurp(t / (std::string("c/") + f)));
    }
}
