#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "migmine/process.hpp"
#include "support/fixture_corpus.hpp"

using namespace migmine;
using namespace migmine::testing;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

ProcessResult run_cli(const std::vector<std::string>& args) {
    std::vector<std::string> argv = {MIGMINE_BIN};
    argv.insert(argv.end(), args.begin(), args.end());
    return run_process(argv);
}

size_t line_count(const std::string& text) {
    size_t lines = 0;
    for (char c : text)
        lines += c == '\n' ? 1 : 0;
    return lines;
}

} // namespace

TEST_CASE("scan exits 2 on an empty corpus and 1 on unreadable config") {
    TempDir dir("cliscan");
    fs::create_directories(dir.path() / "empty");
    const auto out_dir = (dir.path() / "out").string();

    const ProcessResult empty =
        run_cli({"scan", "--corpus", (dir.path() / "empty").string(), "--out", out_dir});
    CHECK(empty.exit_code == 2);
    CHECK(!fs::exists(dir.path() / "out" / "candidates.jsonl"));

    build_planted_corpus(dir.path() / "corpus");
    const ProcessResult badcfg =
        run_cli({"scan", "--corpus", (dir.path() / "corpus").string(), "--out", out_dir,
                 "--exclusions", (dir.path() / "missing.txt").string()});
    CHECK(badcfg.exit_code == 1);
}

TEST_CASE("scan writes candidates and prints per-pmt counts") {
    TempDir dir("cliscan2");
    build_planted_corpus(dir.path() / "corpus");
    const auto out_dir = (dir.path() / "out").string();

    const ProcessResult scan =
        run_cli({"scan", "--corpus", (dir.path() / "corpus").string(), "--out", out_dir});
    REQUIRE(scan.exit_code == 0);
    CHECK(scan.out.find("meson: 2") != std::string::npos);
    CHECK(scan.out.find("deb: 2") != std::string::npos);
    CHECK(scan.out.find("gitsubmodule: 1") != std::string::npos);
    CHECK(scan.out.find("vcpkg: 0") != std::string::npos);

    // Nontrivial candidates only: the version update, fork swap and excluded
    // pair are classified out.
    const std::string candidates = slurp(fs::path(out_dir) / "candidates.jsonl");
    CHECK(line_count(candidates) == 5);

    const ProcessResult filtered =
        run_cli({"scan", "--corpus", (dir.path() / "corpus").string(), "--out",
                 (dir.path() / "out2").string(), "--pmt", "deb"});
    REQUIRE(filtered.exit_code == 0);
    const std::string deb_only = slurp(dir.path() / "out2" / "candidates.jsonl");
    CHECK(line_count(deb_only) == 2);
    std::istringstream lines(deb_only);
    std::string line;
    while (std::getline(lines, line))
        CHECK(nlohmann::json::parse(line)["pmt"] == "deb");
}

TEST_CASE("mine produces the dataset files and is idempotent") {
    TempDir dir("climine");
    build_planted_corpus(dir.path() / "corpus");
    const auto corpus = (dir.path() / "corpus").string();
    const auto out_dir = (dir.path() / "out").string();

    const ProcessResult first = run_cli({"mine", "--corpus", corpus, "--out", out_dir});
    REQUIRE(first.exit_code == 0);
    for (const char* name : {"records.jsonl", "rules.jsonl", "pmt_migrations.jsonl", "stats.csv"})
        CHECK(fs::exists(fs::path(out_dir) / name));

    const std::string records = slurp(fs::path(out_dir) / "records.jsonl");
    const std::string rules = slurp(fs::path(out_dir) / "rules.jsonl");
    const std::string stats = slurp(fs::path(out_dir) / "stats.csv");

    const ProcessResult again = run_cli({"mine", "--corpus", corpus, "--out", out_dir});
    REQUIRE(again.exit_code == 0);
    CHECK(slurp(fs::path(out_dir) / "records.jsonl") == records);
    CHECK(slurp(fs::path(out_dir) / "rules.jsonl") == rules);
    CHECK(slurp(fs::path(out_dir) / "stats.csv") == stats);

    CHECK(records.back() == '\n');
    CHECK(stats.back() == '\n');
}

TEST_CASE("mine exits 2 on an empty corpus") {
    TempDir dir("climine2");
    fs::create_directories(dir.path() / "empty");
    const ProcessResult res = run_cli({"mine", "--corpus", (dir.path() / "empty").string(),
                                       "--out", (dir.path() / "out").string()});
    CHECK(res.exit_code == 2);
}

TEST_CASE("stats validates its inputs") {
    TempDir dir("clistats");
    build_planted_corpus(dir.path() / "corpus");
    const auto out_dir = (dir.path() / "out").string();
    REQUIRE(run_cli({"mine", "--corpus", (dir.path() / "corpus").string(), "--out", out_dir})
                .exit_code == 0);

    CHECK(run_cli({"stats", "--dataset", out_dir, "--metric", "nonsense"}).exit_code == 1);
    CHECK(run_cli({"stats", "--dataset", (dir.path() / "nowhere").string(), "--metric",
                   "summary"}).exit_code == 2);

    const ProcessResult summary = run_cli({"stats", "--dataset", out_dir, "--metric", "summary"});
    REQUIRE(summary.exit_code == 0);
    CHECK(summary.out.find("one_to_one_share,1.0000") != std::string::npos);
    CHECK(summary.out.find("unidirectional_share,1.0000") != std::string::npos);

    const ProcessResult entropy = run_cli({"stats", "--dataset", out_dir, "--metric", "entropy"});
    REQUIRE(entropy.exit_code == 0);
    // Every planted source has exactly one target.
    CHECK(entropy.out.find("gtest,0.0000") != std::string::npos);
    CHECK(entropy.out.find("libcppunit-dev,0.0000") != std::string::npos);
    CHECK(entropy.out.find("jsoncpp,0.0000") != std::string::npos);

    const ProcessResult trend = run_cli({"stats", "--dataset", out_dir, "--metric", "trend"});
    REQUIRE(trend.exit_code == 0);
    CHECK(trend.out.find("2018,1") != std::string::npos);
    CHECK(trend.out.find("2019,2") != std::string::npos);
    CHECK(trend.out.find("2020,2") != std::string::npos);

    const ProcessResult meson_only =
        run_cli({"stats", "--dataset", out_dir, "--metric", "entropy", "--pmt", "meson"});
    REQUIRE(meson_only.exit_code == 0);
    CHECK(meson_only.out.find("gtest,0.0000") != std::string::npos);
    CHECK(meson_only.out.find("libcppunit-dev") == std::string::npos);
}

TEST_CASE("export writes sankey data and enforces label requirements") {
    TempDir dir("cliexport");
    build_planted_corpus(dir.path() / "corpus");
    const auto out_dir = (dir.path() / "out").string();
    REQUIRE(run_cli({"mine", "--corpus", (dir.path() / "corpus").string(), "--out", out_dir})
                .exit_code == 0);

    const auto sankey_path = (dir.path() / "sankey.json").string();
    const ProcessResult exp =
        run_cli({"export", "--dataset", out_dir, "--out", sankey_path});
    REQUIRE(exp.exit_code == 0);
    const nlohmann::json doc = nlohmann::json::parse(slurp(sankey_path));
    CHECK(doc["nodes"].size() == 6); // three edges over six distinct libraries
    CHECK(doc["links"].size() == 3);
    for (const auto& link : doc["links"]) {
        CHECK(link["value"].get<long>() >= 1);
        CHECK(link["source_index"].get<int>() < static_cast<int>(doc["nodes"].size()));
        CHECK(link["target_index"].get<int>() < static_cast<int>(doc["nodes"].size()));
    }

    CHECK(run_cli({"export", "--dataset", out_dir, "--out", sankey_path, "--domain", "Testing"})
              .exit_code == 1);

    write_file(dir.path() / "labels.csv",
               "library,domain\ngtest,Testing\nlibcppunit-dev,Testing\n");
    const ProcessResult filtered =
        run_cli({"export", "--dataset", out_dir, "--out", sankey_path, "--domain", "Testing",
                 "--labels", (dir.path() / "labels.csv").string()});
    REQUIRE(filtered.exit_code == 0);
    const nlohmann::json testing_doc = nlohmann::json::parse(slurp(sankey_path));
    CHECK(testing_doc["links"].size() == 2); // gtest->catch2, libcppunit-dev->libgtest-dev
}

TEST_CASE("export of an empty dataset yields empty arrays") {
    TempDir dir("cliempty");
    const auto repo = dir.path() / "corpus" / "norepo";
    init_repo(repo);
    write_file(repo / "README", "no manifests\n");
    commit_all(repo, "docs", "2020-01-01T00:00:00Z");
    const auto out_dir = (dir.path() / "out").string();
    REQUIRE(run_cli({"mine", "--corpus", (dir.path() / "corpus").string(), "--out", out_dir})
                .exit_code == 0);
    const auto sankey_path = (dir.path() / "sankey.json").string();
    REQUIRE(run_cli({"export", "--dataset", out_dir, "--out", sankey_path}).exit_code == 0);
    const nlohmann::json doc = nlohmann::json::parse(slurp(sankey_path));
    CHECK(doc["nodes"].empty());
    CHECK(doc["links"].empty());
}

TEST_CASE("MIGMINE_WORKERS drives the worker count") {
    TempDir dir("clienv");
    build_planted_corpus(dir.path() / "corpus");
    const auto corpus = (dir.path() / "corpus").string();

    std::vector<std::string> argv = {MIGMINE_BIN, "mine", "--corpus", corpus, "--out",
                                     (dir.path() / "out-env").string()};
    const ProcessResult env_run = run_process(argv, nullptr, {{"MIGMINE_WORKERS", "8"}});
    REQUIRE(env_run.exit_code == 0);

    const ProcessResult flag_run = run_cli(
        {"mine", "--corpus", corpus, "--out", (dir.path() / "out-flag").string(), "--workers", "1"});
    REQUIRE(flag_run.exit_code == 0);
    CHECK(slurp(dir.path() / "out-env" / "records.jsonl") ==
          slurp(dir.path() / "out-flag" / "records.jsonl"));
}

TEST_CASE("usage errors exit with code 1") {
    CHECK(run_cli({"frobnicate"}).exit_code == 1);
    CHECK(run_cli({"mine"}).exit_code == 1); // missing required options
}
