#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>

#include "migmine/salm.hpp"

using namespace migmine;

namespace {

CommitInfo commit_at(const std::string& id, std::int64_t ts) {
    return {id, ts, "", "proj"};
}

CommitDelta make_delta(const std::vector<const char*>& removed,
                       const std::vector<const char*>& added, PmtKind pmt,
                       const std::string& commit_id = "aaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaa",
                       std::int64_t ts = 1000) {
    CommitDelta delta;
    delta.commit = commit_at(commit_id, ts);
    delta.pmt = pmt;
    for (const char* name : removed)
        delta.removed.push_back(normalize(name, pmt));
    for (const char* name : added)
        delta.added.push_back(normalize(name, pmt));
    return delta;
}

} // namespace

TEST_CASE("extract_salm pairs mentioned names") {
    const ExclusionList exclusions = ExclusionList::defaults();
    const CommitDelta delta = make_delta({"gtest"}, {"catch2"}, PmtKind::meson);

    const auto rules = extract_salm("switch from gtest to catch2", delta, exclusions);
    REQUIRE(rules.size() == 1);
    CHECK(rules.front().source == "gtest");
    CHECK(rules.front().target == "catch2");
    CHECK(rules.front().pmt == PmtKind::meson);
    CHECK(rules.front().salm_support == 1);
}

TEST_CASE("extract_salm requires both names in the message") {
    const ExclusionList exclusions = ExclusionList::defaults();
    const CommitDelta delta = make_delta({"gtest"}, {"catch2"}, PmtKind::meson);
    CHECK(extract_salm("update deps", delta, exclusions).empty());
    CHECK(extract_salm("drop gtest", delta, exclusions).empty());
    CHECK(extract_salm("add catch2", delta, exclusions).empty());
}

TEST_CASE("extract_salm drops trivial pairs") {
    const ExclusionList exclusions = ExclusionList::defaults();
    const CommitDelta delta = make_delta({"libmutter-2"}, {"libmutter-3"}, PmtKind::deb);
    CHECK(extract_salm("replace libmutter-2 with libmutter-3", delta, exclusions).empty());
}

TEST_CASE("extract_salm matches whole tokens, not substrings") {
    const ExclusionList exclusions = ExclusionList::defaults();
    // "jsoncpp" in the message must not count as a mention of "json".
    const CommitDelta delta = make_delta({"rapidjson"}, {"json"}, PmtKind::vcpkg);
    CHECK(extract_salm("tweak jsoncpp build flags for rapidjson", delta, exclusions).empty());
    const auto rules = extract_salm("replace rapidjson with json", delta, exclusions);
    REQUIRE(rules.size() == 1);
    CHECK(rules.front().target == "json");
}

TEST_CASE("extract_salm picks the most similar mentioned target") {
    const ExclusionList exclusions = ExclusionList::defaults();
    const CommitDelta delta =
        make_delta({"libgtk2.0-dev"}, {"libgtk-3-dev", "libglib2.0-dev"}, PmtKind::deb);
    const auto rules = extract_salm(
        "build against libgtk-3-dev and libglib2.0-dev instead of libgtk2.0-dev", delta,
        exclusions);
    REQUIRE(rules.size() == 1);
    // gtk is textually closer to gtk-3 than to glib.
    CHECK(rules.front().target == normalize("libgtk-3-dev", PmtKind::deb).canonical);
}

TEST_CASE("extract_salm ties break lexicographically on the target") {
    const ExclusionList exclusions = ExclusionList::defaults();
    // Both targets are equally dissimilar to qqq (edit distance 3 each).
    const CommitDelta delta = make_delta({"qqq"}, {"ab", "aa"}, PmtKind::conan);
    const auto rules = extract_salm("swap qqq for aa or ab", delta, exclusions);
    REQUIRE(rules.size() == 1);
    CHECK(rules.front().target == "aa");
}

TEST_CASE("extract_salm allows at most one pair per removed library") {
    const ExclusionList exclusions = ExclusionList::defaults();
    const CommitDelta delta = make_delta({"gtest", "cppunit"}, {"catch2"}, PmtKind::meson);
    const auto rules =
        extract_salm("replace gtest and cppunit with catch2", delta, exclusions);
    CHECK(rules.size() == 2);
    for (const MigrationRule& rule : rules)
        CHECK(rule.target == "catch2");
}

TEST_CASE("extract_pmt_migration detects a documented tool switch") {
    const PmtAliasTable aliases = PmtAliasTable::defaults();
    CommitInfo commit = commit_at("bbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbb", 2000);

    ManifestChange removed;
    removed.commit = commit;
    removed.path = ".gitmodules";
    removed.pmt = PmtKind::gitsubmodule;
    removed.before = parse_manifest(PmtKind::gitsubmodule,
                                    "[submodule \"fmt\"]\n\turl = https://e.org/fmt.git\n");
    ManifestChange added;
    added.commit = commit;
    added.path = "conanfile.txt";
    added.pmt = PmtKind::conan;
    added.after = parse_manifest(PmtKind::conan, "[requires]\nfmt/8.0.0\n");

    const std::vector<ManifestChange> changes = {removed, added};
    const auto migration =
        extract_pmt_migration("migrate from git submodule to conan", changes, aliases);
    REQUIRE(migration.has_value());
    CHECK(migration->from_pmt == PmtKind::gitsubmodule);
    CHECK(migration->to_pmt == PmtKind::conan);

    // One-sided change: nothing.
    const std::vector<ManifestChange> one_sided = {added};
    CHECK(!extract_pmt_migration("add conan", one_sided, aliases).has_value());

    // Names not mentioned: nothing.
    CHECK(!extract_pmt_migration("cleanup", changes, aliases).has_value());
}

TEST_CASE("extract_pmt_migration treats emptied manifests as removals") {
    const PmtAliasTable aliases = PmtAliasTable::defaults();
    CommitInfo commit = commit_at("cccccccccccccccccccccccccccccccccccccccc", 3000);

    ManifestChange emptied;
    emptied.commit = commit;
    emptied.path = ".gitmodules";
    emptied.pmt = PmtKind::gitsubmodule;
    emptied.before = parse_manifest(PmtKind::gitsubmodule,
                                    "[submodule \"fmt\"]\n\turl = https://e.org/fmt.git\n");
    emptied.after = parse_manifest(PmtKind::gitsubmodule, "");
    ManifestChange populated;
    populated.commit = commit;
    populated.path = "vcpkg.json";
    populated.pmt = PmtKind::vcpkg;
    populated.before = parse_manifest(PmtKind::vcpkg, "{}");
    populated.after = parse_manifest(PmtKind::vcpkg, R"({"dependencies":["fmt"]})");

    const std::vector<ManifestChange> changes = {emptied, populated};
    const auto migration =
        extract_pmt_migration("move submodule deps into vcpkg", changes, aliases);
    REQUIRE(migration.has_value());
    CHECK(migration->from_pmt == PmtKind::gitsubmodule);
    CHECK(migration->to_pmt == PmtKind::vcpkg);
}

TEST_CASE("the optional verb gate is off by default") {
    const ExclusionList exclusions = ExclusionList::defaults();
    const CommitDelta delta = make_delta({"gtest"}, {"catch2"}, PmtKind::meson);

    // Name matching alone suffices by default.
    CHECK(extract_salm("gtest out, catch2 in", delta, exclusions).size() == 1);

    SalmOptions gated;
    gated.require_migration_verb = true;
    CHECK(extract_salm("gtest out, catch2 in", delta, exclusions, gated).empty());
    CHECK(extract_salm("switched from gtest to catch2", delta, exclusions, gated).size() == 1);
    CHECK(extract_salm("migrating gtest to catch2", delta, exclusions, gated).size() == 1);
}

TEST_CASE("pmt changes without message mentions are reported as unconfirmed") {
    const PmtAliasTable aliases = PmtAliasTable::defaults();
    CommitInfo commit = commit_at("dddddddddddddddddddddddddddddddddddddddd", 4000);

    ManifestChange removed;
    removed.commit = commit;
    removed.path = ".gitmodules";
    removed.pmt = PmtKind::gitsubmodule;
    removed.before = parse_manifest(PmtKind::gitsubmodule,
                                    "[submodule \"fmt\"]\n\turl = https://e.org/fmt.git\n");
    ManifestChange added;
    added.commit = commit;
    added.path = "conanfile.txt";
    added.pmt = PmtKind::conan;
    added.after = parse_manifest(PmtKind::conan, "[requires]\nfmt/8.0.0\n");
    const std::vector<ManifestChange> changes = {removed, added};

    std::vector<PmtMigration> unconfirmed;
    CHECK(!extract_pmt_migration("cleanup", changes, aliases, &unconfirmed).has_value());
    REQUIRE(unconfirmed.size() == 1);
    CHECK(unconfirmed.front().from_pmt == PmtKind::gitsubmodule);
    CHECK(unconfirmed.front().to_pmt == PmtKind::conan);

    unconfirmed.clear();
    const auto confirmed =
        extract_pmt_migration("migrate submodule deps to conan", changes, aliases, &unconfirmed);
    CHECK(confirmed.has_value());
    CHECK(unconfirmed.empty());
}

TEST_CASE("opposite rule directions coexist") {
    const ExclusionList exclusions = ExclusionList::defaults();
    std::vector<std::pair<CommitDelta, std::string>> corpus;
    corpus.emplace_back(make_delta({"gtest"}, {"catch2"}, PmtKind::meson,
                                   "1111111111111111111111111111111111111111", 100),
                        "drop gtest in favor of catch2");
    corpus.emplace_back(make_delta({"catch2"}, {"gtest"}, PmtKind::meson,
                                   "2222222222222222222222222222222222222222", 200),
                        "go back from catch2 to gtest");
    const RuleSet rules = mine_rules(corpus, exclusions);
    CHECK(rules.size() == 2);
    CHECK(rules.contains("gtest", "catch2", PmtKind::meson));
    CHECK(rules.contains("catch2", "gtest", PmtKind::meson));
}

TEST_CASE("subject and body are both scanned") {
    const ExclusionList exclusions = ExclusionList::defaults();
    const CommitDelta delta = make_delta({"gtest"}, {"catch2"}, PmtKind::meson);
    const auto rules = extract_salm(
        "modernize test harness\n\nThis drops gtest entirely; catch2 covers our needs.", delta,
        exclusions);
    CHECK(rules.size() == 1);
}

TEST_CASE("mine_rules merges duplicates and is order insensitive") {
    const ExclusionList exclusions = ExclusionList::defaults();
    std::vector<std::pair<CommitDelta, std::string>> corpus;
    corpus.emplace_back(make_delta({"gtest"}, {"catch2"}, PmtKind::meson,
                                   "1111111111111111111111111111111111111111", 100),
                        "switch from gtest to catch2");
    corpus.emplace_back(make_delta({"gtest"}, {"catch2"}, PmtKind::meson,
                                   "2222222222222222222222222222222222222222", 200),
                        "move from gtest to catch2");
    corpus.emplace_back(make_delta({"libcppunit-dev"}, {"libgtest-dev"}, PmtKind::deb,
                                   "3333333333333333333333333333333333333333", 300),
                        "replace cppunit with gtest");

    const RuleSet forward = mine_rules(corpus, exclusions);
    CHECK(forward.size() == 2);
    const MigrationRule* merged = forward.find("gtest", "catch2", PmtKind::meson);
    REQUIRE(merged != nullptr);
    CHECK(merged->salm_support == 2);
    REQUIRE(merged->example_commits.size() == 2);
    CHECK(merged->example_commits.front() == "1111111111111111111111111111111111111111");

    std::reverse(corpus.begin(), corpus.end());
    const RuleSet backward = mine_rules(corpus, exclusions);
    REQUIRE(backward.size() == forward.size());
    const auto a = forward.sorted();
    const auto b = backward.sorted();
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].source == b[i].source);
        CHECK(a[i].target == b[i].target);
        CHECK(a[i].salm_support == b[i].salm_support);
        CHECK(a[i].example_commits == b[i].example_commits);
    }
}

TEST_CASE("mine_rules on an empty corpus") {
    const std::vector<std::pair<CommitDelta, std::string>> corpus;
    CHECK(mine_rules(corpus, ExclusionList::defaults()).empty());
}

TEST_CASE("rules never have source equal to target") {
    const ExclusionList exclusions = ExclusionList::defaults();
    std::mt19937 rng(11);
    const std::vector<const char*> pool = {"gtest", "catch2", "doctest", "zlib", "libpng-dev",
                                           "libpng", "png"};
    int produced = 0;
    for (int i = 0; i < 200; ++i) {
        const CommitDelta delta = make_delta({pool[rng() % pool.size()]},
                                             {pool[rng() % pool.size()]}, PmtKind::deb);
        std::string message = "replace ";
        message += delta.removed.front().aliases.front() + " with " + delta.added.front().aliases.front();
        for (const MigrationRule& rule : extract_salm(message, delta, exclusions)) {
            CHECK(rule.source != rule.target);
            ++produced;
        }
    }
    CHECK(produced > 0);
}

TEST_CASE("pmt alias table loads from file") {
    const std::string path = "/tmp/migmine-test-aliases.txt";
    {
        std::ofstream out(path);
        out << "# aliases\nconan\tconancenter\nmeson\tmeson\n";
    }
    const PmtAliasTable table = PmtAliasTable::load(path);
    CHECK(table.mentioned(PmtKind::conan, "moved everything to conancenter"));
    CHECK(!table.mentioned(PmtKind::conan, "moved everything to conan")); // defaults replaced
    CHECK(table.mentioned(PmtKind::meson, "meson it is"));
    std::remove(path.c_str());
    CHECK_THROWS(PmtAliasTable::load("/nonexistent/aliases.txt"));
}

TEST_CASE("example_commits stay capped and earliest first") {
    RuleSet rules;
    for (int i = 30; i >= 1; --i) {
        MigrationRule rule;
        rule.source = "a";
        rule.target = "b";
        rule.pmt = PmtKind::conan;
        rule.salm_support = 1;
        char id[41];
        std::snprintf(id, sizeof(id), "%040d", i);
        rule.example_commits = {id};
        rules.merge(rule, i);
    }
    const MigrationRule* merged = rules.find("a", "b", PmtKind::conan);
    REQUIRE(merged != nullptr);
    CHECK(merged->salm_support == 30);
    REQUIRE(merged->example_commits.size() == RuleSet::kMaxExampleCommits);
    char first[41];
    std::snprintf(first, sizeof(first), "%040d", 1);
    CHECK(merged->example_commits.front() == first);
}
