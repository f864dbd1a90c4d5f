#include "fixture_corpus.hpp"

#include <fstream>
#include <random>
#include <stdexcept>

#include "migmine/process.hpp"

namespace fs = std::filesystem;

namespace migmine::testing {

TempDir::TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("migmine-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

void git(const fs::path& repo, const std::vector<std::string>& args, const std::string& iso_date) {
    std::vector<std::string> argv = {"git", "-C", repo.string(), "-c", "user.name=fixture",
                                     "-c", "user.email=fixture@example.org",
                                     "-c", "commit.gpgsign=false"};
    argv.insert(argv.end(), args.begin(), args.end());
    std::vector<std::pair<std::string, std::string>> env;
    if (!iso_date.empty()) {
        env.emplace_back("GIT_AUTHOR_DATE", iso_date);
        env.emplace_back("GIT_COMMITTER_DATE", iso_date);
    }
    const ProcessResult res = run_process(argv, nullptr, env);
    if (res.exit_code != 0) {
        std::string cmd = "git";
        for (const std::string& a : args)
            cmd += " " + a;
        throw std::runtime_error(cmd + " failed in " + repo.string() + ": " + res.err);
    }
}

void init_repo(const fs::path& repo) {
    fs::create_directories(repo);
    git(repo, {"init", "-q", "-b", "main"});
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
}

void commit_all(const fs::path& repo, const std::string& message, const std::string& iso_date) {
    git(repo, {"add", "-A"});
    git(repo, {"commit", "-q", "--allow-empty", "-m", message}, iso_date);
}

namespace {

std::string deb_control(const std::string& build_depends) {
    return "Source: betapkg\n"
           "Maintainer: Fixture <fixture@example.org>\n"
           "Build-Depends: " + build_depends + "\n"
           "\n"
           "Package: betapkg\n"
           "Architecture: any\n"
           "Depends: ${misc:Depends}\n"
           "Description: planted fixture package\n";
}

std::string gitmodules(const std::vector<std::pair<std::string, std::string>>& submodules) {
    std::string out;
    for (const auto& [name, url] : submodules) {
        out += "[submodule \"" + name + "\"]\n";
        out += "\tpath = third_party/" + name + "\n";
        out += "\turl = " + url + "\n";
    }
    return out;
}

} // namespace

void build_planted_corpus(const fs::path& corpus_dir) {
    fs::create_directories(corpus_dir);

    // libalpha: self-admitted meson migration gtest -> catch2.
    {
        const fs::path repo = corpus_dir / "libalpha";
        init_repo(repo);
        write_file(repo / "meson.build",
                   "project('libalpha', 'cpp')\n"
                   "gtest_dep = dependency('gtest', required: false)\n");
        commit_all(repo, "add build system", "2019-03-10T12:00:00Z");
        write_file(repo / "meson.build",
                   "project('libalpha', 'cpp')\n"
                   "catch2_dep = dependency('catch2', required: false)\n");
        commit_all(repo, "switch from gtest to catch2 because gtest is deprecated upstream",
                   "2019-06-20T12:00:00Z");
    }

    // betapkg: self-admitted deb migration cppunit -> gtest, plus the
    // excluded debhelper change and a libfoo version update.
    {
        const fs::path repo = corpus_dir / "betapkg";
        init_repo(repo);
        write_file(repo / "debian/control", deb_control("debhelper (>= 9), libcppunit-dev, libfoo-1"));
        commit_all(repo, "initial debian packaging", "2018-01-15T12:00:00Z");
        write_file(repo / "debian/control", deb_control("debhelper (>= 9), libgtest-dev, libfoo-1"));
        commit_all(repo, "replace cppunit with gtest", "2018-05-02T12:00:00Z");
        write_file(repo / "debian/control", deb_control("debhelper-compat (= 13), libgtest-dev, libfoo-1"));
        commit_all(repo, "switch debhelper to debhelper-compat", "2019-02-14T12:00:00Z");
        write_file(repo / "debian/control", deb_control("debhelper-compat (= 13), libgtest-dev, libfoo-2"));
        commit_all(repo, "update libfoo-1 to libfoo-2 abi", "2020-07-30T12:00:00Z");
    }

    // gammasub: self-admitted submodule migration jsoncpp -> nlohmann json,
    // plus a fork swap of x.
    {
        const fs::path repo = corpus_dir / "gammasub";
        init_repo(repo);
        write_file(repo / ".gitmodules",
                   gitmodules({{"jsoncpp", "https://github.com/open-source-parsers/jsoncpp.git"},
                               {"x", "https://github.com/alice/x.git"}}));
        commit_all(repo, "track third party sources", "2017-11-11T12:00:00Z");
        write_file(repo / ".gitmodules",
                   gitmodules({{"json", "https://github.com/nlohmann/json.git"},
                               {"x", "https://github.com/alice/x.git"}}));
        commit_all(repo, "migrate submodule from jsoncpp to nlohmann json", "2019-08-08T12:00:00Z");
        write_file(repo / ".gitmodules",
                   gitmodules({{"json", "https://github.com/nlohmann/json.git"},
                               {"x", "https://github.com/bob/x.git"}}));
        commit_all(repo, "switch to bob fork of x because upstream is stalled",
                   "2021-05-05T12:00:00Z");
    }

    // deltatool: silent deb migration confirmed by betapkg's rule.
    {
        const fs::path repo = corpus_dir / "deltatool";
        init_repo(repo);
        write_file(repo / "debian/control",
                   "Source: deltatool\n"
                   "Build-Depends: libcppunit-dev\n"
                   "\n"
                   "Package: deltatool\n"
                   "Depends: ${misc:Depends}\n");
        commit_all(repo, "package for debian", "2019-04-04T12:00:00Z");
        write_file(repo / "debian/control",
                   "Source: deltatool\n"
                   "Build-Depends: libgtest-dev\n"
                   "\n"
                   "Package: deltatool\n"
                   "Depends: ${misc:Depends}\n");
        commit_all(repo, "update build dependencies so that tests compile faster",
                   "2020-03-03T12:00:00Z");
    }

    // epsilonapp: silent meson migration plus a gitsubmodule -> conan PMT
    // migration with an explanatory message.
    {
        const fs::path repo = corpus_dir / "epsilonapp";
        init_repo(repo);
        write_file(repo / "meson.build",
                   "project('epsilonapp', 'cpp')\n"
                   "dep_test = dependency('gtest')\n");
        write_file(repo / ".gitmodules",
                   gitmodules({{"fmt", "https://github.com/fmtlib/fmt.git"}}));
        commit_all(repo, "initial deps", "2019-01-20T12:00:00Z");
        write_file(repo / "meson.build",
                   "project('epsilonapp', 'cpp')\n"
                   "dep_test = dependency('catch2')\n");
        commit_all(repo, "cleanup deps", "2020-04-15T12:00:00Z");
        fs::remove(repo / ".gitmodules");
        write_file(repo / "conanfile.txt", "[requires]\nfmt/8.0.0\n");
        commit_all(repo, "migrate from git submodule to conan to unify dependency management",
                   "2021-09-09T12:00:00Z");
    }
}

} // namespace migmine::testing
