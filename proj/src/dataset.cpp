#include "migmine/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include <json.hpp>

#include "migmine/analytics.hpp"
#include "migmine/errors.hpp"
#include "migmine/strutil.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace migmine {

namespace {

bool looks_like_repo_dir(const fs::path& path) {
    std::error_code ec;
    if (!fs::is_directory(path, ec))
        return false;
    if (fs::exists(path / ".git", ec))
        return true;
    return fs::exists(path / "HEAD", ec) && fs::exists(path / "objects", ec);
}

std::vector<fs::path> find_repos(const std::string& corpus_dir) {
    std::vector<fs::path> repos;
    std::error_code ec;
    if (!fs::is_directory(corpus_dir, ec))
        return repos;
    for (const auto& entry : fs::directory_iterator(corpus_dir, ec)) {
        if (looks_like_repo_dir(entry.path()))
            repos.push_back(entry.path());
    }
    std::sort(repos.begin(), repos.end());
    return repos;
}

std::string hash_config(const MinerConfig& config, const ExclusionList& exclusions,
                        const std::vector<std::string>& keywords) {
    std::string blob = "bulk_threshold=" + std::to_string(config.bulk_threshold) + "\n";
    blob += "pmt_filter=";
    if (config.pmt_filter) {
        for (PmtKind pmt : *config.pmt_filter)
            blob += std::string(to_string(pmt)) + ",";
    } else {
        blob += "all";
    }
    blob += "\nexclusions=";
    std::vector<std::pair<std::string, std::string>> pairs = exclusions.entries();
    std::sort(pairs.begin(), pairs.end());
    for (const auto& [a, b] : pairs)
        blob += a + ">" + b + ";";
    blob += "\nkeywords=";
    for (const std::string& k : keywords)
        blob += k + ";";
    blob += "\naliases=" + config.aliases_path.value_or("builtin");
    blob += "\nlabels=" + config.labels_path.value_or("none");
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(blob)));
    return buf;
}

} // namespace

std::vector<MigrationRecord> apply_rules(std::span<const CandidateMigration> candidates,
                                         const RuleSet& rules, const SalmIndex& salm_index) {
    std::vector<MigrationRecord> records;
    for (const CandidateMigration& candidate : candidates) {
        if (!rules.contains(candidate.source.canonical, candidate.target.canonical, candidate.pmt))
            continue;
        MigrationRecord record;
        record.project = candidate.commit.project;
        record.commit_id = candidate.commit.commit_id;
        record.timestamp = candidate.commit.timestamp;
        record.pmt = candidate.pmt;
        record.source = candidate.source.canonical;
        record.target = candidate.target.canonical;
        record.salm = salm_index.contains({candidate.commit.project, candidate.commit.commit_id,
                                           candidate.pmt, record.source, record.target});
        record.message = candidate.commit.message;
        records.push_back(std::move(record));
    }
    std::sort(records.begin(), records.end(), [](const MigrationRecord& a, const MigrationRecord& b) {
        return std::tie(a.project, a.timestamp, a.commit_id, a.source, a.target) <
               std::tie(b.project, b.timestamp, b.commit_id, b.source, b.target);
    });
    records.erase(std::unique(records.begin(), records.end(),
                              [](const MigrationRecord& a, const MigrationRecord& b) {
                                  return std::tie(a.project, a.commit_id, a.pmt, a.source, a.target) ==
                                         std::tie(b.project, b.commit_id, b.pmt, b.source, b.target);
                              }),
                  records.end());
    return records;
}

CorpusScan scan_corpus(const MinerConfig& config) {
    const std::vector<fs::path> repos = find_repos(config.corpus_dir);
    if (repos.empty())
        throw EmptyCorpus("no git repositories under " + config.corpus_dir);

    // Each slot is independent, so the merged result only depends on the
    // repo list order, not on scheduling.
    std::vector<ScanResult> scans(repos.size());
    const int workers = std::max(1, std::min<int>(config.workers, static_cast<int>(repos.size())));
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::string> scan_errors(repos.size());
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < repos.size(); i = next.fetch_add(1)) {
                try {
                    scans[i] = scan_repo(repos[i].string(), repos[i].filename().string());
                } catch (const std::exception& e) {
                    scan_errors[i] = e.what();
                }
            }
        });
    }
    for (std::thread& t : pool)
        t.join();

    CorpusScan result;
    result.repo_count = static_cast<long>(repos.size());
    for (size_t i = 0; i < repos.size(); ++i) {
        if (!scan_errors[i].empty())
            throw RepoUnreadable(scan_errors[i]);
        result.diagnostics.insert(result.diagnostics.end(), scans[i].diagnostics.begin(),
                                  scans[i].diagnostics.end());
        for (ManifestChange& change : scans[i].changes) {
            if (config.pmt_enabled(change.pmt))
                result.changes.push_back(std::move(change));
        }
    }
    return result;
}

Dataset build_dataset(const MinerConfig& config) {
    const ExclusionList exclusions = config.exclusions_path
                                         ? ExclusionList::load(*config.exclusions_path)
                                         : ExclusionList::defaults();
    const PmtAliasTable pmt_aliases =
        config.aliases_path ? PmtAliasTable::load(*config.aliases_path) : PmtAliasTable::defaults();
    const std::vector<std::string> keywords =
        config.keywords_path ? load_keywords(*config.keywords_path) : default_rationale_keywords();

    CorpusScan scan = scan_corpus(config);

    Dataset dataset;
    dataset.diagnostics = std::move(scan.diagnostics);
    std::vector<ManifestChange> all_changes = std::move(scan.changes);
    for (const ManifestChange& change : all_changes)
        dataset.generated_at = std::max(dataset.generated_at, change.commit.timestamp);

    // Per-commit manifest-change groups feed PMT-migration detection.
    std::map<std::pair<std::string, std::string>, std::vector<const ManifestChange*>> by_commit;
    for (const ManifestChange& change : all_changes)
        by_commit[{change.commit.project, change.commit.commit_id}].push_back(&change);

    const std::vector<CommitDelta> deltas = diff_dependencies(all_changes);

    std::vector<std::pair<CommitDelta, std::string>> rule_stream;
    rule_stream.reserve(deltas.size());
    for (const CommitDelta& delta : deltas)
        rule_stream.emplace_back(delta, delta.commit.message);
    dataset.rules = mine_rules(rule_stream, exclusions);

    SalmIndex salm_index;
    for (const CommitDelta& delta : deltas) {
        for (const MigrationRule& rule : extract_salm(delta.commit.message, delta, exclusions))
            salm_index.insert({delta.commit.project, delta.commit.commit_id, delta.pmt, rule.source,
                               rule.target});
    }

    std::vector<CandidateMigration> candidates;
    for (const CommitDelta& delta : deltas) {
        const auto cs = candidate_migrations(delta, exclusions, config.bulk_threshold);
        candidates.insert(candidates.end(), cs.begin(), cs.end());
    }
    dataset.records = apply_rules(candidates, dataset.rules, salm_index);

    // PMT migrations, duplicates collapsed per project (earliest kept).
    std::map<std::tuple<std::string, PmtKind, PmtKind>, PmtMigration> pmt_migrations;
    for (const auto& [key, changes] : by_commit) {
        std::vector<ManifestChange> group;
        group.reserve(changes.size());
        for (const ManifestChange* c : changes)
            group.push_back(*c);
        const auto migration = extract_pmt_migration(group.front().commit.message, group,
                                                     pmt_aliases,
                                                     &dataset.unconfirmed_pmt_migrations);
        if (!migration)
            continue;
        const auto mkey = std::make_tuple(migration->commit.project, migration->from_pmt,
                                          migration->to_pmt);
        const auto it = pmt_migrations.find(mkey);
        if (it == pmt_migrations.end() ||
            std::tie(migration->commit.timestamp, migration->commit.commit_id) <
                std::tie(it->second.commit.timestamp, it->second.commit.commit_id)) {
            pmt_migrations[mkey] = *migration;
        }
    }
    for (const auto& [key, migration] : pmt_migrations)
        dataset.pmt_migrations.push_back(migration);
    auto by_commit_order = [](const PmtMigration& a, const PmtMigration& b) {
        return std::tie(a.commit.project, a.commit.timestamp, a.commit.commit_id, a.from_pmt,
                        a.to_pmt) < std::tie(b.commit.project, b.commit.timestamp,
                                             b.commit.commit_id, b.from_pmt, b.to_pmt);
    };
    std::sort(dataset.pmt_migrations.begin(), dataset.pmt_migrations.end(), by_commit_order);
    std::sort(dataset.unconfirmed_pmt_migrations.begin(),
              dataset.unconfirmed_pmt_migrations.end(), by_commit_order);

    // Stats in the dataset-table shape.
    std::array<std::set<std::string>, kPmtCount> projects_using;
    std::array<std::set<std::pair<std::string, std::string>>, kPmtCount> candidate_commits;
    std::array<std::set<std::string>, kPmtCount> projects_migrating;
    std::array<std::set<std::pair<std::string, std::string>>, kPmtCount> migration_commits;
    for (const ManifestChange& change : all_changes)
        projects_using[static_cast<int>(change.pmt)].insert(change.commit.project);
    for (const CommitDelta& delta : deltas) {
        if (!delta.added.empty() && !delta.removed.empty())
            candidate_commits[static_cast<int>(delta.pmt)].insert(
                {delta.commit.project, delta.commit.commit_id});
    }
    for (const MigrationRecord& record : dataset.records) {
        projects_migrating[static_cast<int>(record.pmt)].insert(record.project);
        migration_commits[static_cast<int>(record.pmt)].insert({record.project, record.commit_id});
        ++dataset.per_pmt[static_cast<int>(record.pmt)].migrations;
    }
    for (const MigrationRule& rule : dataset.rules.sorted())
        ++dataset.per_pmt[static_cast<int>(rule.pmt)].rules;
    for (int i = 0; i < kPmtCount; ++i) {
        PmtStats& stats = dataset.per_pmt[i];
        stats.projects = static_cast<long>(projects_using[i].size());
        stats.projects_with_migration = static_cast<long>(projects_migrating[i].size());
        stats.candidate_commits = static_cast<long>(candidate_commits[i].size());
        stats.migration_commits = static_cast<long>(migration_commits[i].size());
        dataset.total.projects_with_migration += stats.projects_with_migration;
        dataset.total.candidate_commits += stats.candidate_commits;
        dataset.total.migration_commits += stats.migration_commits;
        dataset.total.migrations += stats.migrations;
        dataset.total.rules += stats.rules;
    }
    // The total projects row counts repositories in the corpus, manifests or
    // not; the per-PMT rows count projects using each PMT.
    dataset.total.projects = scan.repo_count;

    dataset.config_hash = hash_config(config, exclusions, keywords);
    return dataset;
}

namespace {

ordered_json record_to_json(const MigrationRecord& record) {
    ordered_json j;
    j["project"] = record.project;
    j["commit_id"] = record.commit_id;
    j["timestamp"] = record.timestamp;
    j["pmt"] = std::string(to_string(record.pmt));
    j["source"] = record.source;
    j["target"] = record.target;
    j["salm"] = record.salm;
    j["message"] = record.message;
    return j;
}

std::string dump_line(const ordered_json& j) {
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

} // namespace

std::string records_jsonl(const Dataset& dataset) {
    ordered_json header;
    header["version"] = 1;
    header["config_hash"] = dataset.config_hash;
    header["generated_at"] = iso8601_utc(dataset.generated_at);
    std::string out = dump_line(header);
    for (const MigrationRecord& record : dataset.records)
        out += dump_line(record_to_json(record));
    return out;
}

std::string rules_jsonl(const Dataset& dataset) {
    std::string out;
    for (const MigrationRule& rule : dataset.rules.sorted()) {
        ordered_json j;
        j["source"] = rule.source;
        j["target"] = rule.target;
        j["pmt"] = std::string(to_string(rule.pmt));
        j["salm_support"] = rule.salm_support;
        j["example_commits"] = rule.example_commits;
        out += dump_line(j);
    }
    return out;
}

std::string pmt_migrations_jsonl(const Dataset& dataset) {
    std::string out;
    for (const PmtMigration& migration : dataset.pmt_migrations) {
        ordered_json j;
        j["project"] = migration.commit.project;
        j["commit_id"] = migration.commit.commit_id;
        j["timestamp"] = migration.commit.timestamp;
        j["from_pmt"] = std::string(to_string(migration.from_pmt));
        j["to_pmt"] = std::string(to_string(migration.to_pmt));
        out += dump_line(j);
    }
    return out;
}

std::string stats_csv(const Dataset& dataset) {
    std::string out =
        "pmt,projects,projects_with_migration,candidate_commits,migration_commits,migrations,rules\n";
    auto row = [&](std::string_view name, const PmtStats& stats) {
        out += std::string(name) + "," + std::to_string(stats.projects) + "," +
               std::to_string(stats.projects_with_migration) + "," +
               std::to_string(stats.candidate_commits) + "," +
               std::to_string(stats.migration_commits) + "," + std::to_string(stats.migrations) +
               "," + std::to_string(stats.rules) + "\n";
    };
    for (PmtKind pmt : kAllPmts)
        row(to_string(pmt), dataset.per_pmt[static_cast<int>(pmt)]);
    row("total", dataset.total);
    return out;
}

std::vector<MigrationRecord> read_records_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read records file: " + path);
    std::vector<MigrationRecord> records;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        const nlohmann::json j = nlohmann::json::parse(line);
        if (first) {
            first = false;
            if (j.contains("version"))
                continue; // header
        }
        MigrationRecord record;
        record.project = j.at("project").get<std::string>();
        record.commit_id = j.at("commit_id").get<std::string>();
        record.timestamp = j.at("timestamp").get<std::int64_t>();
        const auto pmt = pmt_from_string(j.at("pmt").get<std::string>());
        if (!pmt)
            throw std::runtime_error("unknown pmt in records file: " + j.at("pmt").dump());
        record.pmt = *pmt;
        record.source = j.at("source").get<std::string>();
        record.target = j.at("target").get<std::string>();
        record.salm = j.at("salm").get<bool>();
        record.message = j.value("message", std::string());
        records.push_back(std::move(record));
    }
    return records;
}

} // namespace migmine
