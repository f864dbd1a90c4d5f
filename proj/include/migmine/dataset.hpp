#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "migmine/salm.hpp"

namespace migmine {

struct MinerConfig {
    std::string corpus_dir;
    std::string output_dir;
    std::optional<std::set<PmtKind>> pmt_filter;
    int bulk_threshold = kDefaultBulkThreshold;
    std::optional<std::string> exclusions_path;
    std::optional<std::string> aliases_path;
    std::optional<std::string> keywords_path;
    std::optional<std::string> labels_path;
    int workers = 1;

    bool pmt_enabled(PmtKind pmt) const {
        return !pmt_filter || pmt_filter->contains(pmt);
    }
};

// One confirmed migration: a candidate whose (source, target, pmt) matched a
// mined rule. salm is true when this very commit self-admitted the rule.
struct MigrationRecord {
    std::string project;
    std::string commit_id;
    std::int64_t timestamp = 0;
    PmtKind pmt;
    std::string source;
    std::string target;
    bool salm = false;
    std::string message;
};

struct PmtStats {
    long projects = 0;
    long projects_with_migration = 0;
    long candidate_commits = 0;
    long migration_commits = 0;
    long migrations = 0;
    long rules = 0;
};

struct Dataset {
    std::vector<MigrationRecord> records; // sorted (project, timestamp, commit_id, source, target)
    RuleSet rules;
    std::vector<PmtMigration> pmt_migrations; // sorted (project, timestamp, commit_id)
    // Manifest-level PMT switches whose messages never name both tools; kept
    // out of pmt_migrations and reported for manual review only.
    std::vector<PmtMigration> unconfirmed_pmt_migrations;
    std::array<PmtStats, kPmtCount> per_pmt;
    PmtStats total;
    std::string config_hash;
    std::int64_t generated_at = 0; // newest commit timestamp seen in the corpus
    std::vector<std::string> diagnostics; // skipped blobs etc., not serialized
};

// Self-admissions observed while mining rules, used to set the salm flag on
// records: (project, commit_id, pmt, source, target).
using SalmIndex = std::set<std::tuple<std::string, std::string, PmtKind, std::string, std::string>>;

// Emits one record per candidate whose (source, target, pmt) exists in rules.
// Output sorted by (project, timestamp, commit_id, source, target).
std::vector<MigrationRecord> apply_rules(std::span<const CandidateMigration> candidates,
                                         const RuleSet& rules, const SalmIndex& salm_index);

struct CorpusScan {
    std::vector<ManifestChange> changes; // pmt-filtered, merged across repos
    std::vector<std::string> diagnostics;
    long repo_count = 0;
};

// Scans every repository under config.corpus_dir with config.workers threads.
// Throws EmptyCorpus when no repositories are found.
CorpusScan scan_corpus(const MinerConfig& config);

// Runs scan -> diff -> candidates -> mine_rules -> apply_rules over every
// repository under config.corpus_dir. Deterministic for a fixed corpus and
// config, independent of config.workers. Throws EmptyCorpus when no
// repositories are found.
Dataset build_dataset(const MinerConfig& config);

// Serialization. records.jsonl starts with a header line
// {version, config_hash, generated_at}; stats.csv rows are ordered
// conan, vcpkg, meson, xmake, pkgconfig, gitsubmodule, deb, total.
std::string records_jsonl(const Dataset& dataset);
std::string rules_jsonl(const Dataset& dataset);
std::string pmt_migrations_jsonl(const Dataset& dataset);
std::string stats_csv(const Dataset& dataset);

// Parses records.jsonl back (header line skipped). Throws std::runtime_error
// on malformed input.
std::vector<MigrationRecord> read_records_jsonl(const std::string& path);

} // namespace migmine
