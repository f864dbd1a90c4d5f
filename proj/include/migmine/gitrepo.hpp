#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "migmine/manifest.hpp"
#include "migmine/names.hpp"

namespace migmine {

struct CommitInfo {
    std::string commit_id; // 40-hex
    std::int64_t timestamp = 0; // committer time, seconds since epoch
    std::string message;
    std::string project;
};

// One manifest file touched by one commit, with both sides parsed.
// A file addition has no before; a deletion has no after.
struct ManifestChange {
    CommitInfo commit;
    std::string path;
    PmtKind pmt;
    std::optional<ParsedManifest> before;
    std::optional<ParsedManifest> after;
};

// Per-commit, per-PMT dependency delta over canonical names.
// added and removed are disjoint: names on both sides cancel.
struct CommitDelta {
    CommitInfo commit;
    PmtKind pmt;
    std::vector<CanonicalName> added;   // sorted by canonical
    std::vector<CanonicalName> removed; // sorted by canonical
};

struct CandidateMigration {
    CommitInfo commit;
    PmtKind pmt;
    CanonicalName source;
    CanonicalName target;
    PairClass pair_class = PairClass::nontrivial;
};

struct ScanResult {
    std::vector<ManifestChange> changes; // sorted by (timestamp, commit_id, path)
    std::vector<std::string> diagnostics;
};

// Walks every commit reachable from HEAD (merges diffed against their first
// parent) and emits one ManifestChange per manifest path touched. Unreadable
// blobs are skipped with a diagnostic. Throws RepoUnreadable when repo_path
// is not a Git repository.
ScanResult scan_repo(const std::string& repo_path, const std::string& project_name);
ScanResult scan_repo(const std::string& repo_path);

// Delta of a single manifest change; an absent side is the empty set.
CommitDelta diff_dependencies(const ManifestChange& change);

// Groups changes by (project, commit, pmt) and unions their deltas into one
// CommitDelta each. A library removed at one path and added at another path
// of the same PMT in the same commit cancels out. Output sorted by
// (project, timestamp, commit_id, pmt).
std::vector<CommitDelta> diff_dependencies(std::span<const ManifestChange> changes);

inline constexpr int kDefaultBulkThreshold = 50;

// Cross product removed x added, classified; only nontrivial pairs are
// retained. Empty unless both sides are nonempty. Commits moving more than
// bulk_threshold libraries on either side are treated as manifest
// restructurings and yield no candidates.
std::vector<CandidateMigration> candidate_migrations(const CommitDelta& delta,
                                                     const ExclusionList& exclusions,
                                                     int bulk_threshold = kDefaultBulkThreshold);

} // namespace migmine
