#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "migmine/gitrepo.hpp"

namespace migmine {

// An ordered library pair attested by at least one self-admitted migration.
struct MigrationRule {
    std::string source; // canonical, differs from target
    std::string target; // canonical
    PmtKind pmt;
    int salm_support = 1;                     // distinct self-admitting commits
    std::vector<std::string> example_commits; // earliest first, capped
};

struct PmtMigration {
    CommitInfo commit;
    PmtKind from_pmt;
    PmtKind to_pmt;
};

class RuleSet {
public:
    using Key = std::tuple<std::string, std::string, PmtKind>;

    void merge(const MigrationRule& rule, std::int64_t commit_timestamp);
    bool contains(const std::string& source, const std::string& target, PmtKind pmt) const;
    const MigrationRule* find(const std::string& source, const std::string& target,
                              PmtKind pmt) const;

    std::vector<MigrationRule> sorted() const; // by (source, target, pmt)
    std::size_t size() const { return rules_.size(); }
    bool empty() const { return rules_.empty(); }

    static constexpr std::size_t kMaxExampleCommits = 20;

private:
    struct Entry {
        MigrationRule rule;
        // (timestamp, commit_id) per example, kept sorted for earliest-first.
        std::vector<std::pair<std::int64_t, std::string>> examples;
    };
    std::map<Key, Entry> rules_;
};

// Editable PMT-name alias table used to spot PMT migrations in messages.
class PmtAliasTable {
public:
    static PmtAliasTable defaults();
    static PmtAliasTable load(const std::string& path);

    void add(PmtKind pmt, std::string_view alias);
    // True when any alias of pmt occurs as a substring of the lowercased message.
    bool mentioned(PmtKind pmt, const std::string& lower_message) const;

private:
    std::map<PmtKind, std::vector<std::string>> aliases_;
};

// Optional tightening of SALM detection. Name matching alone follows the
// mining method; the verb gate is available for precision experiments and is
// off by default.
struct SalmOptions {
    bool require_migration_verb = false;
    std::vector<std::string> verb_stems = {"switch", "migrat", "replac", "instead", "move"};
};

// Identifies self-admitted migrations: a removed and an added library are
// paired when both are mentioned by name in the commit message, matching each
// removed library with the most similar mentioned added library. Pairs that
// classify as trivial are dropped. Each surviving pair yields one rule with
// salm_support 1.
std::vector<MigrationRule> extract_salm(const std::string& message, const CommitDelta& delta,
                                        const ExclusionList& exclusions,
                                        const SalmOptions& options = {});

// Detects a PMT migration within one commit: a manifest of one PMT deleted or
// emptied, a manifest of another added or populated, and both PMT names
// mentioned in the message. Manifest evidence without the message mention is
// not a rule; when `unconfirmed` is given, such pairs are collected there.
std::optional<PmtMigration> extract_pmt_migration(const std::string& message,
                                                  std::span<const ManifestChange> changes,
                                                  const PmtAliasTable& aliases,
                                                  std::vector<PmtMigration>* unconfirmed = nullptr);

// Unions extract_salm over a corpus, merging duplicate rules by summing
// salm_support and accumulating example commits (earliest first). Result is
// independent of stream order.
RuleSet mine_rules(std::span<const std::pair<CommitDelta, std::string>> corpus,
                   const ExclusionList& exclusions, const SalmOptions& options = {});

} // namespace migmine
