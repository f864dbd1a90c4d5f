#include "migmine/salm.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "migmine/strutil.hpp"

namespace migmine {

void RuleSet::merge(const MigrationRule& rule, std::int64_t commit_timestamp) {
    auto [it, inserted] = rules_.try_emplace(Key{rule.source, rule.target, rule.pmt});
    Entry& entry = it->second;
    if (inserted) {
        entry.rule = rule;
        entry.rule.salm_support = 0;
        entry.rule.example_commits.clear();
    }
    entry.rule.salm_support += rule.salm_support;
    for (const std::string& commit_id : rule.example_commits) {
        const auto example = std::make_pair(commit_timestamp, commit_id);
        const auto pos = std::lower_bound(entry.examples.begin(), entry.examples.end(), example);
        if (pos != entry.examples.end() && pos->second == commit_id)
            continue;
        entry.examples.insert(pos, example);
    }
    if (entry.examples.size() > kMaxExampleCommits)
        entry.examples.resize(kMaxExampleCommits);
    entry.rule.example_commits.clear();
    for (const auto& [ts, commit_id] : entry.examples)
        entry.rule.example_commits.push_back(commit_id);
}

bool RuleSet::contains(const std::string& source, const std::string& target, PmtKind pmt) const {
    return rules_.contains(Key{source, target, pmt});
}

const MigrationRule* RuleSet::find(const std::string& source, const std::string& target,
                                   PmtKind pmt) const {
    const auto it = rules_.find(Key{source, target, pmt});
    return it == rules_.end() ? nullptr : &it->second.rule;
}

std::vector<MigrationRule> RuleSet::sorted() const {
    std::vector<MigrationRule> out;
    out.reserve(rules_.size());
    for (const auto& [key, entry] : rules_)
        out.push_back(entry.rule);
    return out;
}

PmtAliasTable PmtAliasTable::defaults() {
    PmtAliasTable table;
    table.add(PmtKind::conan, "conan");
    table.add(PmtKind::vcpkg, "vcpkg");
    table.add(PmtKind::meson, "meson");
    table.add(PmtKind::xmake, "xmake");
    table.add(PmtKind::gitsubmodule, "submodule");
    table.add(PmtKind::gitsubmodule, "gitsubmodule");
    table.add(PmtKind::gitsubmodule, "git submodule");
    table.add(PmtKind::deb, "deb");
    table.add(PmtKind::deb, "debian");
    table.add(PmtKind::pkgconfig, "pkg-config");
    table.add(PmtKind::pkgconfig, "pkgconfig");
    return table;
}

PmtAliasTable PmtAliasTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read pmt aliases file: " + path);
    PmtAliasTable table;
    std::string line;
    while (std::getline(in, line)) {
        const std::string_view t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const size_t tab = t.find('\t');
        if (tab == std::string_view::npos)
            continue;
        const std::optional<PmtKind> kind = pmt_from_string(trim(t.substr(0, tab)));
        if (kind)
            table.add(*kind, trim(t.substr(tab + 1)));
    }
    return table;
}

void PmtAliasTable::add(PmtKind pmt, std::string_view alias) {
    if (!alias.empty())
        aliases_[pmt].push_back(to_lower(alias));
}

bool PmtAliasTable::mentioned(PmtKind pmt, const std::string& lower_message) const {
    const auto it = aliases_.find(pmt);
    if (it == aliases_.end())
        return false;
    return std::any_of(it->second.begin(), it->second.end(), [&](const std::string& alias) {
        return lower_message.find(alias) != std::string::npos;
    });
}

std::vector<MigrationRule> extract_salm(const std::string& message, const CommitDelta& delta,
                                        const ExclusionList& exclusions,
                                        const SalmOptions& options) {
    std::vector<MigrationRule> rules;
    if (delta.removed.empty() || delta.added.empty())
        return rules;

    const std::vector<std::string> token_list = tokenize_message(message);
    const std::unordered_set<std::string> tokens(token_list.begin(), token_list.end());

    if (options.require_migration_verb) {
        const bool has_verb = std::any_of(
            token_list.begin(), token_list.end(), [&](const std::string& token) {
                return std::any_of(options.verb_stems.begin(), options.verb_stems.end(),
                                   [&](const std::string& stem) { return token.starts_with(stem); });
            });
        if (!has_verb)
            return rules;
    }
    auto mentioned = [&](const CanonicalName& name) {
        return std::any_of(name.aliases.begin(), name.aliases.end(),
                           [&](const std::string& alias) { return tokens.contains(alias); });
    };

    std::vector<const CanonicalName*> added_mentions;
    for (const CanonicalName& added : delta.added) {
        if (mentioned(added))
            added_mentions.push_back(&added);
    }
    if (added_mentions.empty())
        return rules;

    for (const CanonicalName& removed : delta.removed) {
        if (!mentioned(removed))
            continue;
        // Pair with the most similar mentioned added library; ties break
        // lexicographically on the target canonical.
        const CanonicalName* best = nullptr;
        double best_sim = -1.0;
        for (const CanonicalName* added : added_mentions) {
            const double sim = name_similarity(removed, *added);
            if (sim > best_sim || (sim == best_sim && best && added->canonical < best->canonical)) {
                best = added;
                best_sim = sim;
            }
        }
        if (!best || removed.canonical == best->canonical ||
            classify_pair(removed, *best, exclusions) != PairClass::nontrivial)
            continue;
        MigrationRule rule;
        rule.source = removed.canonical;
        rule.target = best->canonical;
        rule.pmt = delta.pmt;
        rule.salm_support = 1;
        rule.example_commits = {delta.commit.commit_id};
        rules.push_back(std::move(rule));
    }
    return rules;
}

std::optional<PmtMigration> extract_pmt_migration(const std::string& message,
                                                  std::span<const ManifestChange> changes,
                                                  const PmtAliasTable& aliases,
                                                  std::vector<PmtMigration>* unconfirmed) {
    if (changes.empty())
        return std::nullopt;

    auto decl_count = [](const std::optional<ParsedManifest>& m) {
        return m ? m->decls.size() : size_t{0};
    };
    bool removed_side[kPmtCount] = {};
    bool added_side[kPmtCount] = {};
    for (const ManifestChange& change : changes) {
        const int idx = static_cast<int>(change.pmt);
        const bool deleted = change.before && !change.after;
        const bool emptied =
            change.before && change.after && decl_count(change.before) > 0 && decl_count(change.after) == 0;
        const bool created = !change.before && change.after;
        const bool populated =
            change.before && change.after && decl_count(change.before) == 0 && decl_count(change.after) > 0;
        removed_side[idx] = removed_side[idx] || deleted || emptied;
        added_side[idx] = added_side[idx] || created || populated;
    }

    const std::string lower = to_lower(message);
    std::optional<PmtMigration> confirmed;
    for (PmtKind from : kAllPmts) {
        if (!removed_side[static_cast<int>(from)])
            continue;
        for (PmtKind to : kAllPmts) {
            if (to == from || !added_side[static_cast<int>(to)])
                continue;
            const PmtMigration migration{changes.front().commit, from, to};
            if (aliases.mentioned(from, lower) && aliases.mentioned(to, lower)) {
                if (!confirmed)
                    confirmed = migration;
            } else if (unconfirmed) {
                unconfirmed->push_back(migration);
            }
        }
    }
    return confirmed;
}

RuleSet mine_rules(std::span<const std::pair<CommitDelta, std::string>> corpus,
                   const ExclusionList& exclusions, const SalmOptions& options) {
    RuleSet rules;
    for (const auto& [delta, message] : corpus) {
        for (const MigrationRule& rule : extract_salm(message, delta, exclusions, options))
            rules.merge(rule, delta.commit.timestamp);
    }
    return rules;
}

} // namespace migmine
