#include "migmine/gitrepo.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>

#include "migmine/errors.hpp"
#include "migmine/process.hpp"
#include "migmine/strutil.hpp"

namespace fs = std::filesystem;

namespace migmine {

namespace {

constexpr char kRecordSep = '\x01';
constexpr char kFieldSep = '\x1f';
constexpr std::string_view kNullSha = "0000000000000000000000000000000000000000";

struct RawEntry {
    std::string status; // "M", "A", "D", "R<score>", ...
    std::string old_sha;
    std::string new_sha;
    std::string old_path;
    std::string new_path; // set for renames/copies
};

struct RawCommit {
    std::string id;
    std::string first_parent; // empty for root commits
    std::int64_t timestamp = 0;
    std::string message;
    std::vector<RawEntry> entries;
};

bool is_hex40(std::string_view s) {
    if (s.size() != 40)
        return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    });
}

// Parses `git log -z --raw --no-abbrev --find-renames --diff-merges=first-parent
// --format=%x01%H%x1f%P%x1f%ct%x1f%B%x1f`. Each record is
//   \x01 <sha> \x1f <parents> \x1f <ct> \x1f <body> \x1f \0 [raw entries]
// where raw entries are ":oldmode newmode oldsha newsha status\0path\0[path2\0]".
std::vector<RawCommit> parse_log(std::string_view out, std::vector<std::string>& diagnostics) {
    std::vector<RawCommit> commits;
    size_t i = 0;
    const size_t n = out.size();
    while (i < n) {
        if (out[i] != kRecordSep) {
            ++i;
            continue;
        }
        ++i;
        RawCommit commit;
        const size_t sha_end = out.find(kFieldSep, i);
        if (sha_end == std::string_view::npos || !is_hex40(out.substr(i, sha_end - i)))
            continue; // a \x01 byte inside a message, not a record start
        commit.id = std::string(out.substr(i, sha_end - i));
        size_t pos = sha_end + 1;
        const size_t parents_end = out.find(kFieldSep, pos);
        if (parents_end == std::string_view::npos)
            break;
        const std::string parents(out.substr(pos, parents_end - pos));
        commit.first_parent = split(parents, ' ').front();
        pos = parents_end + 1;
        const size_t ts_end = out.find(kFieldSep, pos);
        if (ts_end == std::string_view::npos)
            break;
        commit.timestamp = std::strtoll(std::string(out.substr(pos, ts_end - pos)).c_str(), nullptr, 10);
        pos = ts_end + 1;
        // The body runs until the trailing \x1f that the format string places
        // right before the -z record terminator.
        size_t body_end = pos;
        while (body_end < n && !(out[body_end] == kFieldSep &&
                                 (body_end + 1 >= n || out[body_end + 1] == '\0')))
            ++body_end;
        std::string_view body = out.substr(pos, body_end - pos);
        while (body.ends_with('\n') || body.ends_with('\r'))
            body.remove_suffix(1);
        commit.message = utf8_sanitize(body);
        pos = std::min(body_end + 2, n); // past \x1f and \0

        while (pos < n && out[pos] != kRecordSep) {
            if (out[pos] != ':') {
                ++pos;
                continue;
            }
            const size_t meta_end = out.find('\0', pos);
            if (meta_end == std::string_view::npos) {
                diagnostics.push_back("CorruptObject: truncated diff entry in commit " + commit.id);
                pos = n;
                break;
            }
            const std::vector<std::string> fields = split(std::string(out.substr(pos + 1, meta_end - pos - 1)), ' ');
            if (fields.size() < 5) {
                pos = meta_end + 1;
                continue;
            }
            RawEntry entry;
            entry.old_sha = fields[2];
            entry.new_sha = fields[3];
            entry.status = fields[4];
            const size_t path_end = out.find('\0', meta_end + 1);
            if (path_end == std::string_view::npos)
                break;
            entry.old_path = std::string(out.substr(meta_end + 1, path_end - meta_end - 1));
            pos = path_end + 1;
            if (!entry.status.empty() && (entry.status[0] == 'R' || entry.status[0] == 'C')) {
                const size_t second_end = out.find('\0', pos);
                if (second_end == std::string_view::npos)
                    break;
                entry.new_path = std::string(out.substr(pos, second_end - pos));
                pos = second_end + 1;
            }
            commit.entries.push_back(std::move(entry));
        }
        commits.push_back(std::move(commit));
    }
    return commits;
}

bool looks_like_repo(const fs::path& path) {
    std::error_code ec;
    if (!fs::is_directory(path, ec))
        return false;
    if (fs::exists(path / ".git", ec))
        return true;
    // bare layout
    return fs::exists(path / "HEAD", ec) && fs::exists(path / "objects", ec);
}

// One `git cat-file --batch` run resolving every needed blob.
std::map<std::string, std::string> fetch_blobs(const std::string& repo,
                                               const std::set<std::string>& shas,
                                               std::vector<std::string>& diagnostics) {
    std::map<std::string, std::string> blobs;
    if (shas.empty())
        return blobs;
    std::string request;
    for (const std::string& sha : shas)
        request += sha + "\n";
    const ProcessResult res =
        run_process({"git", "-C", repo, "cat-file", "--batch"}, &request);
    if (res.exit_code != 0)
        diagnostics.push_back("CorruptObject: git cat-file failed for " + repo + ": " + res.err);
    const std::string& out = res.out;
    size_t pos = 0;
    while (pos < out.size()) {
        const size_t header_end = out.find('\n', pos);
        if (header_end == std::string::npos)
            break;
        const std::vector<std::string> header = split(out.substr(pos, header_end - pos), ' ');
        pos = header_end + 1;
        if (header.size() >= 3 && header[1] == "blob") {
            const size_t size = std::strtoull(header[2].c_str(), nullptr, 10);
            if (pos + size > out.size())
                break;
            blobs[header[0]] = out.substr(pos, size);
            pos += size + 1; // trailing newline
        } else if (!header.empty()) {
            diagnostics.push_back("CorruptObject: unreadable blob " + header[0]);
        }
    }
    return blobs;
}

} // namespace

ScanResult scan_repo(const std::string& repo_path, const std::string& project_name) {
    if (!looks_like_repo(repo_path))
        throw RepoUnreadable("not a git repository: " + repo_path);

    ScanResult result;

    const ProcessResult head =
        run_process({"git", "-C", repo_path, "rev-parse", "--verify", "-q", "HEAD"});
    if (head.exit_code != 0)
        return result; // repository with no commits

    const ProcessResult log = run_process(
        {"git", "-C", repo_path, "log", "-z", "--raw", "--no-abbrev", "--find-renames",
         "--diff-merges=first-parent", "--format=%x01%H%x1f%P%x1f%ct%x1f%B%x1f"});
    if (log.exit_code != 0)
        throw RepoUnreadable("git log failed for " + repo_path + ": " + log.err);

    std::vector<RawCommit> commits = parse_log(log.out, result.diagnostics);

    struct PendingChange {
        const RawCommit* commit;
        std::string path;
        PmtKind pmt;
        std::string before_sha; // empty when side absent
        std::string after_sha;
    };
    std::vector<PendingChange> pending;
    std::set<std::string> needed;
    for (const RawCommit& commit : commits) {
        for (const RawEntry& entry : commit.entries) {
            const std::string& after_path = entry.new_path.empty() ? entry.old_path : entry.new_path;
            const std::optional<PmtKind> before_kind = detect_manifest(entry.old_path);
            const std::optional<PmtKind> after_kind = detect_manifest(after_path);
            const bool has_before = entry.old_sha != kNullSha && before_kind.has_value();
            const bool has_after = entry.new_sha != kNullSha && after_kind.has_value();
            if (!has_before && !has_after)
                continue;

            auto queue = [&](PendingChange change) {
                if (change.before_sha.empty() && change.after_sha.empty())
                    return;
                if (!change.before_sha.empty())
                    needed.insert(change.before_sha);
                if (!change.after_sha.empty())
                    needed.insert(change.after_sha);
                pending.push_back(std::move(change));
            };

            if (has_before && has_after && *before_kind != *after_kind) {
                // Renamed into a different PMT's manifest: a deletion of one
                // kind plus an addition of the other.
                queue({&commit, entry.old_path, *before_kind, entry.old_sha, ""});
                queue({&commit, after_path, *after_kind, "", entry.new_sha});
                continue;
            }
            PendingChange change;
            change.commit = &commit;
            change.pmt = has_after ? *after_kind : *before_kind;
            // Renames within one kind are the same manifest under a new path.
            change.path = has_after ? after_path : entry.old_path;
            if (has_before)
                change.before_sha = entry.old_sha;
            if (has_after)
                change.after_sha = entry.new_sha;
            queue(std::move(change));
        }
    }

    const std::map<std::string, std::string> blobs = fetch_blobs(repo_path, needed, result.diagnostics);

    for (const PendingChange& p : pending) {
        ManifestChange change;
        change.commit = {p.commit->id, p.commit->timestamp, p.commit->message, project_name};
        change.path = p.path;
        change.pmt = p.pmt;
        bool corrupt = false;
        if (!p.before_sha.empty()) {
            const auto it = blobs.find(p.before_sha);
            if (it == blobs.end())
                corrupt = true;
            else
                change.before = parse_manifest(p.pmt, it->second);
        }
        if (!p.after_sha.empty()) {
            const auto it = blobs.find(p.after_sha);
            if (it == blobs.end())
                corrupt = true;
            else
                change.after = parse_manifest(p.pmt, it->second);
        }
        if (corrupt) {
            result.diagnostics.push_back("CorruptObject: skipped " + p.path + " in commit " +
                                         p.commit->id);
            continue;
        }
        result.changes.push_back(std::move(change));
    }

    std::sort(result.changes.begin(), result.changes.end(),
              [](const ManifestChange& a, const ManifestChange& b) {
                  return std::tie(a.commit.timestamp, a.commit.commit_id, a.path) <
                         std::tie(b.commit.timestamp, b.commit.commit_id, b.path);
              });
    return result;
}

ScanResult scan_repo(const std::string& repo_path) {
    fs::path p(repo_path);
    std::string name = p.filename().string();
    if (name.empty())
        name = p.parent_path().filename().string();
    return scan_repo(repo_path, name);
}

namespace {

std::vector<CanonicalName> normalized_set(const std::optional<ParsedManifest>& manifest) {
    std::vector<CanonicalName> names;
    if (!manifest)
        return names;
    for (const DependencyDecl& decl : manifest->decls)
        names.push_back(normalize(decl.raw_name, decl.pmt));
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    return names;
}

using NameKey = std::pair<std::string, std::optional<std::string>>;

NameKey key_of(const CanonicalName& name) {
    return {name.canonical, name.origin_owner};
}

// Union preserving alias information: when the same library arrives twice
// (e.g. "libfoo" and "foo"), alias sets merge.
void merge_into(std::map<NameKey, CanonicalName>& dest, const std::vector<CanonicalName>& src) {
    for (const CanonicalName& name : src) {
        auto [it, inserted] = dest.try_emplace(key_of(name), name);
        if (!inserted) {
            for (const std::string& alias : name.aliases) {
                if (!it->second.has_alias(alias))
                    it->second.aliases.push_back(alias);
            }
        }
    }
}

std::vector<CanonicalName> set_difference_by_name(const std::map<NameKey, CanonicalName>& a,
                                                  const std::map<NameKey, CanonicalName>& b) {
    std::vector<CanonicalName> out;
    for (const auto& [key, name] : a) {
        if (!b.contains(key))
            out.push_back(name);
    }
    return out;
}

} // namespace

CommitDelta diff_dependencies(const ManifestChange& change) {
    std::map<NameKey, CanonicalName> before, after;
    merge_into(before, normalized_set(change.before));
    merge_into(after, normalized_set(change.after));
    CommitDelta delta;
    delta.commit = change.commit;
    delta.pmt = change.pmt;
    delta.added = set_difference_by_name(after, before);
    delta.removed = set_difference_by_name(before, after);
    return delta;
}

std::vector<CommitDelta> diff_dependencies(std::span<const ManifestChange> changes) {
    // (project, commit, pmt) -> accumulated added/removed canonical maps
    struct Acc {
        CommitInfo commit;
        PmtKind pmt;
        std::map<NameKey, CanonicalName> added;
        std::map<NameKey, CanonicalName> removed;
    };
    std::map<std::tuple<std::string, std::string, PmtKind>, Acc> groups;
    for (const ManifestChange& change : changes) {
        const CommitDelta single = diff_dependencies(change);
        auto key = std::make_tuple(change.commit.project, change.commit.commit_id, change.pmt);
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) {
            it->second.commit = change.commit;
            it->second.pmt = change.pmt;
        }
        merge_into(it->second.added, single.added);
        merge_into(it->second.removed, single.removed);
    }

    std::vector<CommitDelta> deltas;
    for (auto& [key, acc] : groups) {
        CommitDelta delta;
        delta.commit = acc.commit;
        delta.pmt = acc.pmt;
        // Moves within one PMT cancel out.
        delta.added = set_difference_by_name(acc.added, acc.removed);
        delta.removed = set_difference_by_name(acc.removed, acc.added);
        deltas.push_back(std::move(delta));
    }
    std::sort(deltas.begin(), deltas.end(), [](const CommitDelta& a, const CommitDelta& b) {
        return std::tie(a.commit.project, a.commit.timestamp, a.commit.commit_id, a.pmt) <
               std::tie(b.commit.project, b.commit.timestamp, b.commit.commit_id, b.pmt);
    });
    return deltas;
}

std::vector<CandidateMigration> candidate_migrations(const CommitDelta& delta,
                                                     const ExclusionList& exclusions,
                                                     int bulk_threshold) {
    std::vector<CandidateMigration> candidates;
    if (delta.removed.empty() || delta.added.empty())
        return candidates;
    // Bulk manifest restructurings would explode the cross product; SALM
    // matching recovers anything real later.
    if (bulk_threshold > 0 &&
        (delta.removed.size() > static_cast<size_t>(bulk_threshold) ||
         delta.added.size() > static_cast<size_t>(bulk_threshold)))
        return candidates;
    for (const CanonicalName& source : delta.removed) {
        for (const CanonicalName& target : delta.added) {
            const PairClass cls = classify_pair(source, target, exclusions);
            if (cls != PairClass::nontrivial)
                continue;
            candidates.push_back({delta.commit, delta.pmt, source, target, cls});
        }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const CandidateMigration& a, const CandidateMigration& b) {
                  return std::tie(a.source.canonical, a.target.canonical) <
                         std::tie(b.source.canonical, b.target.canonical);
              });
    return candidates;
}

} // namespace migmine
