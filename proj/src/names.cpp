#include "migmine/names.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

#include "migmine/strutil.hpp"

namespace migmine {

std::string_view to_string(PairClass c) {
    switch (c) {
    case PairClass::version_update: return "version_update";
    case PairClass::fork_swap: return "fork_swap";
    case PairClass::excluded: return "excluded";
    case PairClass::nontrivial: return "nontrivial";
    }
    return "unknown";
}

bool CanonicalName::has_alias(std::string_view a) const {
    return std::find(aliases.begin(), aliases.end(), a) != aliases.end();
}

std::string strip_version_suffix(std::string_view name) {
    size_t i = name.size();
    while (i > 0 && (std::isdigit(static_cast<unsigned char>(name[i - 1])) || name[i - 1] == '.'))
        --i;
    const std::string_view suffix = name.substr(i);
    if (suffix.empty() || suffix.find_first_of("0123456789") == std::string_view::npos)
        return std::string(name);
    if (i > 0 && name[i - 1] == '-')
        --i; // "-<digits>" form
    if (i == 0)
        return std::string(name); // stripping would empty the name
    return std::string(name.substr(0, i));
}

namespace {

bool is_git_url(std::string_view raw, PmtKind pmt) {
    if (pmt == PmtKind::gitsubmodule)
        return true;
    if (raw.find("://") != std::string_view::npos)
        return true;
    const size_t at = raw.find('@');
    return at != std::string_view::npos && at > 0 && raw.find(':', at) != std::string_view::npos;
}

// Path segments of a git URL, scheme/host query and fragment removed.
std::vector<std::string> url_segments(std::string_view url) {
    std::string s(url);
    if (const size_t q = s.find_first_of("?#"); q != std::string::npos)
        s.resize(q);
    if (const size_t scheme = s.find("://"); scheme != std::string::npos)
        s = s.substr(scheme + 3);
    else if (const size_t at = s.find('@'); at != std::string::npos) {
        // scp-like user@host:path
        s = s.substr(at + 1);
        if (const size_t colon = s.find(':'); colon != std::string::npos)
            s[colon] = '/';
    }
    std::vector<std::string> segments;
    for (const std::string& seg : split(s, '/')) {
        if (!seg.empty() && seg != "." && seg != "..")
            segments.push_back(seg);
    }
    return segments;
}

std::string strip_prefix_lib(std::string_view s) {
    std::string_view rest;
    if (s.starts_with("lib-"))
        rest = s.substr(4);
    else if (s.starts_with("lib"))
        rest = s.substr(3);
    else
        return std::string(s);
    return rest.empty() ? std::string(s) : std::string(rest);
}

std::string strip_suffix_dev(std::string_view s) {
    std::string_view rest;
    if (s.ends_with("-dev-tools"))
        rest = s.substr(0, s.size() - 10);
    else if (s.ends_with("-dev"))
        rest = s.substr(0, s.size() - 4);
    else
        return std::string(s);
    return rest.empty() ? std::string(s) : std::string(rest);
}

void push_alias(std::vector<std::string>& aliases, const std::string& a) {
    if (!a.empty() && std::find(aliases.begin(), aliases.end(), a) == aliases.end())
        aliases.push_back(a);
}

} // namespace

// The canonical form stays close to the name as published (migration rules
// read like the manifests do); the stripped forms are aliases used only for
// matching names in commit messages.
CanonicalName normalize(std::string_view raw_name, PmtKind pmt) {
    CanonicalName result;
    result.pmt = pmt;

    const std::string raw_lower = to_lower(raw_name);
    result.aliases.push_back(raw_lower);
    result.canonical = raw_lower;

    std::string base = raw_lower;
    if (is_git_url(raw_lower, pmt)) {
        const std::vector<std::string> segments = url_segments(raw_lower);
        std::string repo = segments.empty() ? raw_lower : segments.back();
        if (repo.ends_with(".git"))
            repo.resize(repo.size() - 4);
        result.origin_owner = segments.size() >= 2 ? segments[segments.size() - 2] : std::string();
        if (!repo.empty()) {
            base = repo;
            result.canonical = repo;
        }
        push_alias(result.aliases, base);
    }

    const std::string no_lib = strip_prefix_lib(base);
    push_alias(result.aliases, no_lib);
    const std::string no_dev = strip_suffix_dev(no_lib);
    push_alias(result.aliases, no_dev);
    push_alias(result.aliases, strip_version_suffix(no_dev));
    return result;
}

namespace {

size_t edit_distance(std::string_view a, std::string_view b) {
    if (a.size() < b.size())
        std::swap(a, b);
    std::vector<size_t> row(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j)
        row[j] = j;
    for (size_t i = 1; i <= a.size(); ++i) {
        size_t diag = row[0];
        row[0] = i;
        for (size_t j = 1; j <= b.size(); ++j) {
            const size_t next_diag = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1,
                               diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = next_diag;
        }
    }
    return row[b.size()];
}

} // namespace

double name_similarity(const CanonicalName& a, const CanonicalName& b) {
    double best = 0.0;
    for (const std::string& x : a.aliases) {
        for (const std::string& y : b.aliases) {
            if (x == y)
                return 1.0;
            const size_t longest = std::max(x.size(), y.size());
            if (longest == 0)
                continue;
            const double sim = 1.0 - static_cast<double>(edit_distance(x, y)) / static_cast<double>(longest);
            best = std::max(best, sim);
        }
    }
    return best;
}

ExclusionList ExclusionList::defaults() {
    ExclusionList list;
    list.add("debhelper", "debhelper-compat");
    return list;
}

ExclusionList ExclusionList::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read exclusions file: " + path);
    ExclusionList list = defaults();
    std::string line;
    while (std::getline(in, line)) {
        const std::string_view t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const size_t tab = t.find('\t');
        if (tab == std::string_view::npos)
            continue;
        list.add(trim(t.substr(0, tab)), trim(t.substr(tab + 1)));
    }
    return list;
}

void ExclusionList::add(std::string_view source, std::string_view target) {
    if (source.empty() || target.empty())
        return;
    pairs_.emplace_back(to_lower(source), to_lower(target));
}

bool ExclusionList::matches(const CanonicalName& removed, const CanonicalName& added) const {
    for (const auto& [source, target] : pairs_) {
        if (removed.has_alias(source) && added.has_alias(target))
            return true;
    }
    return false;
}

PairClass classify_pair(const CanonicalName& removed, const CanonicalName& added,
                        const ExclusionList& exclusions) {
    const std::string& raw_removed = removed.aliases.front();
    const std::string& raw_added = added.aliases.front();

    if (strip_version_suffix(removed.canonical) == strip_version_suffix(added.canonical) &&
        raw_removed != raw_added &&
        strip_version_suffix(raw_removed) == strip_version_suffix(raw_added))
        return PairClass::version_update;

    if (removed.origin_owner && added.origin_owner &&
        removed.canonical == added.canonical &&
        *removed.origin_owner != *added.origin_owner)
        return PairClass::fork_swap;

    if (exclusions.matches(removed, added))
        return PairClass::excluded;

    return PairClass::nontrivial;
}

} // namespace migmine
