#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "migmine/pmt.hpp"

namespace migmine {

// A library name canonicalized per PMT convention. aliases holds every
// lowercase form the library may be referred to by, in generation order:
// raw form, then progressively affix- and version-stripped forms. The raw
// (lowercased) form is always aliases.front(); canonical is the
// affix-stripped form with any version suffix kept.
struct CanonicalName {
    std::string canonical;
    std::vector<std::string> aliases;
    std::optional<std::string> origin_owner; // set iff the raw name was a git URL
    PmtKind pmt = PmtKind::conan;

    bool has_alias(std::string_view a) const;

    // Identity for set arithmetic: canonical plus origin owner, so a
    // submodule URL swap to a fork (same repo name, different owner) stays
    // visible as a removal plus an addition instead of cancelling out.
    friend bool operator==(const CanonicalName& a, const CanonicalName& b) {
        return a.canonical == b.canonical && a.origin_owner == b.origin_owner;
    }
    friend auto operator<=>(const CanonicalName& a, const CanonicalName& b) {
        if (const auto c = a.canonical <=> b.canonical; c != 0)
            return c;
        return a.origin_owner <=> b.origin_owner;
    }
};

enum class PairClass {
    version_update,
    fork_swap,
    excluded,
    nontrivial,
};

std::string_view to_string(PairClass c);

// Strips one trailing version suffix: "-<digits>" or bare trailing digits
// with optional dots ("qt4" -> "qt", "gtk-3.0" -> "gtk"). A strip that would
// empty the name is skipped.
std::string strip_version_suffix(std::string_view name);

CanonicalName normalize(std::string_view raw_name, PmtKind pmt);

// Max over alias pairs of 1 - editdistance(x, y) / max(|x|, |y|).
// Symmetric; 1.0 when any alias pair is equal.
double name_similarity(const CanonicalName& a, const CanonicalName& b);

// Library pairs excluded from migration detection. Entries match on aliases,
// so listing raw or canonical forms both work.
class ExclusionList {
public:
    // The built-in list: <debhelper, debhelper-compat>.
    static ExclusionList defaults();
    static ExclusionList load(const std::string& path);

    void add(std::string_view source, std::string_view target);
    bool matches(const CanonicalName& removed, const CanonicalName& added) const;
    const std::vector<std::pair<std::string, std::string>>& entries() const { return pairs_; }

private:
    std::vector<std::pair<std::string, std::string>> pairs_;
};

// Classifies a (removed, added) pair as a trivial change or a genuine
// migration candidate. Precedence: version_update, fork_swap, excluded,
// nontrivial.
PairClass classify_pair(const CanonicalName& removed, const CanonicalName& added,
                        const ExclusionList& exclusions);

} // namespace migmine
