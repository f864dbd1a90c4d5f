#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "migmine/pmt.hpp"

namespace migmine {

// One dependency declaration exactly as written in a manifest.
struct DependencyDecl {
    std::string raw_name; // non-empty, no whitespace
    PmtKind pmt;
    std::string field; // manifest field it came from, e.g. "build-depends"
    int line = 1;      // 1-based source line

    friend bool operator==(const DependencyDecl&, const DependencyDecl&) = default;
};

struct ParsedManifest {
    PmtKind pmt;
    // Deduplicated on raw_name (smallest line wins), sorted by (line, raw_name).
    std::vector<DependencyDecl> decls;
    // Structural problems ("MalformedManifest: ..."); parsing never throws.
    std::vector<std::string> diagnostics;

    bool contains(std::string_view raw_name) const;
};

// Maps a repository-relative path onto the PMT whose manifest it is, or
// nothing. Matching is case-sensitive on the documented file names:
// meson.build, xmake.lua, debian/control, conanfile.txt / conanfile.py,
// vcpkg.json, *.pc, .gitmodules.
std::optional<PmtKind> detect_manifest(std::string_view relative_path);

// Extracts every dependency declaration from the given manifest text. Pure:
// output depends only on (kind, content). Unparseable structured content
// yields empty decls plus a diagnostic instead of an error.
ParsedManifest parse_manifest(PmtKind kind, std::string_view content);

} // namespace migmine
