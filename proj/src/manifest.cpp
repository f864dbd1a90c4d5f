#include "migmine/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>

#include <json.hpp>

#include "migmine/strutil.hpp"

namespace migmine {

std::optional<PmtKind> pmt_from_string(std::string_view name) {
    for (PmtKind kind : kAllPmts) {
        if (to_string(kind) == name)
            return kind;
    }
    return std::nullopt;
}

bool ParsedManifest::contains(std::string_view raw_name) const {
    return std::any_of(decls.begin(), decls.end(),
                       [&](const DependencyDecl& d) { return d.raw_name == raw_name; });
}

namespace {

std::string_view basename_of(std::string_view path) {
    const size_t pos = path.find_last_of('/');
    return pos == std::string_view::npos ? path : path.substr(pos + 1);
}

bool has_whitespace(std::string_view s) {
    return std::any_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

int line_of_offset(std::string_view content, size_t offset) {
    return 1 + static_cast<int>(std::count(content.begin(), content.begin() + std::min(offset, content.size()), '\n'));
}

// Blanks out line comments outside of string literals, preserving offsets
// and newlines so line numbers stay valid.
std::string strip_line_comments(std::string_view text, const std::vector<std::string>& markers,
                                std::string_view quote_chars) {
    std::string out(text);
    char quote = 0;
    for (size_t i = 0; i < out.size();) {
        const char c = out[i];
        if (quote != 0) {
            if (c == '\\' && i + 1 < out.size())
                i += 2;
            else {
                if (c == quote)
                    quote = 0;
                ++i;
            }
            continue;
        }
        if (quote_chars.find(c) != std::string_view::npos) {
            quote = c;
            ++i;
            continue;
        }
        bool matched = false;
        for (const std::string& marker : markers) {
            if (out.compare(i, marker.size(), marker) == 0) {
                while (i < out.size() && out[i] != '\n')
                    out[i++] = ' ';
                matched = true;
                break;
            }
        }
        if (!matched)
            ++i;
    }
    return out;
}

class DeclCollector {
public:
    explicit DeclCollector(PmtKind pmt) : pmt_(pmt) {}

    void add(std::string_view raw_name, std::string_view field, int line) {
        if (raw_name.empty() || has_whitespace(raw_name))
            return;
        auto [it, inserted] = by_name_.try_emplace(std::string(raw_name), 0);
        if (inserted) {
            decls_.push_back({std::string(raw_name), pmt_, std::string(field), line});
            it->second = decls_.size() - 1;
        } else if (line < decls_[it->second].line) {
            decls_[it->second].line = line;
        }
    }

    std::vector<DependencyDecl> take() {
        std::sort(decls_.begin(), decls_.end(), [](const auto& a, const auto& b) {
            return std::tie(a.line, a.raw_name) < std::tie(b.line, b.raw_name);
        });
        return std::move(decls_);
    }

private:
    PmtKind pmt_;
    std::vector<DependencyDecl> decls_;
    std::map<std::string, size_t> by_name_;
};

// --- meson ---------------------------------------------------------------
// dependency('name', ...) first-argument string literals; all branches of
// conditionals contribute.

void parse_meson(std::string_view content, DeclCollector& out) {
    const std::string text = strip_line_comments(content, {"#"}, "'");
    static const std::regex re(R"((^|[^A-Za-z0-9_.])dependency\s*\(\s*'([^']*)')",
                               std::regex::optimize);
    for (auto it = std::cregex_iterator(text.data(), text.data() + text.size(), re);
         it != std::cregex_iterator(); ++it) {
        const auto& m = *it;
        out.add(m.str(2), "dependency", line_of_offset(text, static_cast<size_t>(m.position(2))));
    }
}

// --- xmake ---------------------------------------------------------------
// add_requires(...) string arguments at brace depth zero. Entries may carry
// a version after whitespace ("zlib 1.2.x") or a slash pin
// ("conan::catch2/2.13.7"); both are stripped from the name.

std::string xmake_strip_version(std::string_view entry) {
    std::string name(trim(entry));
    if (const size_t sp = name.find_first_of(" \t"); sp != std::string::npos)
        name.resize(sp);
    // A slash pin, but keep repository prefixes like "conan::pkg" intact.
    if (const size_t slash = name.find('/'); slash != std::string::npos)
        name.resize(slash);
    return name;
}

void parse_xmake(std::string_view content, DeclCollector& out) {
    const std::string text = strip_line_comments(content, {"--", "#"}, "'\"");
    static const std::regex re(R"((^|[^A-Za-z0-9_.])add_requires\s*(\()?)", std::regex::optimize);
    for (auto it = std::cregex_iterator(text.data(), text.data() + text.size(), re);
         it != std::cregex_iterator(); ++it) {
        size_t i = static_cast<size_t>(it->position(0)) + it->length(0);
        const bool parens = (*it)[2].matched;
        int paren_depth = parens ? 1 : 0;
        int brace_depth = 0;
        while (i < text.size()) {
            const char c = text[i];
            if (c == '\'' || c == '"') {
                const char q = c;
                const size_t start = ++i;
                while (i < text.size() && text[i] != q)
                    ++i;
                if (brace_depth == 0) {
                    const std::string name = xmake_strip_version(text.substr(start, i - start));
                    out.add(name, "add_requires", line_of_offset(text, start));
                }
                if (i < text.size())
                    ++i;
                if (!parens)
                    break; // call sugar form takes a single literal
                continue;
            }
            if (!parens)
                break;
            if (c == '(')
                ++paren_depth;
            else if (c == ')') {
                if (--paren_depth == 0)
                    break;
            } else if (c == '{')
                ++brace_depth;
            else if (c == '}')
                brace_depth = std::max(0, brace_depth - 1);
            ++i;
        }
    }
}

// --- deb (debian/control) ------------------------------------------------
// Build-Depends/Depends comma lists across all stanzas. Version constraints
// "(...)", architecture lists "[...]", build profiles "<...>" and arch
// qualifiers ":any" are stripped; alternatives "a | b" contribute every
// alternative; "${...}" substitution variables are not package names.

std::string deb_clean_entry(std::string_view entry) {
    std::string name;
    int paren = 0, bracket = 0, angle = 0;
    for (char c : entry) {
        if (c == '(')
            ++paren;
        else if (c == ')')
            paren = std::max(0, paren - 1);
        else if (c == '[')
            ++bracket;
        else if (c == ']')
            bracket = std::max(0, bracket - 1);
        else if (c == '<')
            ++angle;
        else if (c == '>')
            angle = std::max(0, angle - 1);
        else if (paren == 0 && bracket == 0 && angle == 0)
            name += c;
    }
    std::string trimmed(trim(name));
    if (const size_t colon = trimmed.find(':'); colon != std::string::npos)
        trimmed.resize(colon); // arch qualifier such as ":any"
    return std::string(trim(trimmed));
}

void parse_deb(std::string_view content, DeclCollector& out) {
    struct Field {
        std::string name;
        std::string value;
        int line = 1;
    };
    std::vector<Field> fields;
    int line_no = 0;
    for (const std::string& line : split(content, '\n')) {
        ++line_no;
        if (!line.empty() && line.front() == '#')
            continue;
        if (!line.empty() && (line.front() == ' ' || line.front() == '\t')) {
            if (!fields.empty())
                fields.back().value += " " + std::string(trim(line));
            continue;
        }
        const size_t colon = line.find(':');
        if (colon == std::string::npos) {
            if (trim(line).empty() && !fields.empty())
                fields.emplace_back(); // stanza break; sentinel stops continuations
            continue;
        }
        Field f;
        f.name = to_lower(trim(line.substr(0, colon)));
        f.value = std::string(trim(line.substr(colon + 1)));
        f.line = line_no;
        fields.push_back(std::move(f));
    }
    for (const Field& f : fields) {
        if (f.name != "build-depends" && f.name != "depends")
            continue;
        for (const std::string& entry : split(f.value, ',')) {
            for (const std::string& alternative : split(entry, '|')) {
                const std::string name = deb_clean_entry(alternative);
                if (name.find('$') != std::string::npos)
                    continue;
                out.add(name, f.name, f.line);
            }
        }
    }
}

// --- conan (conanfile.txt / conanfile.py) ---------------------------------
// Both lexical extractions run and their results union, so the caller never
// needs to know which flavor the blob was.

std::string conan_strip_pin(std::string_view entry) {
    std::string name(trim(entry));
    if (const size_t slash = name.find('/'); slash != std::string::npos)
        name.resize(slash);
    if (const size_t at = name.find('@'); at != std::string::npos)
        name.resize(at);
    return name;
}

void parse_conan_txt(std::string_view content, DeclCollector& out) {
    std::string section;
    int line_no = 0;
    for (const std::string& raw_line : split(content, '\n')) {
        ++line_no;
        std::string line = raw_line;
        if (const size_t hash = line.find('#'); hash != std::string::npos)
            line.resize(hash);
        const std::string_view t = trim(line);
        if (t.empty())
            continue;
        if (t.front() == '[' && t.back() == ']') {
            section = to_lower(t.substr(1, t.size() - 2));
            continue;
        }
        if (section != "requires" && section != "build_requires")
            continue;
        out.add(conan_strip_pin(t), section, line_no);
    }
}

// String literals assigned to or passed to a requires-named field/call,
// without evaluating any Python.
void parse_conan_py(std::string_view content, DeclCollector& out) {
    const std::string text(content);
    const size_t n = text.size();
    size_t i = 0;

    auto skip_string = [&](size_t pos, std::string* value) -> size_t {
        const char q = text[pos];
        const bool triple = pos + 2 < n && text[pos + 1] == q && text[pos + 2] == q;
        const size_t len = triple ? 3 : 1;
        size_t j = pos + len;
        while (j < n) {
            if (text[j] == '\\') {
                j += 2;
                continue;
            }
            const bool closes = triple ? (j + 2 < n && text[j] == q && text[j + 1] == q &&
                                          text[j + 2] == q)
                                       : text[j] == q;
            if (closes) {
                if (value)
                    *value = text.substr(pos + len, j - pos - len);
                return j + len;
            }
            ++j;
        }
        return n;
    };

    auto is_ident_char = [&](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
    };

    auto collect_strings = [&](size_t pos, bool until_paren_close, const std::string& field) -> size_t {
        int depth = until_paren_close ? 1 : 0;
        while (pos < n) {
            const char c = text[pos];
            if (c == '#') {
                while (pos < n && text[pos] != '\n')
                    ++pos;
                continue;
            }
            if (c == '\'' || c == '"') {
                std::string value;
                const size_t line_pos = pos;
                pos = skip_string(pos, &value);
                out.add(conan_strip_pin(value), field, line_of_offset(text, line_pos));
                continue;
            }
            if (c == '(' || c == '[' || c == '{')
                ++depth;
            else if (c == ')' || c == ']' || c == '}') {
                --depth;
                if (depth <= 0 && until_paren_close)
                    return pos + 1;
                if (depth < 0)
                    return pos + 1;
            } else if (c == '\n' && depth == 0 && !until_paren_close)
                return pos + 1;
            ++pos;
        }
        return n;
    };

    while (i < n) {
        const char c = text[i];
        if (c == '#') {
            while (i < n && text[i] != '\n')
                ++i;
            continue;
        }
        if (c == '\'' || c == '"') {
            i = skip_string(i, nullptr);
            continue;
        }
        if (!is_ident_char(c) || std::isdigit(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const size_t start = i;
        while (i < n && is_ident_char(text[i]))
            ++i;
        const std::string ident = text.substr(start, i - start);
        if (ident != "requires" && ident != "build_requires")
            continue;
        size_t j = i;
        while (j < n && (text[j] == ' ' || text[j] == '\t'))
            ++j;
        if (j < n && text[j] == '(') {
            i = collect_strings(j + 1, true, ident);
        } else if (j < n && text[j] == '=' && (j + 1 >= n || text[j + 1] != '=')) {
            i = collect_strings(j + 1, false, ident);
        }
    }
}

void parse_conan(std::string_view content, DeclCollector& out) {
    parse_conan_txt(content, out);
    parse_conan_py(content, out);
}

// --- vcpkg (vcpkg.json) ----------------------------------------------------

void parse_vcpkg(std::string_view content, DeclCollector& out, std::vector<std::string>& diagnostics) {
    if (trim(content).empty())
        return;
    nlohmann::json doc = nlohmann::json::parse(content, nullptr, false);
    if (doc.is_discarded()) {
        diagnostics.push_back("MalformedManifest: vcpkg.json is not valid JSON");
        return;
    }
    if (!doc.is_object()) {
        diagnostics.push_back("MalformedManifest: vcpkg.json top-level is not an object");
        return;
    }
    const auto deps = doc.find("dependencies");
    if (deps == doc.end())
        return;
    if (!deps->is_array()) {
        diagnostics.push_back("MalformedManifest: vcpkg.json \"dependencies\" is not an array");
        return;
    }
    auto line_of_name = [&](const std::string& name) {
        const size_t pos = content.find("\"" + name + "\"");
        return pos == std::string_view::npos ? 1 : line_of_offset(content, pos);
    };
    for (const auto& entry : *deps) {
        std::string name;
        if (entry.is_string())
            name = entry.get<std::string>();
        else if (entry.is_object() && entry.contains("name") && entry["name"].is_string())
            name = entry["name"].get<std::string>();
        if (!name.empty())
            out.add(name, "dependencies", line_of_name(name));
    }
}

// --- pkgconfig (*.pc) -------------------------------------------------------
// "Requires:" whitespace/comma-separated tokens; trailing version
// constraints (">= 1.2", glued or spaced) are stripped.

void parse_pkgconfig(std::string_view content, DeclCollector& out) {
    int line_no = 0;
    for (const std::string& raw_line : split(content, '\n')) {
        ++line_no;
        std::string line = raw_line;
        if (const size_t hash = line.find('#'); hash != std::string::npos)
            line.resize(hash);
        const size_t colon = line.find(':');
        if (colon == std::string::npos || std::string(trim(line.substr(0, colon))) != "Requires")
            continue;
        std::string value = line.substr(colon + 1);
        std::replace(value.begin(), value.end(), ',', ' ');
        std::vector<std::string> tokens;
        for (const std::string& tok : split(value, ' ')) {
            if (!trim(tok).empty())
                tokens.emplace_back(trim(tok));
        }
        bool skip_next = false;
        for (const std::string& tok : tokens) {
            if (skip_next) {
                skip_next = false;
                continue;
            }
            const size_t op = tok.find_first_of("<>=!");
            if (op == 0) {
                skip_next = true; // operator token; the version follows
                continue;
            }
            std::string name = (op == std::string::npos) ? tok : tok.substr(0, op);
            if (op != std::string::npos && tok.find_first_of("0123456789", op) == std::string::npos)
                skip_next = true; // "name >=" split across tokens
            if (name.find('$') != std::string::npos)
                continue;
            out.add(name, "Requires", line_no);
        }
    }
}

// --- gitsubmodule (.gitmodules) ----------------------------------------------

void parse_gitmodules(std::string_view content, DeclCollector& out) {
    bool in_submodule = false;
    int line_no = 0;
    for (const std::string& raw_line : split(content, '\n')) {
        ++line_no;
        std::string line = raw_line;
        if (const size_t hash = line.find_first_of("#;"); hash != std::string::npos)
            line.resize(hash);
        const std::string_view t = trim(line);
        if (t.empty())
            continue;
        if (t.front() == '[') {
            in_submodule = to_lower(t).compare(0, 10, "[submodule") == 0;
            continue;
        }
        if (!in_submodule)
            continue;
        const size_t eq = t.find('=');
        if (eq == std::string_view::npos)
            continue;
        if (to_lower(trim(t.substr(0, eq))) != "url")
            continue;
        out.add(trim(t.substr(eq + 1)), "url", line_no);
    }
}

} // namespace

std::optional<PmtKind> detect_manifest(std::string_view relative_path) {
    const std::string_view base = basename_of(relative_path);
    if (base == "meson.build")
        return PmtKind::meson;
    if (base == "xmake.lua")
        return PmtKind::xmake;
    if (base == "control") {
        const std::string_view dir = relative_path.substr(0, relative_path.size() - base.size());
        if (dir == "debian/" || dir.ends_with("/debian/"))
            return PmtKind::deb;
        return std::nullopt;
    }
    if (base == "conanfile.txt" || base == "conanfile.py")
        return PmtKind::conan;
    if (base == "vcpkg.json")
        return PmtKind::vcpkg;
    if (base.size() > 3 && base.ends_with(".pc"))
        return PmtKind::pkgconfig;
    if (base == ".gitmodules")
        return PmtKind::gitsubmodule;
    return std::nullopt;
}

ParsedManifest parse_manifest(PmtKind kind, std::string_view content) {
    const std::string text = utf8_sanitize(content);
    ParsedManifest result{kind, {}, {}};
    DeclCollector collector(kind);
    switch (kind) {
    case PmtKind::meson:
        parse_meson(text, collector);
        break;
    case PmtKind::xmake:
        parse_xmake(text, collector);
        break;
    case PmtKind::deb:
        parse_deb(text, collector);
        break;
    case PmtKind::conan:
        parse_conan(text, collector);
        break;
    case PmtKind::vcpkg:
        parse_vcpkg(text, collector, result.diagnostics);
        break;
    case PmtKind::pkgconfig:
        parse_pkgconfig(text, collector);
        break;
    case PmtKind::gitsubmodule:
        parse_gitmodules(text, collector);
        break;
    }
    result.decls = collector.take();
    return result;
}

} // namespace migmine
