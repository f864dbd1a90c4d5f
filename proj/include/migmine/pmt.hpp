#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace migmine {

// The seven package management tools whose manifests we mine.
// Order matches the stats table row order.
enum class PmtKind {
    conan,
    vcpkg,
    meson,
    xmake,
    pkgconfig,
    gitsubmodule,
    deb,
};

inline constexpr int kPmtCount = 7;

inline constexpr std::array<PmtKind, kPmtCount> kAllPmts = {
    PmtKind::conan,        PmtKind::vcpkg, PmtKind::meson,
    PmtKind::xmake,        PmtKind::pkgconfig,
    PmtKind::gitsubmodule, PmtKind::deb,
};

constexpr std::string_view to_string(PmtKind kind) {
    switch (kind) {
    case PmtKind::conan: return "conan";
    case PmtKind::vcpkg: return "vcpkg";
    case PmtKind::meson: return "meson";
    case PmtKind::xmake: return "xmake";
    case PmtKind::pkgconfig: return "pkgconfig";
    case PmtKind::gitsubmodule: return "gitsubmodule";
    case PmtKind::deb: return "deb";
    }
    return "unknown";
}

std::optional<PmtKind> pmt_from_string(std::string_view name);

} // namespace migmine
