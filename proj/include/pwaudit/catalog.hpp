#pragma once

#include "pwaudit/json.hpp"
#include "pwaudit/rules.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pwaudit {

struct ViolationRecord {
    std::string risk_name;
    char cia = 'C'; // single letter: C, I or A
    int browser_count = 0;
    Phase phase = Phase::pre_installation;
    std::string notes;

    bool operator==(const ViolationRecord&) const = default;
};

enum class Browser { safari, firefox, chrome, edge, opera, brave, samsung_internet, tor_browser };
enum class Os { linux_os, macos, windows, ios, android };
enum class PlatformKind { desktop, mobile };

enum class InstallSupport { supported, unsupported, browser_unavailable, add_to_dock };
enum class ProfileSupport {
    multi_profile_isolated,
    multi_profile_not_isolated,
    no_multi_profile,
    unsupported,
    unavailable,
};

std::string_view browser_name(Browser b);
std::string_view os_name(Os o);
std::string_view platform_name(PlatformKind p);
std::string_view install_support_name(InstallSupport s);
std::string_view profile_support_name(ProfileSupport s);
std::optional<Browser> browser_from_name(std::string_view name);
std::optional<Os> os_from_name(std::string_view name);
PlatformKind platform_of(Os o);

struct BrowserProfile {
    Browser browser;
    Os os;
    PlatformKind platform;
    InstallSupport install_support;
    ProfileSupport profile_support;

    bool operator==(const BrowserProfile&) const = default;
};

struct CiaTally {
    int c = 0;
    int i = 0;
    int a = 0;
    int total = 0;

    bool operator==(const CiaTally&) const = default;
};

struct UninstallGuide {
    Browser browser;
    Os os;
    std::vector<std::string> steps;
    std::string fallback; // universal last resort, always present
};

// Loads the embedded risk catalog. The data blob is checksummed; throws
// CatalogCorrupt on any mismatch or malformed row.
std::vector<ViolationRecord> load_catalog();

CiaTally cia_tally(const std::vector<ViolationRecord>& catalog);

// Throws UnknownCombination when the pair is not in the support grid.
BrowserProfile browser_support(Browser browser, Os os);
const std::vector<BrowserProfile>& support_grid();

UninstallGuide uninstall_guide(Browser browser, Os os);

Json catalog_to_json(const std::vector<ViolationRecord>& catalog);
Json tally_to_json(const CiaTally& tally);
Json profile_to_json(const BrowserProfile& profile);
Json guide_to_json(const UninstallGuide& guide);

} // namespace pwaudit
