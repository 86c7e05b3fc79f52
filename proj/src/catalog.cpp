#include "pwaudit/catalog.hpp"

#include "pwaudit/errors.hpp"
#include "pwaudit/text.hpp"

#include <array>
#include <map>
#include <sstream>

namespace pwaudit {

namespace {

#include "catalog_data.inc"

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

Phase phase_from_short(std::string_view tag) {
    if (tag == "pre") return Phase::pre_installation;
    if (tag == "install") return Phase::installation;
    if (tag == "post") return Phase::post_installation;
    if (tag == "uninstall") return Phase::uninstallation;
    throw CatalogCorrupt("unknown phase tag: " + std::string(tag));
}

constexpr std::array<Browser, 8> kBrowserColumns = {
    Browser::safari, Browser::firefox, Browser::chrome,  Browser::edge,
    Browser::opera,  Browser::brave,   Browser::samsung_internet, Browser::tor_browser};

constexpr std::array<Os, 5> kOsRows = {Os::linux_os, Os::macos, Os::windows, Os::ios,
                                       Os::android};

Os os_from_data(std::string_view tag) {
    if (tag == "linux") return Os::linux_os;
    if (tag == "macos") return Os::macos;
    if (tag == "windows") return Os::windows;
    if (tag == "ios") return Os::ios;
    if (tag == "android") return Os::android;
    throw CatalogCorrupt("unknown OS tag: " + std::string(tag));
}

InstallSupport install_from_cell(std::string_view cell) {
    if (cell == "s") return InstallSupport::supported;
    if (cell == "x") return InstallSupport::unsupported;
    if (cell == "-") return InstallSupport::browser_unavailable;
    if (cell == "d") return InstallSupport::add_to_dock;
    throw CatalogCorrupt("unknown install cell: " + std::string(cell));
}

ProfileSupport profile_from_cell(std::string_view cell) {
    if (cell == "i") return ProfileSupport::multi_profile_isolated;
    if (cell == "n") return ProfileSupport::multi_profile_not_isolated;
    if (cell == "p") return ProfileSupport::no_multi_profile;
    if (cell == "x") return ProfileSupport::unsupported;
    if (cell == "-") return ProfileSupport::unavailable;
    throw CatalogCorrupt("unknown profile cell: " + std::string(cell));
}

struct ParsedData {
    std::vector<ViolationRecord> catalog;
    std::vector<BrowserProfile> grid;
    std::map<std::pair<Browser, Os>, std::vector<std::string>> uninstall_steps;
};

const ParsedData& parsed_data() {
    static const ParsedData data = [] {
        std::string_view blob(kCatalogData);
        std::size_t first_newline = blob.find('\n');
        if (first_newline == std::string_view::npos)
            throw CatalogCorrupt("catalog data has no checksum line");
        std::string_view checksum_line = blob.substr(0, first_newline);
        std::string_view payload = blob.substr(first_newline + 1);
        if (!starts_with(checksum_line, "fnv1a64:"))
            throw CatalogCorrupt("catalog checksum line is malformed");
        std::string expected(checksum_line.substr(8));
        if (to_hex(fnv1a64(payload)) != expected)
            throw CatalogCorrupt("catalog checksum mismatch");

        ParsedData out;
        std::map<std::pair<Browser, Os>, InstallSupport> install;
        std::map<std::pair<Browser, Os>, ProfileSupport> profile;

        std::string section;
        std::istringstream lines{std::string(payload)};
        std::string line;
        while (std::getline(lines, line)) {
            if (line.empty())
                continue;
            if (line.front() == '[') {
                section = line;
                continue;
            }
            auto cols = split(line, '|');
            if (section == "[catalog]") {
                if (cols.size() != 5)
                    throw CatalogCorrupt("catalog row has wrong arity: " + line);
                ViolationRecord rec;
                rec.risk_name = cols[0];
                if (cols[1].size() != 1 || (cols[1] != "C" && cols[1] != "I" && cols[1] != "A"))
                    throw CatalogCorrupt("bad CIA letter in: " + line);
                rec.cia = cols[1][0];
                rec.browser_count = std::stoi(cols[2]);
                if (rec.browser_count < 1)
                    throw CatalogCorrupt("browser count below 1 in: " + line);
                rec.phase = phase_from_short(cols[3]);
                rec.notes = cols[4];
                for (const ViolationRecord& existing : out.catalog)
                    if (existing.risk_name == rec.risk_name)
                        throw CatalogCorrupt("duplicate risk name: " + rec.risk_name);
                out.catalog.push_back(std::move(rec));
            } else if (section == "[install_support]" || section == "[profile_support]") {
                if (cols.size() != 1 + kBrowserColumns.size())
                    throw CatalogCorrupt("support row has wrong arity: " + line);
                Os os = os_from_data(cols[0]);
                for (std::size_t b = 0; b < kBrowserColumns.size(); ++b) {
                    auto key = std::make_pair(kBrowserColumns[b], os);
                    if (section == "[install_support]")
                        install[key] = install_from_cell(cols[1 + b]);
                    else
                        profile[key] = profile_from_cell(cols[1 + b]);
                }
            } else if (section == "[uninstall]") {
                if (cols.size() != 3)
                    throw CatalogCorrupt("uninstall row has wrong arity: " + line);
                auto browser = browser_from_name(cols[0]);
                if (!browser)
                    throw CatalogCorrupt("unknown browser in uninstall row: " + line);
                Os os = os_from_data(cols[1]);
                out.uninstall_steps[{*browser, os}] = split(cols[2], ';');
            } else {
                throw CatalogCorrupt("row outside any section: " + line);
            }
        }

        if (out.catalog.size() != 25)
            throw CatalogCorrupt("expected 25 catalog rows, found " +
                                 std::to_string(out.catalog.size()));
        for (Os os : kOsRows) {
            for (Browser b : kBrowserColumns) {
                auto key = std::make_pair(b, os);
                if (!install.count(key) || !profile.count(key))
                    throw CatalogCorrupt("support grid has gaps");
                BrowserProfile cell;
                cell.browser = b;
                cell.os = os;
                cell.platform = platform_of(os);
                cell.install_support = install[key];
                cell.profile_support = profile[key];
                out.grid.push_back(cell);
            }
        }
        return out;
    }();
    return data;
}

} // namespace

std::string_view browser_name(Browser b) {
    switch (b) {
    case Browser::safari: return "Safari";
    case Browser::firefox: return "Firefox";
    case Browser::chrome: return "Chrome";
    case Browser::edge: return "Edge";
    case Browser::opera: return "Opera";
    case Browser::brave: return "Brave";
    case Browser::samsung_internet: return "SamsungInternet";
    case Browser::tor_browser: return "TorBrowser";
    }
    return "Chrome";
}

std::string_view os_name(Os o) {
    switch (o) {
    case Os::linux_os: return "Linux";
    case Os::macos: return "macOS";
    case Os::windows: return "Windows";
    case Os::ios: return "iOS";
    case Os::android: return "Android";
    }
    return "Linux";
}

std::string_view platform_name(PlatformKind p) {
    return p == PlatformKind::desktop ? "desktop" : "mobile";
}

std::string_view install_support_name(InstallSupport s) {
    switch (s) {
    case InstallSupport::supported: return "supported";
    case InstallSupport::unsupported: return "unsupported";
    case InstallSupport::browser_unavailable: return "browser_unavailable";
    case InstallSupport::add_to_dock: return "add_to_dock";
    }
    return "unsupported";
}

std::string_view profile_support_name(ProfileSupport s) {
    switch (s) {
    case ProfileSupport::multi_profile_isolated: return "multi_profile_isolated";
    case ProfileSupport::multi_profile_not_isolated: return "multi_profile_not_isolated";
    case ProfileSupport::no_multi_profile: return "no_multi_profile";
    case ProfileSupport::unsupported: return "unsupported";
    case ProfileSupport::unavailable: return "unavailable";
    }
    return "unsupported";
}

std::optional<Browser> browser_from_name(std::string_view name) {
    std::string n = ascii_lower(name);
    for (char& c : n)
        if (c == '-' || c == ' ')
            c = '_';
    if (n == "safari") return Browser::safari;
    if (n == "firefox") return Browser::firefox;
    if (n == "chrome") return Browser::chrome;
    if (n == "edge") return Browser::edge;
    if (n == "opera") return Browser::opera;
    if (n == "brave") return Browser::brave;
    if (n == "samsung_internet" || n == "samsunginternet" || n == "samsung")
        return Browser::samsung_internet;
    if (n == "tor_browser" || n == "torbrowser" || n == "tor")
        return Browser::tor_browser;
    return std::nullopt;
}

std::optional<Os> os_from_name(std::string_view name) {
    std::string n = ascii_lower(name);
    if (n == "linux") return Os::linux_os;
    if (n == "macos" || n == "mac") return Os::macos;
    if (n == "windows") return Os::windows;
    if (n == "ios") return Os::ios;
    if (n == "android") return Os::android;
    return std::nullopt;
}

PlatformKind platform_of(Os o) {
    return (o == Os::ios || o == Os::android) ? PlatformKind::mobile : PlatformKind::desktop;
}

std::vector<ViolationRecord> load_catalog() {
    return parsed_data().catalog;
}

CiaTally cia_tally(const std::vector<ViolationRecord>& catalog) {
    CiaTally tally;
    for (const ViolationRecord& rec : catalog) {
        switch (rec.cia) {
        case 'C': tally.c += rec.browser_count; break;
        case 'I': tally.i += rec.browser_count; break;
        case 'A': tally.a += rec.browser_count; break;
        default: break;
        }
    }
    tally.total = tally.c + tally.i + tally.a;
    return tally;
}

const std::vector<BrowserProfile>& support_grid() {
    return parsed_data().grid;
}

BrowserProfile browser_support(Browser browser, Os os) {
    for (const BrowserProfile& cell : support_grid())
        if (cell.browser == browser && cell.os == os)
            return cell;
    throw UnknownCombination("no support data for " + std::string(browser_name(browser)) +
                             " on " + std::string(os_name(os)));
}

UninstallGuide uninstall_guide(Browser browser, Os os) {
    BrowserProfile cell = browser_support(browser, os); // validates the pair
    UninstallGuide guide;
    guide.browser = browser;
    guide.os = os;
    auto it = parsed_data().uninstall_steps.find({browser, os});
    if (it != parsed_data().uninstall_steps.end()) {
        guide.steps = it->second;
    } else if (cell.install_support == InstallSupport::browser_unavailable) {
        guide.steps = {"This browser is not available on this platform; nothing to uninstall"};
    } else {
        guide.steps = {"This browser does not install PWAs on this platform; "
                       "remove any home-screen shortcut and clear the site's data"};
    }
    guide.fallback = "If in doubt, completely uninstall and reinstall the browser; "
                     "this purges all PWA data, settings and permissions";
    return guide;
}

Json catalog_to_json(const std::vector<ViolationRecord>& catalog) {
    Json rows = Json::array();
    for (const ViolationRecord& rec : catalog) {
        rows.push_back({{"risk", rec.risk_name},
                        {"cia", std::string(1, rec.cia)},
                        {"browser_count", rec.browser_count},
                        {"phase", std::string(phase_name(rec.phase))},
                        {"notes", rec.notes}});
    }
    return rows;
}

Json tally_to_json(const CiaTally& tally) {
    return Json{{"C", tally.c}, {"I", tally.i}, {"A", tally.a}, {"total", tally.total}};
}

Json profile_to_json(const BrowserProfile& profile) {
    return Json{{"browser", std::string(browser_name(profile.browser))},
                {"os", std::string(os_name(profile.os))},
                {"platform", std::string(platform_name(profile.platform))},
                {"install_support", std::string(install_support_name(profile.install_support))},
                {"profile_support", std::string(profile_support_name(profile.profile_support))}};
}

Json guide_to_json(const UninstallGuide& guide) {
    return Json{{"browser", std::string(browser_name(guide.browser))},
                {"os", std::string(os_name(guide.os))},
                {"steps", guide.steps},
                {"fallback", guide.fallback}};
}

} // namespace pwaudit
