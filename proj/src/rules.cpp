#include "pwaudit/rules.hpp"

namespace pwaudit {

namespace {

constexpr CiaSet kC{true, false, false};
constexpr CiaSet kI{false, true, false};
constexpr CiaSet kA{false, false, true};

constexpr Phase kPre = Phase::pre_installation;
constexpr Phase kPost = Phase::post_installation;

const std::array<RuleInfo, kRuleCount> kRules = {{
    {RuleId::syn_json_malformed, "SYN-JSON-MALFORMED", Severity::error, kA, kPre,
     "manifest body is not a JSON object",
     "serve a single top-level JSON object", ""},
    {RuleId::syn_su_empty, "SYN-SU-EMPTY", Severity::error, kA, kPre,
     "start_url is present but empty",
     "remove the field or point it at a same-origin path", ""},
    {RuleId::syn_sc_empty, "SYN-SC-EMPTY", Severity::error, kA, kPre,
     "scope is present but empty",
     "remove the field or set a directory path ending in /", ""},
    {RuleId::syn_display_unknown, "SYN-DISPLAY-UNKNOWN", Severity::error, kA, kPre,
     "display value is not a documented mode",
     "use one of browser, minimal-ui, standalone, fullscreen", ""},
    {RuleId::sec_su_track, "SEC-SU-TRACK", Severity::warning, kI, kPre,
     "start_url carries query parameters that can individualize installs",
     "serve a parameter-free start_url",
     "start_url and scope leading to external sites"},
    {RuleId::sec_su_xorigin, "SEC-SU-XORIGIN", Severity::error, kI, kPre,
     "start_url points at a different origin than the document",
     "use a same-origin path; browsers fall back to the current page",
     "start_url and scope leading to external sites"},
    {RuleId::sec_su_parent, "SEC-SU-PARENT", Severity::warning, kI, kPre,
     "start_url uses parent-path segments",
     "use a path inside the app directory",
     "start_url and scope leading to external sites"},
    {RuleId::sec_su_redirect_param, "SEC-SU-REDIRECT-PARAM", Severity::warning, kI, kPre,
     "start_url query parameter looks like a redirect target",
     "launch directly at the destination path",
     "start_url and scope leading to external sites"},
    {RuleId::sec_sc_parent, "SEC-SC-PARENT", Severity::warning, kI, kPre,
     "scope uses parent-path segments",
     "scope the app to its own directory",
     "start_url and scope leading to external sites"},
    {RuleId::sec_sc_xorigin, "SEC-SC-XORIGIN", Severity::error, kI, kPre,
     "scope points at a different origin than the document",
     "use a same-origin directory path",
     "start_url and scope leading to external sites"},
    {RuleId::sec_sc_no_trailing_slash, "SEC-SC-NO-TRAILING-SLASH", Severity::info, kI, kPre,
     "scope does not end in /; prefix matching also admits sibling paths",
     "end the scope in /",
     "start_url and scope leading to external sites"},
    {RuleId::sec_name_empty, "SEC-NAME-EMPTY", Severity::warning, kC, kPre,
     "name is missing or empty; browsers substitute vendor-specific defaults",
     "set a unique, descriptive name",
     "Name and icon duplication causing user confusion and phishing"},
    {RuleId::sec_name_long, "SEC-NAME-LONG", Severity::warning, kI, kPre,
     "name exceeds 1000 characters; desktop browsers refuse to install",
     "shorten the name",
     "Discrepancies in PWA installation requirements"},
    {RuleId::sec_name_dup, "SEC-NAME-DUP", Severity::warning, kC, kPre,
     "name duplicates other apps in the corpus",
     "pick a name not already used by other apps",
     "Name and icon duplication causing user confusion and phishing"},
    {RuleId::sec_name_template, "SEC-NAME-TEMPLATE", Severity::warning, kC, kPre,
     "name is a stock template default",
     "replace the template name with the app's real name",
     "Name and icon duplication causing user confusion and phishing"},
    {RuleId::sec_icon_xorigin, "SEC-ICON-XORIGIN", Severity::warning, kC, kPre,
     "icon is served from a third-party origin",
     "host icons on the app's own origin",
     "Icon can be a third-party URL, leading to phishing"},
    {RuleId::sec_icon_dup, "SEC-ICON-DUP", Severity::warning, kC, kPre,
     "icon URL is also used by other origins in the corpus",
     "use an icon unique to this app",
     "Name and icon duplication causing user confusion and phishing"},
    {RuleId::sec_display_hides_url, "SEC-DISPLAY-HIDES-URL", Severity::warning, kC, kPre,
     "fullscreen display hides the URL bar",
     "prefer minimal-ui so users can see the URL",
     "Display fullscreen mode hides URLs, enabling phishing attacks"},
    {RuleId::sec_id_track, "SEC-ID-TRACK", Severity::warning, kI, kPre,
     "id deviates from the recommended value /",
     "use / unless several apps must share the origin", ""},
    {RuleId::sec_id_xorigin, "SEC-ID-XORIGIN", Severity::warning, kI, kPre,
     "id resolves to a different origin",
     "keep the id on the app's own origin", ""},
    {RuleId::sec_id_dup, "SEC-ID-DUP", Severity::warning, kI, kPre,
     "id duplicates another manifest on the same origin",
     "assign a distinct id per app",
     "ID can be duplicated and multiple PWAs not distinguishable"},
    {RuleId::sec_related_unpaired, "SEC-RELATED-UNPAIRED", Severity::info, kC, kPre,
     "related_applications and prefer_related_applications only work together",
     "set both fields or neither",
     "Related applications can lead to third-party app installations"},
    {RuleId::sec_related_prefer, "SEC-RELATED-PREFER", Severity::warning, kC, kPre,
     "prefer_related_applications diverts installs to a store listing",
     "confirm every listed application id belongs to you",
     "Related applications can lead to third-party app installations"},
    {RuleId::sec_unknown_field, "SEC-UNKNOWN-FIELD", Severity::info, kI, kPre,
     "field is not a standard manifest member",
     "remove it; arbitrary members can carry tracking payloads",
     "Manifest allows arbitrary fields, leading to tracking"},
    {RuleId::sec_sw_cacheonly, "SEC-SW-CACHEONLY", Severity::warning, kI, kPost,
     "service worker serves from cache with no network path",
     "add a network fallback so the app can update",
     "Service worker cache-only strategies prevent updates"},
}};

} // namespace

std::string_view severity_name(Severity s) {
    switch (s) {
    case Severity::info: return "info";
    case Severity::warning: return "warning";
    case Severity::error: return "error";
    }
    return "info";
}

std::optional<Severity> severity_from_name(std::string_view name) {
    if (name == "info") return Severity::info;
    if (name == "warning") return Severity::warning;
    if (name == "error") return Severity::error;
    return std::nullopt;
}

std::string_view phase_name(Phase p) {
    switch (p) {
    case Phase::pre_installation: return "pre_installation";
    case Phase::installation: return "installation";
    case Phase::post_installation: return "post_installation";
    case Phase::uninstallation: return "uninstallation";
    }
    return "pre_installation";
}

std::string CiaSet::letters() const {
    std::string out;
    if (c) out += 'C';
    if (i) out += 'I';
    if (a) out += 'A';
    return out;
}

const std::array<RuleInfo, kRuleCount>& rule_table() {
    return kRules;
}

const RuleInfo& rule_info(RuleId id) {
    for (const RuleInfo& r : kRules)
        if (r.id == id)
            return r;
    return kRules[0];
}

std::optional<RuleId> rule_from_code(std::string_view code) {
    for (const RuleInfo& r : kRules)
        if (r.code == code)
            return r.id;
    return std::nullopt;
}

Finding make_finding(RuleId id, std::string field_path, std::string message) {
    const RuleInfo& info = rule_info(id);
    Finding f;
    f.rule = id;
    f.severity = info.severity;
    f.cia = info.cia;
    f.phase = info.phase;
    f.field_path = std::move(field_path);
    f.message = std::move(message);
    f.remediation = std::string(info.remediation);
    return f;
}

} // namespace pwaudit
