#include "pwaudit/lint.hpp"

#include "pwaudit/text.hpp"

#include <algorithm>
#include <sstream>

namespace pwaudit {

namespace {

const std::vector<std::string>& tracking_param_names() {
    static const std::vector<std::string> names = {"id", "uid", "user",
                                                   "token", "session", "ref"};
    return names;
}

const std::vector<std::string>& redirect_param_names() {
    static const std::vector<std::string> names = {"redirect", "url", "next",
                                                   "goto", "return", "dest"};
    return names;
}

const std::vector<std::string>& template_names() {
    static const std::vector<std::string> names = {
        "create react app sample", "react app",  "webpack app",
        "vite app",                "vue app",    "my app",
        "welcome to firebase hosting"};
    return names;
}

struct QueryParam {
    std::string name;
    std::string value;
};

std::vector<QueryParam> parse_query(std::string_view raw) {
    std::vector<QueryParam> out;
    std::size_t q = raw.find('?');
    if (q == std::string_view::npos)
        return out;
    std::string_view query = raw.substr(q + 1);
    std::size_t hash = query.find('#');
    if (hash != std::string_view::npos)
        query = query.substr(0, hash);
    while (!query.empty()) {
        std::size_t amp = query.find('&');
        std::string_view pair = query.substr(0, amp);
        if (!pair.empty()) {
            std::size_t eq = pair.find('=');
            QueryParam p;
            if (eq == std::string_view::npos) {
                p.name = ascii_lower(pair);
            } else {
                p.name = ascii_lower(pair.substr(0, eq));
                p.value = std::string(pair.substr(eq + 1));
            }
            out.push_back(std::move(p));
        }
        if (amp == std::string_view::npos)
            break;
        query.remove_prefix(amp + 1);
    }
    return out;
}

bool name_in(const std::vector<std::string>& names, const std::string& candidate) {
    return std::find(names.begin(), names.end(), candidate) != names.end();
}

// Cross-origin check on the raw text of a URL-valued field.
bool raw_is_cross_origin(const std::string& raw_text, const AbsoluteUrl& document_url) {
    std::string_view t = trim(raw_text);
    if (!reference_has_authority(t))
        return false;
    std::string absolute = starts_with(t, "//") ? document_url.scheme + ":" + std::string(t)
                                                : std::string(t);
    auto parsed = AbsoluteUrl::try_parse(absolute);
    return parsed && parsed->origin() != document_url.origin();
}

void lint_start_url(const Manifest& m, std::vector<Finding>& out) {
    if (!m.start_url_raw)
        return;
    const std::string& raw = *m.start_url_raw;
    if (trim(raw).empty()) {
        out.push_back(make_finding(RuleId::syn_su_empty, "start_url",
                                   "start_url is present but empty"));
        return;
    }
    auto params = parse_query(raw);
    if (!params.empty()) {
        Finding f = make_finding(RuleId::sec_su_track, "start_url",
                                 "start_url carries query parameters; personalized launch "
                                 "URLs can track installs");
        f.severity = Severity::info;
        for (const QueryParam& p : params) {
            if (name_in(tracking_param_names(), p.name)) {
                f.severity = Severity::warning;
                f.message = "start_url query parameter '" + p.name +
                            "' looks like a per-user identifier";
                break;
            }
        }
        out.push_back(std::move(f));
    }
    for (const QueryParam& p : params) {
        bool named = name_in(redirect_param_names(), p.name);
        bool url_value = AbsoluteUrl::try_parse(p.value).has_value();
        if (named || url_value) {
            out.push_back(make_finding(RuleId::sec_su_redirect_param, "start_url",
                                       "start_url query parameter '" + p.name +
                                           "' carries a redirect target"));
            break;
        }
    }
    if (raw_is_cross_origin(raw, m.document_url))
        out.push_back(make_finding(RuleId::sec_su_xorigin, "start_url",
                                   "start_url points at a different origin than " +
                                       m.document_url.origin().to_string() +
                                       (m.start_url_fell_back
                                            ? "; the browser falls back to the current page"
                                            : "")));
    if (is_parent_path_ref(raw))
        out.push_back(make_finding(RuleId::sec_su_parent, "start_url",
                                   "start_url '" + raw + "' climbs out of the app directory"));
}

void lint_scope(const Manifest& m, std::vector<Finding>& out) {
    if (!m.scope_raw)
        return;
    const std::string& raw = *m.scope_raw;
    if (trim(raw).empty()) {
        out.push_back(make_finding(RuleId::syn_sc_empty, "scope",
                                   "scope is present but empty"));
        return;
    }
    if (raw_is_cross_origin(raw, m.document_url))
        out.push_back(make_finding(RuleId::sec_sc_xorigin, "scope",
                                   "scope points at a different origin than " +
                                       m.document_url.origin().to_string()));
    if (is_parent_path_ref(raw))
        out.push_back(make_finding(RuleId::sec_sc_parent, "scope",
                                   "scope '" + raw + "' climbs out of the app directory"));
    if (!m.scope.path.empty() && m.scope.path.back() != '/')
        out.push_back(make_finding(RuleId::sec_sc_no_trailing_slash, "scope",
                                   "scope path '" + m.scope.path +
                                       "' has no trailing slash; prefix matching also covers "
                                       "sibling paths"));
}

void lint_name(const Manifest& m, const CorpusIndex* corpus, std::vector<Finding>& out) {
    bool empty = !m.name || trim(*m.name).empty();
    if (empty) {
        out.push_back(make_finding(RuleId::sec_name_empty, "name",
                                   m.name ? "name is empty; browsers substitute defaults"
                                          : "name is missing; browsers substitute defaults"));
        return;
    }
    std::size_t length = utf8_length(*m.name);
    if (length > 1000)
        out.push_back(make_finding(RuleId::sec_name_long, "name",
                                   "name is " + std::to_string(length) +
                                       " characters; desktop browsers refuse names over 1000"));
    std::string normalized = normalize_name(*m.name);
    if (name_in(template_names(), normalized))
        out.push_back(make_finding(RuleId::sec_name_template, "name",
                                   "name '" + *m.name + "' is a stock template default"));
    if (corpus) {
        std::size_t other = corpus->name_count_excluding(normalized,
                                                         m.document_url.to_string());
        if (other >= 1)
            out.push_back(make_finding(RuleId::sec_name_dup, "name",
                                       "name '" + *m.name + "' is shared with " +
                                           std::to_string(other) +
                                           " other corpus manifest(s)"));
    }
}

void lint_icons(const Manifest& m, const CorpusIndex* corpus, std::vector<Finding>& out) {
    std::string own_origin = m.document_url.origin().to_string();
    for (std::size_t i = 0; i < m.icons.size(); ++i) {
        const IconEntry& icon = m.icons[i];
        std::string path = "icons[" + std::to_string(i) + "].src";
        if (icon.src.origin() != m.document_url.origin())
            out.push_back(make_finding(RuleId::sec_icon_xorigin, path,
                                       "icon is served from third-party origin " +
                                           icon.src.origin().to_string()));
        if (corpus) {
            auto foreign = corpus->foreign_icon_origins(icon.src.to_string(), own_origin);
            if (!foreign.empty())
                out.push_back(make_finding(RuleId::sec_icon_dup, path,
                                           "icon URL is also referenced by " +
                                               std::to_string(foreign.size()) +
                                               " other origin(s), e.g. " + foreign.front()));
        }
    }
}

void lint_display(const Manifest& m, std::vector<Finding>& out) {
    if (!m.display_raw)
        return;
    if (m.display == DisplayMode::unknown)
        out.push_back(make_finding(RuleId::syn_display_unknown, "display",
                                   "display '" + *m.display_raw +
                                       "' is not a documented mode"));
    if (m.display == DisplayMode::fullscreen)
        out.push_back(make_finding(RuleId::sec_display_hides_url, "display",
                                   "fullscreen hides the URL bar; users cannot verify the "
                                       "site they are on"));
}

void lint_id(const Manifest& m, const CorpusIndex* corpus, std::vector<Finding>& out) {
    if (!m.id)
        return;
    std::string_view id = trim(*m.id);
    if (id.empty())
        return;
    if (id != "/")
        out.push_back(make_finding(RuleId::sec_id_track, "id",
                                   "id '" + *m.id + "' deviates from the recommended '/'"));
    if (raw_is_cross_origin(*m.id, m.document_url))
        out.push_back(make_finding(RuleId::sec_id_xorigin, "id",
                                   "id resolves to a different origin than " +
                                       m.document_url.origin().to_string()));
    if (corpus) {
        std::size_t other = corpus->id_count_excluding(m.document_url.origin().to_string(),
                                                       *m.id, m.document_url.to_string());
        if (other >= 1)
            out.push_back(make_finding(RuleId::sec_id_dup, "id",
                                       "id '" + *m.id + "' is already used by " +
                                           std::to_string(other) +
                                           " other manifest(s) on this origin"));
    }
}

void lint_related(const Manifest& m, std::vector<Finding>& out) {
    bool has_related = !m.related_applications.empty();
    bool has_prefer = m.prefer_related_applications.has_value();
    if (has_related != has_prefer) {
        std::string path = has_related ? "related_applications"
                                       : "prefer_related_applications";
        out.push_back(make_finding(RuleId::sec_related_unpaired, path,
                                   "related_applications and prefer_related_applications "
                                   "are only meaningful together"));
    }
    if (has_related && m.prefer_related_applications == std::optional<bool>(true))
        out.push_back(make_finding(RuleId::sec_related_prefer, "prefer_related_applications",
                                   "installs are diverted to the listed store application"));
}

void lint_unknown_fields(const Manifest& m, std::vector<Finding>& out) {
    for (const std::string& field : m.unknown_fields)
        out.push_back(make_finding(RuleId::sec_unknown_field, field,
                                   "field '" + field + "' is not a standard manifest member"));
}

} // namespace

std::string_view install_mode_name(InstallMode mode) {
    return mode == InstallMode::strict_w3c ? "strict_w3c" : "chrome_lenient";
}

std::optional<InstallMode> install_mode_from_name(std::string_view name) {
    if (name == "strict_w3c")
        return InstallMode::strict_w3c;
    if (name == "chrome_lenient")
        return InstallMode::chrome_lenient;
    return std::nullopt;
}

std::string_view site_class_name(SiteClass c) {
    switch (c) {
    case SiteClass::inaccessible_or_no_manifest: return "inaccessible_or_no_manifest";
    case SiteClass::invalid_manifest: return "invalid_manifest";
    case SiteClass::installable_with_sw: return "installable_with_sw";
    case SiteClass::installable_without_sw: return "installable_without_sw";
    case SiteClass::not_installable: return "not_installable";
    }
    return "invalid_manifest";
}

std::vector<Finding> lint(const Manifest& manifest, const RawManifest& raw,
                          const CorpusIndex* corpus) {
    (void)raw; // the manifest carries the raw field copy
    std::vector<Finding> out;
    lint_start_url(manifest, out);
    lint_scope(manifest, out);
    lint_name(manifest, corpus, out);
    lint_icons(manifest, corpus, out);
    lint_display(manifest, out);
    lint_id(manifest, corpus, out);
    lint_related(manifest, out);
    lint_unknown_fields(manifest, out);

    std::sort(out.begin(), out.end(), [](const Finding& a, const Finding& b) {
        if (a.field_path != b.field_path)
            return a.field_path < b.field_path;
        return rule_info(a.rule).code < rule_info(b.rule).code;
    });
    return out;
}

InstallabilityReport check_installable(const Manifest& manifest, bool has_service_worker,
                                       bool is_secure_context, InstallMode mode) {
    InstallabilityReport report;
    report.mode = mode;

    if (!manifest.name || trim(*manifest.name).empty())
        report.missing.push_back("name");
    if (manifest.icons.empty())
        report.missing.push_back("icon");
    // The resolved start_url is always valid; the requirement fails when the
    // author wrote a value that had to be discarded.
    if (manifest.start_url_fell_back && manifest.start_url_raw &&
        !trim(*manifest.start_url_raw).empty()) {
        report.missing.push_back("start_url");
        report.notes.push_back("start_url fell back to the document URL");
    }
    if (manifest.display != DisplayMode::standalone &&
        manifest.display != DisplayMode::fullscreen &&
        manifest.display != DisplayMode::minimal_ui) {
        report.missing.push_back("display");
        report.notes.push_back("display '" +
                               (manifest.display_raw ? *manifest.display_raw
                                                     : std::string("browser")) +
                               "' does not qualify for installation");
    }
    if (!is_secure_context)
        report.missing.push_back("secure_context");
    if (mode == InstallMode::strict_w3c && !has_service_worker)
        report.missing.push_back("service_worker");
    if (mode == InstallMode::chrome_lenient && !has_service_worker)
        report.notes.push_back("no service worker; installable but offline support is absent");

    report.installable = report.missing.empty();
    return report;
}

SiteClass classify_site(ManifestPresence manifest_result,
                        const std::optional<InstallabilityReport>& installability,
                        bool has_service_worker) {
    if (manifest_result == ManifestPresence::absent)
        return SiteClass::inaccessible_or_no_manifest;
    if (manifest_result == ManifestPresence::malformed)
        return SiteClass::invalid_manifest;
    if (!installability)
        return SiteClass::invalid_manifest;
    if (installability->installable)
        return has_service_worker ? SiteClass::installable_with_sw
                                  : SiteClass::installable_without_sw;
    // Manifest-member gaps make the manifest itself invalid; purely
    // contextual gaps (secure context, service worker) do not.
    for (const std::string& req : installability->missing) {
        if (req == "name" || req == "icon" || req == "start_url" || req == "display")
            return SiteClass::invalid_manifest;
    }
    return SiteClass::not_installable;
}

Json finding_to_json(const Finding& finding) {
    const RuleInfo& info = rule_info(finding.rule);
    Json j;
    j["rule_id"] = std::string(info.code);
    j["severity"] = std::string(severity_name(finding.severity));
    Json cia = Json::array();
    for (char letter : finding.cia.letters())
        cia.push_back(std::string(1, letter));
    j["cia"] = cia;
    j["phase"] = std::string(phase_name(finding.phase));
    j["field_path"] = finding.field_path;
    j["message"] = finding.message;
    j["remediation"] = finding.remediation;
    return j;
}

Json report_to_json(const LintReport& report) {
    Json j;
    j["manifest_url"] = report.manifest_url;
    j["document_url"] = report.document_url;
    Json findings = Json::array();
    for (const Finding& f : report.findings)
        findings.push_back(finding_to_json(f));
    j["findings"] = findings;
    if (report.installability) {
        const InstallabilityReport& r = *report.installability;
        j["installability"] = {{"installable", r.installable},
                               {"mode", std::string(install_mode_name(r.mode))},
                               {"missing", r.missing},
                               {"notes", r.notes}};
    } else {
        j["installability"] = nullptr;
    }
    j["parse_notes"] = report.parse_notes;
    return j;
}

std::string report_to_text(const LintReport& report) {
    std::ostringstream out;
    out << "manifest: " << report.manifest_url << "\n";
    out << "document: " << report.document_url << "\n";
    if (report.findings.empty()) {
        out << "no findings\n";
    } else {
        for (const Finding& f : report.findings) {
            const RuleInfo& info = rule_info(f.rule);
            out << severity_name(f.severity) << " " << info.code << " [" << f.cia.letters()
                << "] " << f.field_path << ": " << f.message << "\n";
            out << "    fix: " << f.remediation << "\n";
        }
    }
    if (report.installability) {
        const InstallabilityReport& r = *report.installability;
        out << "installable (" << install_mode_name(r.mode)
            << "): " << (r.installable ? "yes" : "no");
        if (!r.missing.empty()) {
            out << " missing:";
            for (const std::string& m : r.missing)
                out << " " << m;
        }
        out << "\n";
        for (const std::string& n : r.notes)
            out << "    note: " << n << "\n";
    }
    for (const std::string& n : report.parse_notes)
        out << "note: " << n << "\n";
    return out.str();
}

const char* const kPlaceholderDocumentUrl = "https://manifest.invalid/";

bool is_placeholder_document(const AbsoluteUrl& url) {
    return url.host == "manifest.invalid";
}

void downgrade_origin_findings_for_placeholder(LintReport& report) {
    bool touched = false;
    for (Finding& f : report.findings) {
        if (f.rule == RuleId::sec_su_xorigin || f.rule == RuleId::sec_sc_xorigin ||
            f.rule == RuleId::sec_icon_xorigin || f.rule == RuleId::sec_id_xorigin) {
            f.severity = Severity::info;
            touched = true;
        }
    }
    if (touched)
        report.parse_notes.push_back("document URL is a placeholder; origin-dependent "
                                     "findings downgraded to info");
}

} // namespace pwaudit
