#pragma once

#include "pwaudit/corpus.hpp"
#include "pwaudit/manifest.hpp"
#include "pwaudit/rules.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pwaudit {

enum class InstallMode { strict_w3c, chrome_lenient };
std::string_view install_mode_name(InstallMode mode);
std::optional<InstallMode> install_mode_from_name(std::string_view name);

struct InstallabilityReport {
    bool installable = false;
    InstallMode mode = InstallMode::chrome_lenient;
    std::vector<std::string> missing; // requirement names
    std::vector<std::string> notes;

    bool operator==(const InstallabilityReport&) const = default;
};

enum class SiteClass {
    inaccessible_or_no_manifest,
    invalid_manifest,
    installable_with_sw,
    installable_without_sw,
    not_installable,
};
std::string_view site_class_name(SiteClass c);

enum class ManifestPresence { absent, malformed, present };

// All triggered findings in (field_path, rule code) order. Corpus-dependent
// rules are skipped when corpus is null.
std::vector<Finding> lint(const Manifest& manifest, const RawManifest& raw,
                          const CorpusIndex* corpus = nullptr);

InstallabilityReport check_installable(const Manifest& manifest, bool has_service_worker,
                                       bool is_secure_context, InstallMode mode);

SiteClass classify_site(ManifestPresence manifest_result,
                        const std::optional<InstallabilityReport>& installability,
                        bool has_service_worker);

// Report document shipped over the CLI: findings plus context.
struct LintReport {
    std::string manifest_url;
    std::string document_url;
    std::vector<Finding> findings;
    std::optional<InstallabilityReport> installability;
    std::vector<std::string> parse_notes;
};

Json finding_to_json(const Finding& finding);
Json report_to_json(const LintReport& report);
std::string report_to_text(const LintReport& report);

// Offline lints run against this origin when no document URL is given;
// origin-dependent findings are then reduced to notes of severity info.
extern const char* const kPlaceholderDocumentUrl;
bool is_placeholder_document(const AbsoluteUrl& url);
void downgrade_origin_findings_for_placeholder(LintReport& report);

} // namespace pwaudit
