#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace pwaudit {

enum class Severity { info = 0, warning = 1, error = 2 };
std::string_view severity_name(Severity s);
std::optional<Severity> severity_from_name(std::string_view name);

enum class Phase { pre_installation, installation, post_installation, uninstallation };
std::string_view phase_name(Phase p);

// Security dimensions a finding touches; never empty for a shipped rule.
struct CiaSet {
    bool c = false;
    bool i = false;
    bool a = false;

    bool operator==(const CiaSet&) const = default;
    bool empty() const { return !c && !i && !a; }
    std::string letters() const;
};

enum class RuleId {
    syn_json_malformed,
    syn_su_empty,
    syn_sc_empty,
    syn_display_unknown,
    sec_su_track,
    sec_su_xorigin,
    sec_su_parent,
    sec_su_redirect_param,
    sec_sc_parent,
    sec_sc_xorigin,
    sec_sc_no_trailing_slash,
    sec_name_empty,
    sec_name_long,
    sec_name_dup,
    sec_name_template,
    sec_icon_xorigin,
    sec_icon_dup,
    sec_display_hides_url,
    sec_id_track,
    sec_id_xorigin,
    sec_id_dup,
    sec_related_unpaired,
    sec_related_prefer,
    sec_unknown_field,
    sec_sw_cacheonly,
};

inline constexpr std::size_t kRuleCount = 25;

struct RuleInfo {
    RuleId id;
    std::string_view code; // e.g. "SEC-SU-TRACK"
    Severity severity;     // default severity
    CiaSet cia;
    Phase phase;
    std::string_view summary;
    std::string_view remediation;
    // Matching catalog risk name, when the rule maps onto one.
    std::string_view catalog_risk;
};

const std::array<RuleInfo, kRuleCount>& rule_table();
const RuleInfo& rule_info(RuleId id);
std::optional<RuleId> rule_from_code(std::string_view code);

struct Finding {
    RuleId rule;
    Severity severity;
    CiaSet cia;
    Phase phase;
    std::string field_path;
    std::string message;
    std::string remediation;

    bool operator==(const Finding&) const = default;
};

// Builds a finding from the rule defaults; message may be customized after.
Finding make_finding(RuleId id, std::string field_path, std::string message);

} // namespace pwaudit
