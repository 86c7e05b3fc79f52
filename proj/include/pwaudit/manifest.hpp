#pragma once

#include "pwaudit/json.hpp"
#include "pwaudit/url.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pwaudit {

// Parsed manifest body with top-level field order preserved as read.
struct RawManifest {
    Json fields; // JSON object
    AbsoluteUrl source_url;
    AbsoluteUrl document_url;
    std::vector<std::string> parse_notes;

    bool operator==(const RawManifest& o) const {
        return fields == o.fields && source_url == o.source_url &&
               document_url == o.document_url;
    }
};

enum class DisplayMode { browser, minimal_ui, standalone, fullscreen, unknown };

std::string_view display_mode_name(DisplayMode mode);

struct IconEntry {
    AbsoluteUrl src; // resolved against source_url
    std::string src_raw;
    std::optional<std::string> sizes;
    std::optional<std::string> type;

    bool operator==(const IconEntry&) const = default;
};

struct RelatedApplication {
    std::string platform;
    std::optional<AbsoluteUrl> url;
    std::optional<std::string> id;

    bool operator==(const RelatedApplication&) const = default;
};

struct Manifest {
    std::optional<std::string> name;
    std::optional<std::string> short_name;
    std::optional<std::string> id;
    AbsoluteUrl start_url;
    std::optional<std::string> start_url_raw;
    bool start_url_fell_back = false;
    AbsoluteUrl scope;
    std::optional<std::string> scope_raw;
    DisplayMode display = DisplayMode::browser;
    std::optional<std::string> display_raw;
    std::optional<std::string> theme_color;
    std::vector<IconEntry> icons;
    std::vector<RelatedApplication> related_applications;
    std::optional<bool> prefer_related_applications;
    std::vector<std::string> unknown_fields;
    std::vector<std::string> parse_notes;

    AbsoluteUrl source_url;
    AbsoluteUrl document_url;
    Json raw_fields; // full copy of the raw top-level object

    bool operator==(const Manifest&) const = default;
};

// Standard manifest members; anything else lands in unknown_fields.
const std::vector<std::string>& standard_field_allowlist();

// Throws MalformedJson when text is not a top-level JSON object.
RawManifest parse_manifest(std::string_view text, const AbsoluteUrl& source_url,
                           const AbsoluteUrl& document_url);

std::string serialize(const RawManifest& raw);

// Total over any RawManifest. Cross-origin or unresolvable start_url falls
// back to the document URL; missing scope defaults to the directory of the
// resolved start_url.
Manifest normalize(const RawManifest& raw);

// Reconstructs the RawManifest a Manifest was normalized from.
RawManifest reserialize(const Manifest& manifest);

} // namespace pwaudit
