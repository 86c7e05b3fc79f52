#include "pwaudit/manifest.hpp"

#include "pwaudit/errors.hpp"
#include "pwaudit/text.hpp"

#include <algorithm>
#include <set>

namespace pwaudit {

namespace {

// SAX scan that records duplicate keys in the top-level object; the DOM
// parser keeps the last value, so the duplicates would otherwise vanish.
struct DuplicateKeyScanner : nlohmann::json_sax<Json> {
    int depth = 0;
    std::set<std::string> seen;
    std::vector<std::string> duplicates;

    bool null() override { return true; }
    bool boolean(bool) override { return true; }
    bool number_integer(number_integer_t) override { return true; }
    bool number_unsigned(number_unsigned_t) override { return true; }
    bool number_float(number_float_t, const string_t&) override { return true; }
    bool string(string_t&) override { return true; }
    bool binary(binary_t&) override { return true; }
    bool start_object(std::size_t) override {
        ++depth;
        return true;
    }
    bool key(string_t& k) override {
        if (depth == 1 && !seen.insert(k).second)
            duplicates.push_back(k);
        return true;
    }
    bool end_object() override {
        --depth;
        return true;
    }
    bool start_array(std::size_t) override { return true; }
    bool end_array() override { return true; }
    bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override {
        return false;
    }
};

std::string json_as_text(const Json& v, bool& coerced) {
    if (v.is_string()) {
        coerced = false;
        return v.get<std::string>();
    }
    coerced = true;
    return v.dump();
}

std::optional<std::string> take_text_field(const Json& fields, const std::string& key,
                                           std::vector<std::string>& notes) {
    auto it = fields.find(key);
    if (it == fields.end())
        return std::nullopt;
    bool coerced = false;
    std::string text = json_as_text(*it, coerced);
    if (coerced)
        notes.push_back("field '" + key + "' is not a JSON string; value coerced to text");
    return text;
}

void parse_icons(const Json& fields, Manifest& m) {
    auto it = fields.find("icons");
    if (it == fields.end())
        return;
    if (!it->is_array()) {
        m.parse_notes.push_back("field 'icons' is not an array; ignored");
        return;
    }
    std::size_t index = 0;
    for (const Json& entry : *it) {
        std::size_t i = index++;
        if (!entry.is_object()) {
            m.parse_notes.push_back("icons[" + std::to_string(i) + "] is not an object; dropped");
            continue;
        }
        auto src_it = entry.find("src");
        if (src_it == entry.end() || !src_it->is_string()) {
            m.parse_notes.push_back("icons[" + std::to_string(i) + "] has no string src; dropped");
            continue;
        }
        IconEntry icon;
        icon.src_raw = src_it->get<std::string>();
        try {
            icon.src = resolve(m.source_url, icon.src_raw);
        } catch (const UnresolvableReference&) {
            m.parse_notes.push_back("icons[" + std::to_string(i) +
                                    "].src is not resolvable; dropped");
            continue;
        }
        bool coerced = false;
        if (auto s = entry.find("sizes"); s != entry.end())
            icon.sizes = json_as_text(*s, coerced);
        if (auto t = entry.find("type"); t != entry.end())
            icon.type = json_as_text(*t, coerced);
        m.icons.push_back(std::move(icon));
    }
}

void parse_related_applications(const Json& fields, Manifest& m) {
    auto it = fields.find("related_applications");
    if (it == fields.end())
        return;
    if (!it->is_array()) {
        m.parse_notes.push_back("field 'related_applications' is not an array; ignored");
        return;
    }
    std::size_t index = 0;
    for (const Json& entry : *it) {
        std::size_t i = index++;
        if (!entry.is_object()) {
            m.parse_notes.push_back("related_applications[" + std::to_string(i) +
                                    "] is not an object; dropped");
            continue;
        }
        RelatedApplication app;
        bool coerced = false;
        if (auto p = entry.find("platform"); p != entry.end())
            app.platform = json_as_text(*p, coerced);
        if (auto u = entry.find("url"); u != entry.end() && u->is_string()) {
            try {
                app.url = resolve(m.source_url, u->get<std::string>());
            } catch (const UnresolvableReference&) {
                m.parse_notes.push_back("related_applications[" + std::to_string(i) +
                                        "].url is not resolvable; ignored");
            }
        }
        if (auto id = entry.find("id"); id != entry.end())
            app.id = json_as_text(*id, coerced);
        if (!app.url && !app.id) {
            m.parse_notes.push_back("related_applications[" + std::to_string(i) +
                                    "] has neither url nor id; dropped");
            continue;
        }
        m.related_applications.push_back(std::move(app));
    }
}

DisplayMode display_from_text(std::string_view text) {
    if (text == "browser")
        return DisplayMode::browser;
    if (text == "minimal-ui")
        return DisplayMode::minimal_ui;
    if (text == "standalone")
        return DisplayMode::standalone;
    if (text == "fullscreen")
        return DisplayMode::fullscreen;
    return DisplayMode::unknown;
}

} // namespace

std::string_view display_mode_name(DisplayMode mode) {
    switch (mode) {
    case DisplayMode::browser: return "browser";
    case DisplayMode::minimal_ui: return "minimal-ui";
    case DisplayMode::standalone: return "standalone";
    case DisplayMode::fullscreen: return "fullscreen";
    case DisplayMode::unknown: return "unknown";
    }
    return "unknown";
}

const std::vector<std::string>& standard_field_allowlist() {
    static const std::vector<std::string> fields = {
        "name", "short_name", "description", "icons", "start_url", "scope",
        "display", "display_override", "id", "theme_color", "background_color",
        "orientation", "lang", "dir", "categories", "screenshots", "shortcuts",
        "related_applications", "prefer_related_applications",
        "protocol_handlers", "share_target"};
    return fields;
}

RawManifest parse_manifest(std::string_view text, const AbsoluteUrl& source_url,
                           const AbsoluteUrl& document_url) {
    RawManifest raw;
    raw.source_url = source_url;
    raw.document_url = document_url;

    raw.fields = Json::parse(text, nullptr, false);
    if (raw.fields.is_discarded())
        throw MalformedJson("manifest body is not valid JSON");
    if (!raw.fields.is_object())
        throw MalformedJson("manifest top level is not a JSON object");

    DuplicateKeyScanner scanner;
    Json::sax_parse(text, &scanner);
    for (const std::string& key : scanner.duplicates)
        raw.parse_notes.push_back("duplicate key '" + key + "'; last occurrence wins");
    return raw;
}

std::string serialize(const RawManifest& raw) {
    return raw.fields.dump();
}

Manifest normalize(const RawManifest& raw) {
    Manifest m;
    m.source_url = raw.source_url;
    m.document_url = raw.document_url;
    m.raw_fields = raw.fields;
    m.parse_notes = raw.parse_notes;

    if (raw.document_url.has_non_ascii_host())
        m.parse_notes.push_back("document host '" + raw.document_url.host +
                                "' is non-ASCII; compared as given");

    m.name = take_text_field(raw.fields, "name", m.parse_notes);
    m.short_name = take_text_field(raw.fields, "short_name", m.parse_notes);
    m.id = take_text_field(raw.fields, "id", m.parse_notes);
    m.theme_color = take_text_field(raw.fields, "theme_color", m.parse_notes);

    // start_url: empty, missing, cross-origin or unresolvable values all
    // fall back to the document URL.
    m.start_url_raw = take_text_field(raw.fields, "start_url", m.parse_notes);
    m.start_url = raw.document_url;
    m.start_url.fragment.reset();
    if (!m.start_url_raw || trim(*m.start_url_raw).empty()) {
        m.start_url_fell_back = true;
    } else {
        try {
            AbsoluteUrl resolved = resolve(raw.document_url, *m.start_url_raw);
            if (same_origin(resolved, raw.document_url)) {
                m.start_url = resolved;
            } else {
                m.start_url_fell_back = true;
                m.parse_notes.push_back("start_url origin differs from the document; "
                                        "fell back to the document URL");
            }
        } catch (const Error&) {
            m.start_url_fell_back = true;
            m.parse_notes.push_back("start_url is not resolvable; fell back to the document URL");
        }
    }

    AbsoluteUrl default_scope;
    default_scope.scheme = m.start_url.scheme;
    default_scope.host = m.start_url.host;
    default_scope.port = m.start_url.port;
    default_scope.path = m.start_url.directory_path();

    m.scope_raw = take_text_field(raw.fields, "scope", m.parse_notes);
    m.scope = default_scope;
    if (m.scope_raw && !trim(*m.scope_raw).empty()) {
        try {
            AbsoluteUrl resolved = resolve(raw.document_url, *m.scope_raw);
            resolved.fragment.reset();
            if (!same_origin(resolved, m.start_url)) {
                m.parse_notes.push_back("scope origin differs from start_url; "
                                        "using the start_url directory");
            } else if (!within_scope(m.start_url, resolved)) {
                m.parse_notes.push_back("start_url is outside the given scope; "
                                        "using the start_url directory");
            } else {
                m.scope = resolved;
            }
        } catch (const Error&) {
            m.parse_notes.push_back("scope is not resolvable; using the start_url directory");
        }
    }

    if (auto display = take_text_field(raw.fields, "display", m.parse_notes)) {
        m.display_raw = display;
        m.display = display_from_text(*display);
    }

    parse_icons(raw.fields, m);
    parse_related_applications(raw.fields, m);

    if (auto it = raw.fields.find("prefer_related_applications"); it != raw.fields.end()) {
        if (it->is_boolean())
            m.prefer_related_applications = it->get<bool>();
        else
            m.parse_notes.push_back("prefer_related_applications is not a boolean; ignored");
    }

    const auto& allow = standard_field_allowlist();
    for (auto it = raw.fields.begin(); it != raw.fields.end(); ++it) {
        if (std::find(allow.begin(), allow.end(), it.key()) == allow.end())
            m.unknown_fields.push_back(it.key());
    }
    return m;
}

RawManifest reserialize(const Manifest& manifest) {
    RawManifest raw;
    raw.fields = manifest.raw_fields;
    raw.source_url = manifest.source_url;
    raw.document_url = manifest.document_url;
    return raw;
}

} // namespace pwaudit
