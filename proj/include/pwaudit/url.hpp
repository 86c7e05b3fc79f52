#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace pwaudit {

struct Origin {
    std::string scheme;
    std::string host;
    int port = 0;

    bool operator==(const Origin&) const = default;
    bool operator<(const Origin& o) const;
    std::string to_string() const; // scheme://host:port, port always explicit
};

// An absolute http(s) URL with a normalized path. Percent-decoding is never
// applied; comparisons are code-unit comparisons.
struct AbsoluteUrl {
    std::string scheme;                  // "http" or "https", lowercase
    std::string host;                    // lowercase
    int port = 0;                        // default-filled per scheme
    std::string path;                    // begins with '/', dot-segments removed
    std::optional<std::string> query;    // without '?'
    std::optional<std::string> fragment; // without '#'

    bool operator==(const AbsoluteUrl&) const = default;

    static AbsoluteUrl parse(std::string_view text); // throws UrlError
    static std::optional<AbsoluteUrl> try_parse(std::string_view text);

    Origin origin() const;
    bool has_default_port() const;
    bool is_loopback() const;
    bool has_non_ascii_host() const;

    std::string to_string() const;   // default port elided
    std::string prefix_form() const; // scheme://host:port/path, no query/fragment

    // Path of the directory containing the last segment ("/a/b" -> "/a/").
    std::string directory_path() const;
};

// Standard relative-reference resolution with dot-segment removal; "../"
// chains that escape the root clamp at "/". Throws UnresolvableReference
// for schemes outside http/https.
AbsoluteUrl resolve(const AbsoluteUrl& base, std::string_view reference);

Origin origin_of(const AbsoluteUrl& url);
bool same_origin(const AbsoluteUrl& a, const AbsoluteUrl& b);

// True iff same-origin and the query-free string form of url starts with
// the string form of scope (code-unit prefix, so "/app" matches "/approot").
bool within_scope(const AbsoluteUrl& url, const AbsoluteUrl& scope);

// True iff the raw reference text begins with "../", equals "..", or
// contains a "/../" segment, after trimming whitespace.
bool is_parent_path_ref(std::string_view reference);

// True when the reference carries its own scheme or authority ("//host").
bool reference_has_authority(std::string_view reference);

std::string remove_dot_segments(std::string_view path);

} // namespace pwaudit
