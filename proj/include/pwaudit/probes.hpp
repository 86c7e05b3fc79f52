#pragma once

#include "pwaudit/manifest.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pwaudit {

struct ProbeOptions {
    int timeout_seconds = 15;
    int max_hops = 10;
    std::string user_agent = "pwaudit/0.1";
    std::string proxy_host; // empty = direct
    int proxy_port = 0;
};

enum class RedirectMechanism { http_3xx, meta_refresh, detected_js_pattern };
std::string_view redirect_mechanism_name(RedirectMechanism m);

struct RedirectHop {
    AbsoluteUrl url;
    // How this hop was reached; the first hop has no mechanism.
    std::optional<RedirectMechanism> mechanism;
    std::optional<int> status; // HTTP status of fetching this hop, when fetched

    bool operator==(const RedirectHop&) const = default;
};

struct RedirectReport {
    std::vector<RedirectHop> chain; // non-empty; chain[0] is the probed URL
    std::vector<std::size_t> cross_origin_hops;
    std::vector<std::pair<std::string, std::string>> suspicious_params;
    bool truncated = false;
};

struct FrameReport {
    AbsoluteUrl url;
    std::optional<std::string> x_frame_options;
    std::optional<std::string> csp_frame_ancestors;
    bool frameable = true;
};

struct UpdatedField {
    std::string field;
    Json old_value; // null when the field was added
    Json new_value; // null when the field was removed
    bool update_triggering = false;

    bool operator==(const UpdatedField&) const = default;
};

struct UpdateDiff {
    std::int64_t timestamp_ms = 0;
    std::vector<UpdatedField> changed_fields;
};

// Fields whose change makes browsers refresh an installed app.
bool is_update_triggering_field(std::string_view field);

// First <link rel="manifest"> href resolved against the page URL. Throws
// NoManifestLink or FetchFailure.
AbsoluteUrl discover_manifest(const AbsoluteUrl& page_url, const ProbeOptions& options = {});

struct FetchedManifest {
    RawManifest raw;
    std::map<std::string, std::string> headers; // lowercased names
    bool is_secure_context = false;             // https or loopback source
};

FetchedManifest fetch_manifest(const AbsoluteUrl& url, const ProbeOptions& options = {});

// Follows 3xx and meta-refresh redirects up to max_hops; JS redirect
// patterns are reported but never executed. Throws FetchFailure only for
// the first hop.
RedirectReport redirect_probe(const AbsoluteUrl& url, int max_hops,
                              const ProbeOptions& options = {});

FrameReport frame_protection_probe(const AbsoluteUrl& url, const ProbeOptions& options = {});

// Pure field-level diff between two manifest bodies.
std::optional<UpdateDiff> diff_manifests(const Json& old_fields, const Json& new_fields);

// Polls a manifest URL and reports field diffs against the stored baseline.
// The store is one content-addressed JSON file per URL under store_dir.
class ManifestWatcher {
public:
    ManifestWatcher(AbsoluteUrl url, std::string store_dir, ProbeOptions options = {});

    // Fetches once; primes the baseline on first use. Returns a diff when
    // the manifest changed, nullopt otherwise (including on fetch misses;
    // misses are counted and watching continues).
    std::optional<UpdateDiff> poll_once();

    std::size_t poll_misses() const { return misses_; }
    const std::string& store_file() const { return store_file_; }

private:
    AbsoluteUrl url_;
    std::string store_file_;
    ProbeOptions options_;
    std::size_t misses_ = 0;
};

Json redirect_report_to_json(const RedirectReport& report);
Json frame_report_to_json(const FrameReport& report);
Json update_diff_to_json(const UpdateDiff& diff);

// Raw HTML scanning helpers (exposed for tests).
std::optional<std::string> find_manifest_link(std::string_view html);
std::optional<std::string> find_meta_refresh_target(std::string_view html);
std::optional<std::string> find_js_redirect_target(std::string_view html);

} // namespace pwaudit
