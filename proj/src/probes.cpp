#include "pwaudit/probes.hpp"

#include "pwaudit/errors.hpp"
#include "pwaudit/text.hpp"

#include <httplib.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

namespace pwaudit {

namespace {

struct Response {
    int status = 0;
    std::string body;
    std::map<std::string, std::string> headers; // lowercased names
};

std::string client_target(const AbsoluteUrl& url) {
    std::string target = url.scheme + "://" + url.host;
    if (!url.has_default_port())
        target += ":" + std::to_string(url.port);
    return target;
}

std::string request_path(const AbsoluteUrl& url) {
    std::string path = url.path;
    if (url.query)
        path += "?" + *url.query;
    return path;
}

// One GET without following redirects; retries once on transport errors.
Response fetch_once(const AbsoluteUrl& url, const ProbeOptions& options) {
    httplib::Client client(client_target(url));
    client.set_follow_location(false);
    client.set_connection_timeout(options.timeout_seconds, 0);
    client.set_read_timeout(options.timeout_seconds, 0);
    client.set_default_headers({{"User-Agent", options.user_agent}});
    if (!options.proxy_host.empty())
        client.set_proxy(options.proxy_host, options.proxy_port);
#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
    client.enable_server_certificate_verification(false);
#endif

    auto result = client.Get(request_path(url));
    if (!result)
        result = client.Get(request_path(url)); // one retry
    if (!result)
        throw FetchFailure(0, "cannot fetch " + url.to_string() + ": " +
                                  httplib::to_string(result.error()));
    Response response;
    response.status = result->status;
    response.body = result->body;
    for (const auto& [name, value] : result->headers)
        response.headers[ascii_lower(name)] = value;
    return response;
}

std::optional<std::string> header_value(const Response& response, const std::string& name) {
    auto it = response.headers.find(name);
    if (it == response.headers.end())
        return std::nullopt;
    return it->second;
}

bool is_html(const Response& response) {
    auto ct = header_value(response, "content-type");
    return ct && contains(ascii_lower(*ct), "text/html");
}

const std::vector<std::string>& redirect_keyword_params() {
    static const std::vector<std::string> names = {"redirect", "url", "next",
                                                   "goto", "return", "dest"};
    return names;
}

void collect_suspicious_params(const AbsoluteUrl& url, RedirectReport& report) {
    if (!url.query)
        return;
    std::string_view query = *url.query;
    while (!query.empty()) {
        std::size_t amp = query.find('&');
        std::string_view pair = query.substr(0, amp);
        std::size_t eq = pair.find('=');
        std::string name = ascii_lower(eq == std::string_view::npos ? pair
                                                                    : pair.substr(0, eq));
        std::string value(eq == std::string_view::npos ? std::string_view{}
                                                       : pair.substr(eq + 1));
        if (std::find(redirect_keyword_params().begin(), redirect_keyword_params().end(),
                      name) != redirect_keyword_params().end())
            report.suspicious_params.emplace_back(name, value);
        if (amp == std::string_view::npos)
            break;
        query.remove_prefix(amp + 1);
    }
}

// frame-ancestors directive value from a CSP header, when present.
std::optional<std::string> csp_frame_ancestors_of(const std::string& csp) {
    std::stringstream stream(csp);
    std::string directive;
    while (std::getline(stream, directive, ';')) {
        std::string_view d = trim(directive);
        std::string lower = ascii_lower(d);
        if (starts_with(lower, "frame-ancestors")) {
            std::string_view rest = d.substr(std::string("frame-ancestors").size());
            return std::string(trim(rest));
        }
    }
    return std::nullopt;
}

// A foreign prober can frame the page unless the directive admits any
// origin (* or scheme wildcards).
bool frame_ancestors_allow_foreign(const std::string& value) {
    std::stringstream stream(value);
    std::string token;
    while (stream >> token) {
        std::string t = ascii_lower(token);
        if (t == "*" || t == "https:" || t == "http:")
            return true;
    }
    return false;
}

} // namespace

std::string_view redirect_mechanism_name(RedirectMechanism m) {
    switch (m) {
    case RedirectMechanism::http_3xx: return "http_3xx";
    case RedirectMechanism::meta_refresh: return "meta_refresh";
    case RedirectMechanism::detected_js_pattern: return "detected_js_pattern";
    }
    return "http_3xx";
}

bool is_update_triggering_field(std::string_view field) {
    return field == "name" || field == "short_name" || field == "display" ||
           field == "start_url" || field == "theme_color" || field == "scope";
}

std::optional<std::string> find_manifest_link(std::string_view html) {
    static const std::regex link_re("<link\\b[^>]*>", std::regex::icase);
    static const std::regex rel_re("rel\\s*=\\s*[\"']?([^\"'>]*)[\"']?", std::regex::icase);
    static const std::regex href_re("href\\s*=\\s*(\"([^\"]*)\"|'([^']*)'|([^\\s>]+))",
                                    std::regex::icase);
    auto begin = std::cregex_iterator(html.data(), html.data() + html.size(), link_re);
    for (auto it = begin; it != std::cregex_iterator(); ++it) {
        std::string tag = it->str();
        std::smatch rel;
        if (!std::regex_search(tag, rel, rel_re))
            continue;
        // rel may hold a space-separated list.
        std::stringstream tokens(ascii_lower(rel[1].str()));
        std::string token;
        bool is_manifest = false;
        while (tokens >> token)
            if (token == "manifest")
                is_manifest = true;
        if (!is_manifest)
            continue;
        std::smatch href;
        if (std::regex_search(tag, href, href_re)) {
            for (int group : {2, 3, 4})
                if (href[group].matched)
                    return href[group].str();
        }
    }
    return std::nullopt;
}

std::optional<std::string> find_meta_refresh_target(std::string_view html) {
    static const std::regex meta_re("<meta\\b[^>]*>", std::regex::icase);
    static const std::regex equiv_re("http-equiv\\s*=\\s*[\"']?refresh[\"']?", std::regex::icase);
    static const std::regex content_re("content\\s*=\\s*(\"([^\"]*)\"|'([^']*)')",
                                       std::regex::icase);
    auto begin = std::cregex_iterator(html.data(), html.data() + html.size(), meta_re);
    for (auto it = begin; it != std::cregex_iterator(); ++it) {
        std::string tag = it->str();
        if (!std::regex_search(tag, equiv_re))
            continue;
        std::smatch content;
        if (!std::regex_search(tag, content, content_re))
            continue;
        std::string value = content[2].matched ? content[2].str() : content[3].str();
        // "<seconds>; url=<target>" — the url part is optional; a bare
        // number reloads the same page and is not a redirect.
        std::size_t semi = value.find(';');
        if (semi == std::string::npos)
            continue;
        std::string_view rest = trim(std::string_view(value).substr(semi + 1));
        std::string lower = ascii_lower(rest);
        if (!starts_with(lower, "url"))
            continue;
        std::size_t eq = rest.find('=');
        if (eq == std::string_view::npos)
            continue;
        std::string_view target = trim(rest.substr(eq + 1));
        if (!target.empty() && (target.front() == '\'' || target.front() == '"'))
            target.remove_prefix(1);
        if (!target.empty() && (target.back() == '\'' || target.back() == '"'))
            target.remove_suffix(1);
        if (!target.empty())
            return std::string(target);
    }
    return std::nullopt;
}

std::optional<std::string> find_js_redirect_target(std::string_view html) {
    // window.location.assign('...'), window.location.href = '...',
    // window.location = '...'
    static const std::regex js_re(
        "window\\s*\\.\\s*location\\s*(\\.\\s*(assign\\s*\\(|href\\s*=)|=)\\s*"
        "[\"']([^\"']+)[\"']",
        std::regex::icase);
    std::cmatch match;
    if (std::regex_search(html.data(), html.data() + html.size(), match, js_re))
        return match[3].str();
    return std::nullopt;
}

AbsoluteUrl discover_manifest(const AbsoluteUrl& page_url, const ProbeOptions& options) {
    Response response = fetch_once(page_url, options);
    if (response.status >= 400)
        throw FetchFailure(response.status, "page fetch failed with status " +
                                                std::to_string(response.status));
    auto href = find_manifest_link(response.body);
    if (!href)
        throw NoManifestLink("page has no <link rel=\"manifest\">");
    return resolve(page_url, *href);
}

FetchedManifest fetch_manifest(const AbsoluteUrl& url, const ProbeOptions& options) {
    Response response = fetch_once(url, options);
    if (response.status >= 400)
        throw FetchFailure(response.status, "manifest fetch failed with status " +
                                                std::to_string(response.status));
    FetchedManifest out;
    out.raw = parse_manifest(response.body, url, url);
    out.headers = response.headers;
    out.is_secure_context = url.scheme == "https" || url.is_loopback();
    return out;
}

RedirectReport redirect_probe(const AbsoluteUrl& url, int max_hops,
                              const ProbeOptions& options) {
    RedirectReport report;
    report.chain.push_back({url, std::nullopt, std::nullopt});
    collect_suspicious_params(url, report);

    for (int hop = 0; hop < max_hops + 1; ++hop) {
        RedirectHop& current = report.chain.back();
        Response response;
        try {
            response = fetch_once(current.url, options);
        } catch (const FetchFailure&) {
            if (report.chain.size() == 1)
                throw;
            report.truncated = true;
            break;
        }
        current.status = response.status;

        std::optional<AbsoluteUrl> next;
        std::optional<RedirectMechanism> mechanism;
        if (response.status >= 300 && response.status < 400) {
            auto location = header_value(response, "location");
            if (location) {
                try {
                    next = resolve(current.url, *location);
                    mechanism = RedirectMechanism::http_3xx;
                } catch (const Error&) {
                    break; // unresolvable target ends the chain
                }
            }
        } else if (response.status >= 200 && response.status < 300 &&
                   (is_html(response) || !response.body.empty())) {
            if (auto target = find_meta_refresh_target(response.body)) {
                try {
                    next = resolve(current.url, *target);
                    mechanism = RedirectMechanism::meta_refresh;
                } catch (const Error&) {
                }
            }
            if (!next) {
                if (auto target = find_js_redirect_target(response.body)) {
                    try {
                        AbsoluteUrl js_url = resolve(current.url, *target);
                        if (report.chain.size() <
                            static_cast<std::size_t>(max_hops) + 1) {
                            report.chain.push_back(
                                {js_url, RedirectMechanism::detected_js_pattern,
                                 std::nullopt});
                            collect_suspicious_params(js_url, report);
                            if (js_url.origin() != current.url.origin())
                                report.cross_origin_hops.push_back(report.chain.size() - 1);
                        }
                    } catch (const Error&) {
                    }
                }
                break; // JS targets are reported, never followed
            }
        }
        if (!next)
            break;
        if (report.chain.size() >= static_cast<std::size_t>(max_hops) + 1) {
            report.truncated = true;
            break;
        }
        bool crossed = next->origin() != current.url.origin();
        report.chain.push_back({*next, mechanism, std::nullopt});
        collect_suspicious_params(*next, report);
        if (crossed)
            report.cross_origin_hops.push_back(report.chain.size() - 1);
    }
    return report;
}

FrameReport frame_protection_probe(const AbsoluteUrl& url, const ProbeOptions& options) {
    Response response = fetch_once(url, options);
    FrameReport report;
    report.url = url;
    report.x_frame_options = header_value(response, "x-frame-options");
    if (auto csp = header_value(response, "content-security-policy"))
        report.csp_frame_ancestors = csp_frame_ancestors_of(*csp);

    bool xfo_blocks = false;
    if (report.x_frame_options) {
        std::string value = ascii_lower(trim(*report.x_frame_options));
        // SAMEORIGIN blocks the cross-origin attacker this probe models.
        xfo_blocks = value == "deny" || value == "sameorigin";
    }
    bool csp_blocks = report.csp_frame_ancestors &&
                      !frame_ancestors_allow_foreign(*report.csp_frame_ancestors);
    report.frameable = !xfo_blocks && !csp_blocks;
    return report;
}

std::optional<UpdateDiff> diff_manifests(const Json& old_fields, const Json& new_fields) {
    if (old_fields == new_fields)
        return std::nullopt;
    UpdateDiff diff;
    diff.timestamp_ms = now_ms();
    for (auto it = old_fields.begin(); it != old_fields.end(); ++it) {
        const std::string& key = it.key();
        if (!new_fields.contains(key)) {
            diff.changed_fields.push_back(
                {key, it.value(), Json(), is_update_triggering_field(key)});
        } else if (new_fields.at(key) != it.value()) {
            diff.changed_fields.push_back(
                {key, it.value(), new_fields.at(key), is_update_triggering_field(key)});
        }
    }
    for (auto it = new_fields.begin(); it != new_fields.end(); ++it) {
        if (!old_fields.contains(it.key()))
            diff.changed_fields.push_back(
                {it.key(), Json(), it.value(), is_update_triggering_field(it.key())});
    }
    if (diff.changed_fields.empty())
        return std::nullopt;
    return diff;
}

ManifestWatcher::ManifestWatcher(AbsoluteUrl url, std::string store_dir, ProbeOptions options)
    : url_(std::move(url)), options_(std::move(options)) {
    std::filesystem::create_directories(store_dir);
    store_file_ = store_dir + "/" + to_hex(fnv1a64(url_.to_string())) + ".json";
}

std::optional<UpdateDiff> ManifestWatcher::poll_once() {
    std::string body;
    try {
        Response response = fetch_once(url_, options_);
        if (response.status >= 400) {
            ++misses_;
            return std::nullopt;
        }
        body = response.body;
    } catch (const FetchFailure&) {
        ++misses_;
        return std::nullopt;
    }

    Json fields = Json::parse(body, nullptr, false);
    if (fields.is_discarded() || !fields.is_object()) {
        ++misses_;
        return std::nullopt;
    }

    Json previous;
    {
        std::ifstream in(store_file_);
        if (in) {
            Json stored = Json::parse(in, nullptr, false);
            if (!stored.is_discarded() && stored.is_object() && stored.contains("fields"))
                previous = stored["fields"];
        }
    }

    auto persist = [this, &body, &fields] {
        Json stored{{"url", url_.to_string()},
                    {"body_hash", to_hex(fnv1a64(body))},
                    {"fetched_at", now_ms()},
                    {"fields", fields},
                    {"body", body}};
        std::ofstream out(store_file_, std::ios::trunc);
        out << stored.dump(2) << "\n";
    };

    if (previous.is_null()) { // first poll primes the baseline
        persist();
        return std::nullopt;
    }
    auto diff = diff_manifests(previous, fields);
    persist();
    return diff;
}

Json redirect_report_to_json(const RedirectReport& report) {
    Json chain = Json::array();
    for (const RedirectHop& hop : report.chain) {
        Json h;
        h["url"] = hop.url.to_string();
        h["mechanism"] = hop.mechanism
                             ? Json(std::string(redirect_mechanism_name(*hop.mechanism)))
                             : Json();
        h["status"] = hop.status ? Json(*hop.status) : Json();
        chain.push_back(h);
    }
    Json params = Json::array();
    for (const auto& [name, value] : report.suspicious_params)
        params.push_back({{"param", name}, {"value", value}});
    return Json{{"chain", chain},
                {"cross_origin_hops", report.cross_origin_hops},
                {"suspicious_params", params},
                {"truncated", report.truncated}};
}

Json frame_report_to_json(const FrameReport& report) {
    return Json{{"url", report.url.to_string()},
                {"x_frame_options",
                 report.x_frame_options ? Json(*report.x_frame_options) : Json()},
                {"csp_frame_ancestors",
                 report.csp_frame_ancestors ? Json(*report.csp_frame_ancestors) : Json()},
                {"frameable", report.frameable}};
}

Json update_diff_to_json(const UpdateDiff& diff) {
    Json fields = Json::array();
    for (const UpdatedField& f : diff.changed_fields)
        fields.push_back({{"field", f.field},
                          {"old", f.old_value},
                          {"new", f.new_value},
                          {"update_triggering", f.update_triggering}});
    return Json{{"timestamp", diff.timestamp_ms},
                {"timestamp_iso", iso8601_utc(diff.timestamp_ms)},
                {"changed_fields", fields}};
}

} // namespace pwaudit
