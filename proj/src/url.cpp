#include "pwaudit/url.hpp"

#include "pwaudit/errors.hpp"
#include "pwaudit/text.hpp"

#include <tuple>

namespace pwaudit {

namespace {

bool is_scheme_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_scheme_char(char c) {
    return is_scheme_start(c) || (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.';
}

// Returns the scheme (lowercased) when the text begins with "<scheme>:".
std::optional<std::string> leading_scheme(std::string_view text) {
    if (text.empty() || !is_scheme_start(text[0]))
        return std::nullopt;
    std::size_t i = 1;
    while (i < text.size() && is_scheme_char(text[i]))
        ++i;
    if (i < text.size() && text[i] == ':')
        return ascii_lower(text.substr(0, i));
    return std::nullopt;
}

int default_port(std::string_view scheme) {
    return scheme == "https" ? 443 : 80;
}

struct SplitUrl {
    std::string_view authority;
    std::string_view path;
    std::optional<std::string_view> query;
    std::optional<std::string_view> fragment;
};

// Splits "<authority><path>?<query>#<fragment>" (text after "scheme://").
SplitUrl split_after_authority_marker(std::string_view rest) {
    SplitUrl out;
    std::size_t auth_end = rest.size();
    for (std::size_t i = 0; i < rest.size(); ++i) {
        if (rest[i] == '/' || rest[i] == '?' || rest[i] == '#') {
            auth_end = i;
            break;
        }
    }
    out.authority = rest.substr(0, auth_end);
    std::string_view tail = rest.substr(auth_end);
    std::size_t frag = tail.find('#');
    if (frag != std::string_view::npos) {
        out.fragment = tail.substr(frag + 1);
        tail = tail.substr(0, frag);
    }
    std::size_t q = tail.find('?');
    if (q != std::string_view::npos) {
        out.query = tail.substr(q + 1);
        tail = tail.substr(0, q);
    }
    out.path = tail;
    return out;
}

void parse_authority(std::string_view authority, AbsoluteUrl& url) {
    // Drop userinfo if present.
    std::size_t at = authority.rfind('@');
    if (at != std::string_view::npos)
        authority = authority.substr(at + 1);

    std::string_view host_part = authority;
    std::string_view port_part;
    if (!authority.empty() && authority[0] == '[') {
        std::size_t close = authority.find(']');
        if (close == std::string_view::npos)
            throw UrlError("unterminated IPv6 host in: " + std::string(authority));
        host_part = authority.substr(0, close + 1);
        std::string_view rest = authority.substr(close + 1);
        if (!rest.empty()) {
            if (rest[0] != ':')
                throw UrlError("invalid characters after IPv6 host");
            port_part = rest.substr(1);
        }
    } else {
        std::size_t colon = authority.rfind(':');
        if (colon != std::string_view::npos) {
            host_part = authority.substr(0, colon);
            port_part = authority.substr(colon + 1);
        }
    }
    if (host_part.empty())
        throw UrlError("empty host");
    url.host = ascii_lower(host_part);
    if (port_part.empty()) {
        url.port = default_port(url.scheme);
    } else {
        int p = 0;
        for (char c : port_part) {
            if (c < '0' || c > '9')
                throw UrlError("invalid port: " + std::string(port_part));
            p = p * 10 + (c - '0');
            if (p > 65535)
                throw UrlError("port out of range: " + std::string(port_part));
        }
        url.port = p;
    }
}

} // namespace

std::string remove_dot_segments(std::string_view path) {
    // RFC 3986 section 5.2.4; inputs here always start with '/'.
    std::string input(path);
    std::string output;
    while (!input.empty()) {
        if (starts_with(input, "../")) {
            input.erase(0, 3);
        } else if (starts_with(input, "./")) {
            input.erase(0, 2);
        } else if (starts_with(input, "/./")) {
            input.replace(0, 3, "/");
        } else if (input == "/.") {
            input = "/";
        } else if (starts_with(input, "/../")) {
            input.replace(0, 4, "/");
            std::size_t slash = output.rfind('/');
            output.erase(slash == std::string::npos ? 0 : slash);
        } else if (input == "/..") {
            input = "/";
            std::size_t slash = output.rfind('/');
            output.erase(slash == std::string::npos ? 0 : slash);
        } else if (input == "." || input == "..") {
            input.clear();
        } else {
            std::size_t start = input[0] == '/' ? 1 : 0;
            std::size_t next = input.find('/', start);
            if (next == std::string::npos) {
                output += input;
                input.clear();
            } else {
                output += input.substr(0, next);
                input.erase(0, next);
            }
        }
    }
    if (output.empty() || output[0] != '/')
        output.insert(output.begin(), '/');
    return output;
}

bool Origin::operator<(const Origin& o) const {
    return std::tie(scheme, host, port) < std::tie(o.scheme, o.host, o.port);
}

std::string Origin::to_string() const {
    return scheme + "://" + host + ":" + std::to_string(port);
}

AbsoluteUrl AbsoluteUrl::parse(std::string_view text) {
    std::string_view t = trim(text);
    auto scheme = leading_scheme(t);
    if (!scheme)
        throw UrlError("not an absolute URL: " + std::string(text));
    if (*scheme != "http" && *scheme != "https")
        throw UrlError("unsupported scheme '" + *scheme + "' in: " + std::string(text));
    std::string_view rest = t.substr(scheme->size() + 1);
    if (!starts_with(rest, "//"))
        throw UrlError("missing authority in: " + std::string(text));
    rest.remove_prefix(2);

    AbsoluteUrl url;
    url.scheme = *scheme;
    SplitUrl parts = split_after_authority_marker(rest);
    parse_authority(parts.authority, url);
    url.path = remove_dot_segments(parts.path.empty() ? "/" : parts.path);
    if (parts.query)
        url.query = std::string(*parts.query);
    if (parts.fragment)
        url.fragment = std::string(*parts.fragment);
    return url;
}

std::optional<AbsoluteUrl> AbsoluteUrl::try_parse(std::string_view text) {
    try {
        return parse(text);
    } catch (const UrlError&) {
        return std::nullopt;
    }
}

Origin AbsoluteUrl::origin() const {
    return Origin{scheme, host, port};
}

bool AbsoluteUrl::has_default_port() const {
    return port == default_port(scheme);
}

bool AbsoluteUrl::is_loopback() const {
    if (host == "localhost" || host == "[::1]")
        return true;
    return starts_with(host, "127.");
}

bool AbsoluteUrl::has_non_ascii_host() const {
    for (char c : host)
        if (static_cast<unsigned char>(c) >= 0x80)
            return true;
    return false;
}

std::string AbsoluteUrl::to_string() const {
    std::string out = scheme + "://" + host;
    if (!has_default_port())
        out += ":" + std::to_string(port);
    out += path;
    if (query)
        out += "?" + *query;
    if (fragment)
        out += "#" + *fragment;
    return out;
}

std::string AbsoluteUrl::prefix_form() const {
    return scheme + "://" + host + ":" + std::to_string(port) + path;
}

std::string AbsoluteUrl::directory_path() const {
    std::size_t slash = path.rfind('/');
    return path.substr(0, slash + 1);
}

AbsoluteUrl resolve(const AbsoluteUrl& base, std::string_view reference) {
    std::string_view ref = trim(reference);

    if (auto scheme = leading_scheme(ref)) {
        if (*scheme != "http" && *scheme != "https")
            throw UnresolvableReference("scheme '" + *scheme +
                                        "' is not analyzed: " + std::string(reference));
        return AbsoluteUrl::parse(ref);
    }
    if (starts_with(ref, "//"))
        return AbsoluteUrl::parse(base.scheme + ":" + std::string(ref));

    AbsoluteUrl out;
    out.scheme = base.scheme;
    out.host = base.host;
    out.port = base.port;

    if (ref.empty()) {
        out.path = base.path;
        out.query = base.query;
        return out;
    }
    if (ref[0] == '#') {
        out.path = base.path;
        out.query = base.query;
        out.fragment = std::string(ref.substr(1));
        return out;
    }

    std::string_view tail = ref;
    std::optional<std::string> fragment;
    std::size_t frag = tail.find('#');
    if (frag != std::string_view::npos) {
        fragment = std::string(tail.substr(frag + 1));
        tail = tail.substr(0, frag);
    }
    std::optional<std::string> query;
    std::size_t q = tail.find('?');
    if (q != std::string_view::npos) {
        query = std::string(tail.substr(q + 1));
        tail = tail.substr(0, q);
    }

    if (tail.empty()) {
        out.path = base.path;
    } else if (tail[0] == '/') {
        out.path = remove_dot_segments(tail);
    } else {
        out.path = remove_dot_segments(base.directory_path() + std::string(tail));
    }
    out.query = std::move(query);
    out.fragment = std::move(fragment);
    return out;
}

Origin origin_of(const AbsoluteUrl& url) {
    return url.origin();
}

bool same_origin(const AbsoluteUrl& a, const AbsoluteUrl& b) {
    return a.origin() == b.origin();
}

bool within_scope(const AbsoluteUrl& url, const AbsoluteUrl& scope) {
    if (!same_origin(url, scope))
        return false;
    return starts_with(url.prefix_form(), scope.prefix_form());
}

bool is_parent_path_ref(std::string_view reference) {
    std::string_view r = trim(reference);
    return r == ".." || starts_with(r, "../") || contains(r, "/../");
}

bool reference_has_authority(std::string_view reference) {
    std::string_view r = trim(reference);
    return leading_scheme(r).has_value() || starts_with(r, "//");
}

} // namespace pwaudit
