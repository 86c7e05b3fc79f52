#include "pwaudit/errors.hpp"
#include "pwaudit/url.hpp"

#include <doctest.h>

#include <random>
#include <sstream>
#include <vector>

using namespace pwaudit;

namespace {

// Independent resolution oracle: stack-based segment processing instead of
// the RFC 3986 buffer algorithm the implementation uses.
std::string oracle_normalize_path(const std::string& path) {
    std::vector<std::string> segments;
    std::string segment;
    std::stringstream stream(path);
    while (std::getline(stream, segment, '/'))
        segments.push_back(segment);
    if (!segments.empty())
        segments.erase(segments.begin()); // leading empty from the root '/'
    if (!path.empty() && path.back() == '/')
        segments.push_back(""); // getline drops a trailing empty segment

    std::vector<std::string> stack;
    bool trailing = false;
    for (std::size_t k = 0; k < segments.size(); ++k) {
        const std::string& s = segments[k];
        bool last = k + 1 == segments.size();
        if (s == ".") {
            trailing = last;
        } else if (s == "..") {
            if (!stack.empty())
                stack.pop_back();
            trailing = last;
        } else {
            stack.push_back(s); // empty segments are kept, as in RFC removal
            trailing = false;
        }
    }
    std::string out = "/";
    for (std::size_t k = 0; k < stack.size(); ++k) {
        out += stack[k];
        if (k + 1 < stack.size())
            out += "/";
    }
    if (trailing && out.back() != '/')
        out += "/";
    return out;
}

struct OracleUrl {
    std::string origin; // scheme://host:port with explicit port
    std::string path;
    std::string scheme;
    std::string host_port;
};

OracleUrl oracle_parse(const std::string& url) {
    OracleUrl out;
    std::size_t scheme_end = url.find("://");
    out.scheme = url.substr(0, scheme_end);
    std::size_t path_start = url.find('/', scheme_end + 3);
    std::string authority = path_start == std::string::npos
                                ? url.substr(scheme_end + 3)
                                : url.substr(scheme_end + 3, path_start - scheme_end - 3);
    std::size_t q = authority.find_first_of("?#");
    if (q != std::string::npos)
        authority = authority.substr(0, q);
    if (authority.find(':') == std::string::npos)
        authority += out.scheme == "https" ? ":443" : ":80";
    out.host_port = authority;
    out.origin = out.scheme + "://" + authority;
    std::string raw_path = path_start == std::string::npos ? "/" : url.substr(path_start);
    std::size_t stop = raw_path.find_first_of("?#");
    if (stop != std::string::npos)
        raw_path = raw_path.substr(0, stop);
    out.path = oracle_normalize_path(raw_path);
    return out;
}

std::string oracle_resolve(const std::string& base, const std::string& ref) {
    std::string r = ref;
    // trim
    while (!r.empty() && (r.front() == ' ' || r.front() == '\t'))
        r.erase(r.begin());
    while (!r.empty() && (r.back() == ' ' || r.back() == '\t'))
        r.pop_back();

    OracleUrl b = oracle_parse(base);
    if (r.rfind("https://", 0) == 0 || r.rfind("http://", 0) == 0) {
        OracleUrl a = oracle_parse(r);
        return a.origin + a.path;
    }
    if (r.rfind("//", 0) == 0) {
        OracleUrl a = oracle_parse(b.scheme + ":" + r);
        return a.origin + a.path;
    }
    std::size_t stop = r.find_first_of("?#");
    std::string path_part = stop == std::string::npos ? r : r.substr(0, stop);
    if (path_part.empty())
        return b.origin + b.path;
    if (path_part[0] == '/')
        return b.origin + oracle_normalize_path(path_part);
    std::string dir = b.path.substr(0, b.path.rfind('/') + 1);
    return b.origin + oracle_normalize_path(dir + path_part);
}

std::string impl_resolved_prefix(const std::string& base, const std::string& ref) {
    AbsoluteUrl resolved = resolve(AbsoluteUrl::parse(base), ref);
    return resolved.prefix_form();
}

// Oracle for parent-path references, matching the documented definition via
// segment inspection rather than substring search.
bool oracle_parent_ref(const std::string& ref) {
    std::string r = ref;
    while (!r.empty() && (r.front() == ' ' || r.front() == '\t'))
        r.erase(r.begin());
    while (!r.empty() && (r.back() == ' ' || r.back() == '\t'))
        r.pop_back();
    std::vector<std::string> segments;
    std::string segment;
    std::stringstream stream(r);
    while (std::getline(stream, segment, '/'))
        segments.push_back(segment);
    if (r.empty())
        return false;
    if (segments.empty())
        return false;
    if (segments[0] == "..")
        return true;
    for (std::size_t k = 1; k < segments.size(); ++k)
        if (segments[k] == ".." && k + 1 < segments.size())
            return true;
    return false;
}

} // namespace

TEST_CASE("absolute URL parsing") {
    AbsoluteUrl url = AbsoluteUrl::parse("https://a.com/x");
    CHECK(url.scheme == "https");
    CHECK(url.host == "a.com");
    CHECK(url.port == 443);
    CHECK(url.path == "/x");
    CHECK(url.to_string() == "https://a.com/x");

    AbsoluteUrl with_port = AbsoluteUrl::parse("http://a.com:8080/");
    CHECK(with_port.port == 8080);
    CHECK(origin_of(with_port).to_string() == "http://a.com:8080");

    AbsoluteUrl upper = AbsoluteUrl::parse("HTTPS://A.com/Path");
    CHECK(upper.scheme == "https");
    CHECK(upper.host == "a.com");
    CHECK(upper.path == "/Path"); // paths keep their case

    AbsoluteUrl query = AbsoluteUrl::parse("https://a.com/app/?redirect=attack.com#top");
    CHECK(query.query == "redirect=attack.com");
    CHECK(query.fragment == "top");

    CHECK_THROWS_AS(AbsoluteUrl::parse("not a url"), UrlError);
    CHECK_THROWS_AS(AbsoluteUrl::parse("ftp://a.com/"), UrlError);
    CHECK_THROWS_AS(AbsoluteUrl::parse("data:text/html,x"), UrlError);
    CHECK_THROWS_AS(AbsoluteUrl::parse("https:relative"), UrlError);
}

TEST_CASE("origin_of fills default ports") {
    CHECK(origin_of(AbsoluteUrl::parse("https://a.com/x")) == Origin{"https", "a.com", 443});
    CHECK(origin_of(AbsoluteUrl::parse("http://a.com:8080/")) ==
          Origin{"http", "a.com", 8080});
    // the qq.com shape: subdomain and apex are distinct origins
    CHECK(origin_of(AbsoluteUrl::parse("https://xw.qq.com/")) !=
          origin_of(AbsoluteUrl::parse("https://qq.com/")));
}

TEST_CASE("same_origin") {
    auto a = AbsoluteUrl::parse("https://a.com/p");
    auto b = AbsoluteUrl::parse("https://a.com/q");
    CHECK(same_origin(a, b));
    CHECK_FALSE(same_origin(AbsoluteUrl::parse("https://a.com/"),
                            AbsoluteUrl::parse("http://a.com/")));
    CHECK_FALSE(same_origin(AbsoluteUrl::parse("https://sub.a.com/"),
                            AbsoluteUrl::parse("https://a.com/")));
    // default port vs explicit default port is the same origin
    CHECK(same_origin(AbsoluteUrl::parse("https://a.com:443/"),
                      AbsoluteUrl::parse("https://a.com/")));
}

TEST_CASE("resolve handles the documented reference shapes") {
    auto base = AbsoluteUrl::parse("https://a.com/x/y/");
    CHECK(resolve(base, "../z").to_string() == "https://a.com/x/z");

    // "../" chains clamp at the root
    CHECK(resolve(AbsoluteUrl::parse("https://a.com/"), "../../p").to_string() ==
          "https://a.com/p");

    CHECK(resolve(AbsoluteUrl::parse("https://a.com/app/"), "?redirect=attack.com")
              .to_string() == "https://a.com/app/?redirect=attack.com");

    CHECK(resolve(base, "").to_string() == "https://a.com/x/y/");
    CHECK(resolve(base, "#frag").fragment == "frag");
    CHECK(resolve(base, "/rooted").path == "/rooted");
    CHECK(resolve(base, "//other.com/p").host == "other.com");
    CHECK(resolve(base, "https://other.com/p").host == "other.com");

    CHECK_THROWS_AS(resolve(base, "data:text/html,hi"), UnresolvableReference);
    CHECK_THROWS_AS(resolve(base, "javascript:alert(1)"), UnresolvableReference);
    CHECK_THROWS_AS(resolve(base, "blob:https://a.com/xyz"), UnresolvableReference);
}

TEST_CASE("resolve and within_scope agree with the oracle over a table") {
    const std::vector<std::string> bases = {
        "https://a.com/",
        "https://a.com/app/",
        "https://a.com/app/index.html",
        "https://a.com/x/y/z",
        "http://b.org:8080/deep/nested/dir/",
        "https://xw.qq.com/",
    };
    const std::vector<std::string> refs = {
        "",          ".",          "./",         "..",           "../",
        "../z",      "../../p",    "../../../q", "a",            "a/",
        "a/b",       "./a/b",      "a/./b",      "a/../b",       "a/../../b",
        "/rooted",   "/r/../s",    "?q=1",       "?redirect=https://evil.example",
        "#frag",     "a?x=1",      "a/..",       "..//b",        "x/y/../../w",
        "index.html","./index.html","../index.html", "a/b/c/d",  "./..",
        "https://other.example/abs", "//proto.example/rel",
    };
    std::size_t checked = 0;
    for (const std::string& base : bases) {
        for (const std::string& ref : refs) {
            CAPTURE(base);
            CAPTURE(ref);
            CHECK(impl_resolved_prefix(base, ref) == oracle_resolve(base, ref));
            ++checked;
        }
    }
    CHECK(checked >= 180);

    // scope membership cross-check: string-prefix oracle over the same table
    const std::vector<std::string> scopes = {
        "https://a.com/",          "https://a.com/app",  "https://a.com/app/",
        "http://b.org:8080/deep/", "https://xw.qq.com/",
    };
    std::size_t scope_checked = 0;
    for (const std::string& base : bases) {
        for (const std::string& ref : refs) {
            AbsoluteUrl resolved = resolve(AbsoluteUrl::parse(base), ref);
            for (const std::string& scope_text : scopes) {
                AbsoluteUrl scope = AbsoluteUrl::parse(scope_text);
                OracleUrl s = oracle_parse(scope_text);
                bool expected =
                    resolved.prefix_form().rfind(s.origin + s.path, 0) == 0;
                CAPTURE(base);
                CAPTURE(ref);
                CAPTURE(scope_text);
                CHECK(within_scope(resolved, scope) == expected);
                ++scope_checked;
            }
        }
    }
    CHECK(scope_checked >= 200);
}

TEST_CASE("within_scope basics") {
    auto scope = AbsoluteUrl::parse("https://a.com/app");
    CHECK(within_scope(scope, scope)); // reflexive
    CHECK(within_scope(AbsoluteUrl::parse("https://a.com/approot/x"), scope));
    CHECK_FALSE(within_scope(AbsoluteUrl::parse("https://b.com/app/x"),
                             AbsoluteUrl::parse("https://a.com/app/")));
    // query and fragment are ignored
    CHECK(within_scope(AbsoluteUrl::parse("https://a.com/app?x=1"), scope));
}

TEST_CASE("is_parent_path_ref follows the documented definition") {
    CHECK(is_parent_path_ref("../"));
    CHECK(is_parent_path_ref(".."));
    CHECK(is_parent_path_ref("../../x"));
    CHECK(is_parent_path_ref("a/../../b"));
    CHECK(is_parent_path_ref("  ../x "));
    CHECK_FALSE(is_parent_path_ref("./index.html"));
    CHECK_FALSE(is_parent_path_ref("a/b"));
    CHECK_FALSE(is_parent_path_ref("..a/b"));
    CHECK_FALSE(is_parent_path_ref(""));

    const std::vector<std::string> refs = {
        "../",  "..",     "../../x",  "a/../../b", "./index.html", "a/b",
        "..a/b", "a/..",  "x/../y",   "/abs/path", "a/b/../c/d",   "?q=../x",
    };
    for (const std::string& ref : refs) {
        CAPTURE(ref);
        CHECK(is_parent_path_ref(ref) == oracle_parent_ref(ref));
    }
}

TEST_CASE("property: same_origin is an equivalence relation") {
    std::mt19937_64 rng(41);
    std::vector<AbsoluteUrl> urls;
    const char* hosts[] = {"a.com", "b.com", "sub.a.com"};
    const char* schemes[] = {"http", "https"};
    for (int i = 0; i < 60; ++i) {
        std::string text = std::string(schemes[rng() % 2]) + "://" + hosts[rng() % 3];
        if (rng() % 3 == 0)
            text += ":" + std::to_string(1024 + rng() % 9000);
        text += "/p" + std::to_string(rng() % 5);
        urls.push_back(AbsoluteUrl::parse(text));
    }
    for (const auto& a : urls) {
        CHECK(same_origin(a, a));
        for (const auto& b : urls) {
            CHECK(same_origin(a, b) == same_origin(b, a));
            for (const auto& c : urls)
                if (same_origin(a, b) && same_origin(b, c))
                    CHECK(same_origin(a, c));
        }
    }
}

TEST_CASE("property: resolve keeps the base origin unless the ref has authority") {
    std::mt19937_64 rng(42);
    auto base = AbsoluteUrl::parse("https://a.com/app/dir/");
    const char* pieces[] = {"x", "y/z", "..", ".", "deep/a/b", "?q=1", "#f", "./w"};
    for (int i = 0; i < 400; ++i) {
        std::string ref;
        int n = 1 + static_cast<int>(rng() % 3);
        for (int k = 0; k < n; ++k) {
            if (k > 0 && ref.find('?') == std::string::npos &&
                ref.find('#') == std::string::npos)
                ref += "/";
            ref += pieces[rng() % 8];
        }
        if (reference_has_authority(ref))
            continue;
        AbsoluteUrl resolved = resolve(base, ref);
        CAPTURE(ref);
        CHECK(same_origin(resolved, base));
    }
}

TEST_CASE("property: non-parent relative refs stay within the base directory") {
    std::mt19937_64 rng(43);
    auto base_dir = AbsoluteUrl::parse("https://a.com/app/dir/");
    const char* pieces[] = {"x", "y", "z.html", ".", "a/b", "c/./d", "q/.."};
    for (int i = 0; i < 400; ++i) {
        std::string ref;
        int n = 1 + static_cast<int>(rng() % 3);
        for (int k = 0; k < n; ++k) {
            if (k > 0)
                ref += "/";
            ref += pieces[rng() % 7];
        }
        if (is_parent_path_ref(ref) || reference_has_authority(ref) || ref[0] == '/')
            continue;
        AbsoluteUrl resolved = resolve(base_dir, ref);
        CAPTURE(ref);
        CHECK(within_scope(resolved, base_dir));
    }
}

TEST_CASE("property: within_scope is monotone under path extension") {
    std::mt19937_64 rng(44);
    const char* scopes[] = {"https://a.com/", "https://a.com/app", "https://a.com/app/"};
    const char* paths[] = {"/", "/app", "/app/", "/app/x", "/approot", "/other"};
    for (int i = 0; i < 200; ++i) {
        AbsoluteUrl scope = AbsoluteUrl::parse(scopes[rng() % 3]);
        AbsoluteUrl url = AbsoluteUrl::parse(std::string("https://a.com") + paths[rng() % 6]);
        if (!within_scope(url, scope))
            continue;
        AbsoluteUrl extended = url;
        extended.path += (extended.path.back() == '/' ? "" : "/");
        extended.path += "extra" + std::to_string(rng() % 10);
        CHECK(within_scope(extended, scope));
    }
}
