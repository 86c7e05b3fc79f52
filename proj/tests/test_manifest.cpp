#include "pwaudit/errors.hpp"
#include "pwaudit/manifest.hpp"

#include <doctest.h>

#include <random>

using namespace pwaudit;

namespace {

RawManifest parse_at(const std::string& text, const std::string& document,
                     const std::string& source = "") {
    AbsoluteUrl doc = AbsoluteUrl::parse(document);
    AbsoluteUrl src = source.empty() ? resolve(doc, "manifest.webmanifest")
                                     : AbsoluteUrl::parse(source);
    return parse_manifest(text, src, doc);
}

} // namespace

TEST_CASE("parse_manifest preserves fields and their order") {
    RawManifest raw = parse_at(R"({"name":"A","start_url":"/"})", "https://a.com/");
    REQUIRE(raw.fields.size() == 2);
    auto it = raw.fields.begin();
    CHECK(it.key() == "name");
    ++it;
    CHECK(it.key() == "start_url");

    // the yandex.ru shape: icons only is still a parseable manifest
    RawManifest icons_only = parse_at(R"({"icons":[{"src":"/i.png"}]})", "https://a.com/");
    CHECK(icons_only.fields.size() == 1);

    CHECK_THROWS_AS(parse_at("not json", "https://a.com/"), MalformedJson);
    CHECK_THROWS_AS(parse_at("[1,2]", "https://a.com/"), MalformedJson);
    CHECK_THROWS_AS(parse_at("\"str\"", "https://a.com/"), MalformedJson);
}

TEST_CASE("parse round-trips through serialize") {
    RawManifest raw = parse_at(
        R"({"name":"A","weird_field":{"deep":[1,2,{"x":null}]},"icons":[],"start_url":"/app"})",
        "https://a.com/");
    RawManifest again = parse_manifest(serialize(raw), raw.source_url, raw.document_url);
    CHECK(again == raw);
}

TEST_CASE("duplicate keys: last wins with a parse note") {
    RawManifest raw = parse_at(R"({"name":"first","name":"second"})", "https://a.com/");
    CHECK(raw.fields["name"] == "second");
    REQUIRE(raw.parse_notes.size() == 1);
    CHECK(raw.parse_notes[0].find("duplicate key 'name'") != std::string::npos);
}

TEST_CASE("normalize: cross-origin start_url falls back to the document URL") {
    RawManifest raw = parse_at(R"({"start_url":"https://qq.com/"})", "https://xw.qq.com/");
    Manifest m = normalize(raw);
    CHECK(m.start_url.to_string() == "https://xw.qq.com/");
    CHECK(m.start_url_fell_back);
    CHECK(m.start_url_raw == "https://qq.com/");
    CHECK(same_origin(m.start_url, m.document_url));
}

TEST_CASE("normalize: defaults derive from the document URL") {
    RawManifest raw = parse_at(R"({"name":"App"})", "https://a.com/app/index.html");
    Manifest m = normalize(raw);
    CHECK(m.start_url.to_string() == "https://a.com/app/index.html");
    CHECK(m.start_url_fell_back);
    CHECK(m.scope.to_string() == "https://a.com/app/");
    CHECK_FALSE(m.scope_raw.has_value());
}

TEST_CASE("normalize: root start_url gives scope /") {
    RawManifest raw = parse_at(R"({"start_url":"/"})", "https://a.com/");
    Manifest m = normalize(raw);
    CHECK(m.scope.path == "/");
    CHECK_FALSE(m.start_url_fell_back);
}

TEST_CASE("normalize: unknown fields are collected") {
    RawManifest raw = parse_at(R"({"name":"A","tracking_blob":"xyz","lang":"en"})",
                               "https://a.com/");
    Manifest m = normalize(raw);
    REQUIRE(m.unknown_fields.size() == 1);
    CHECK(m.unknown_fields[0] == "tracking_blob");
}

TEST_CASE("normalize: display values") {
    auto display_of = [](const std::string& v) {
        RawManifest raw = parse_at(R"({"display":")" + v + R"("})", "https://a.com/");
        return normalize(raw).display;
    };
    CHECK(display_of("browser") == DisplayMode::browser);
    CHECK(display_of("minimal-ui") == DisplayMode::minimal_ui);
    CHECK(display_of("standalone") == DisplayMode::standalone);
    CHECK(display_of("fullscreen") == DisplayMode::fullscreen);
    CHECK(display_of("immersive") == DisplayMode::unknown);
    CHECK(display_of("Standalone") == DisplayMode::unknown); // exact match only

    RawManifest missing = parse_at(R"({"name":"A"})", "https://a.com/");
    Manifest m = normalize(missing);
    CHECK(m.display == DisplayMode::browser);
    CHECK_FALSE(m.display_raw.has_value());

    RawManifest unknown = parse_at(R"({"display":"popup"})", "https://a.com/");
    Manifest u = normalize(unknown);
    CHECK(u.display == DisplayMode::unknown);
    CHECK(u.display_raw == "popup");
}

TEST_CASE("normalize: coercion of non-string known fields leaves a note") {
    RawManifest raw = parse_at(R"({"name":42})", "https://a.com/");
    Manifest m = normalize(raw);
    CHECK(m.name == "42");
    bool noted = false;
    for (const auto& note : m.parse_notes)
        if (note.find("coerced") != std::string::npos)
            noted = true;
    CHECK(noted);
}

TEST_CASE("normalize: icons resolve against the manifest URL") {
    RawManifest raw = parse_at(R"({"icons":[{"src":"icon.png","sizes":"192x192"},
                                            {"src":"https://cdn.x/i.png","type":"image/png"},
                                            {"notsrc":true},
                                            {"src":"data:image/png;base64,xx"}]})",
                               "https://a.com/app/", "https://a.com/app/manifest.json");
    Manifest m = normalize(raw);
    REQUIRE(m.icons.size() == 2);
    CHECK(m.icons[0].src.to_string() == "https://a.com/app/icon.png");
    CHECK(m.icons[0].sizes == "192x192");
    CHECK(m.icons[1].src.host == "cdn.x");
    CHECK(m.parse_notes.size() >= 2); // dropped entries are recorded
}

TEST_CASE("normalize: related application entries need url or id") {
    RawManifest raw = parse_at(
        R"({"related_applications":[
             {"platform":"play","id":"com.x.app"},
             {"platform":"play","url":"https://play.google.com/store/apps?id=com.x"},
             {"platform":"windows"}]})",
        "https://a.com/");
    Manifest m = normalize(raw);
    REQUIRE(m.related_applications.size() == 2);
    CHECK(m.related_applications[0].id == "com.x.app");
    CHECK(m.related_applications[1].url.has_value());
    bool noted = false;
    for (const auto& note : m.parse_notes)
        if (note.find("neither url nor id") != std::string::npos)
            noted = true;
    CHECK(noted);
}

TEST_CASE("normalize: scope that cannot contain start_url is replaced") {
    RawManifest raw = parse_at(R"({"start_url":"/app/home","scope":"/elsewhere/"})",
                               "https://a.com/app/");
    Manifest m = normalize(raw);
    CHECK(m.scope.path == "/app/"); // directory of start_url
    CHECK(m.scope_raw == "/elsewhere/");
    CHECK(within_scope(m.start_url, m.scope));
}

TEST_CASE("normalize: unresolvable start_url falls back") {
    RawManifest raw = parse_at(R"({"start_url":"data:text/html,hi"})", "https://a.com/x/");
    Manifest m = normalize(raw);
    CHECK(m.start_url_fell_back);
    CHECK(m.start_url.to_string() == "https://a.com/x/");
}

namespace {

// Random manifest generator over the shapes that exercise normalization.
Json random_manifest(std::mt19937_64& rng) {
    Json fields = Json::object();
    auto chance = [&rng](int pct) { return static_cast<int>(rng() % 100) < pct; };

    const char* names[] = {"App", "", "Starbucks", "Create React App Sample", "日本語アプリ"};
    const char* start_urls[] = {"/",
                                "/app/",
                                "index.html",
                                "?id=123",
                                "../",
                                "../../start",
                                "",
                                "https://other.example/",
                                "https://self.example/app/deep",
                                "//cdn.example/x",
                                "data:text/html,x",
                                "a/../b",
                                "/app?redirect=https://evil.example"};
    const char* scopes[] = {"/", "/app", "/app/", "../", "", "https://other.example/",
                            ".", "./sub/"};
    const char* displays[] = {"browser", "minimal-ui", "standalone", "fullscreen",
                              "immersive", "Standalone", ""};

    if (chance(80))
        fields["name"] = names[rng() % 5];
    if (chance(30))
        fields["short_name"] = "S";
    if (chance(80))
        fields["start_url"] = start_urls[rng() % 13];
    if (chance(60))
        fields["scope"] = scopes[rng() % 8];
    if (chance(70))
        fields["display"] = displays[rng() % 7];
    if (chance(20))
        fields["theme_color"] = "#00aa00";
    if (chance(40)) {
        Json icons = Json::array();
        int n = static_cast<int>(rng() % 3);
        for (int i = 0; i < n; ++i)
            icons.push_back(Json{{"src", i == 0 ? "/icon.png" : "https://cdn.example/i.png"},
                                 {"sizes", "192x192"}});
        fields["icons"] = icons;
    }
    if (chance(15))
        fields["prefer_related_applications"] = chance(50);
    if (chance(25))
        fields["custom_field_" + std::to_string(rng() % 3)] = "v";
    if (chance(10))
        fields["name"] = 77; // type coercion path
    return fields;
}

} // namespace

TEST_CASE("property: normalize keeps start_url same-origin and in scope; idempotent") {
    std::mt19937_64 rng(7);
    const char* documents[] = {"https://self.example/", "https://self.example/app/page.html",
                               "http://self.example:8080/deep/dir/"};
    for (int i = 0; i < 1200; ++i) {
        RawManifest raw;
        raw.document_url = AbsoluteUrl::parse(documents[rng() % 3]);
        raw.source_url = resolve(raw.document_url, "manifest.webmanifest");
        raw.fields = random_manifest(rng);

        Manifest m = normalize(raw);
        CAPTURE(raw.fields.dump());
        CHECK(same_origin(m.start_url, m.document_url));
        CHECK(within_scope(m.start_url, m.scope));

        // Idempotence: normalizing the re-serialized manifest is a no-op.
        Manifest again = normalize(reserialize(m));
        CHECK(again == m);
    }
}
