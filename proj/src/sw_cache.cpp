#include "pwaudit/sw_cache.hpp"

#include <algorithm>
#include <cctype>

namespace pwaudit {

namespace {

// Blanks out // and /* */ comments and string/template literals, keeping
// newlines so positions still map to source lines. Pattern scans stay
// lexical without tripping over quoted or commented text.
std::string blank_noise(std::string_view src) {
    std::string out(src);
    std::size_t i = 0;
    auto blank = [&out](std::size_t from, std::size_t to) {
        for (std::size_t k = from; k < to && k < out.size(); ++k)
            if (out[k] != '\n')
                out[k] = ' ';
    };
    while (i < out.size()) {
        char c = out[i];
        if (c == '/' && i + 1 < out.size() && out[i + 1] == '/') {
            std::size_t end = out.find('\n', i);
            if (end == std::string::npos)
                end = out.size();
            blank(i, end);
            i = end;
        } else if (c == '/' && i + 1 < out.size() && out[i + 1] == '*') {
            std::size_t end = out.find("*/", i + 2);
            end = end == std::string::npos ? out.size() : end + 2;
            blank(i, end);
            i = end;
        } else if (c == '"' || c == '\'' || c == '`') {
            std::size_t j = i + 1;
            while (j < out.size() && out[j] != c) {
                if (out[j] == '\\')
                    ++j;
                ++j;
            }
            std::size_t end = std::min(j + 1, out.size());
            // Keep the quotes, blank the content; 'fetch' in a string must
            // not look like a call.
            blank(i + 1, end - (j < out.size() ? 1 : 0));
            i = end;
        } else {
            ++i;
        }
    }
    return out;
}

bool is_word(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

// First position of `word` followed (after spaces) by '(' at or after
// `from`, with a word boundary on the left.
std::size_t find_call(std::string_view text, std::string_view word, std::size_t from) {
    std::size_t pos = from;
    while ((pos = text.find(word, pos)) != std::string_view::npos) {
        bool left_ok = pos == 0 || !is_word(text[pos - 1]);
        std::size_t after = pos + word.size();
        while (after < text.size() &&
               std::isspace(static_cast<unsigned char>(text[after])))
            ++after;
        if (left_ok && after < text.size() && text[after] == '(')
            return pos;
        pos += word.size();
    }
    return std::string_view::npos;
}

// Position of "<recv> . <member>" with optional whitespace around the dot,
// where recv ends in "cache" or "caches" (covers cache, caches, appCache...
// no: boundary enforced, so exactly cache/caches identifiers).
std::size_t find_member_call(std::string_view text, std::string_view member,
                             std::size_t from) {
    std::size_t pos = from;
    while ((pos = text.find(member, pos)) != std::string_view::npos) {
        // scan left over whitespace to a '.'
        std::size_t k = pos;
        while (k > 0 && std::isspace(static_cast<unsigned char>(text[k - 1])))
            --k;
        if (k == 0 || text[k - 1] != '.') {
            pos += member.size();
            continue;
        }
        --k; // at '.'
        while (k > 0 && std::isspace(static_cast<unsigned char>(text[k - 1])))
            --k;
        // receiver identifier
        std::size_t end = k;
        while (k > 0 && is_word(text[k - 1]))
            --k;
        std::string_view recv = text.substr(k, end - k);
        bool cacheish = recv == "cache" || recv == "caches" ||
                        (recv.size() > 5 && recv.substr(recv.size() - 5) == "Cache") ||
                        (recv.size() > 5 && recv.substr(recv.size() - 5) == "cache");
        // right side must be a call
        std::size_t after = pos + member.size();
        while (after < text.size() &&
               std::isspace(static_cast<unsigned char>(text[after])))
            ++after;
        if (cacheish && after < text.size() && text[after] == '(')
            return pos;
        pos += member.size();
    }
    return std::string_view::npos;
}

int line_of(std::string_view text, std::size_t pos) {
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

struct HandlerRegion {
    std::size_t begin;
    std::size_t end;
};

// Matches the braces of the fetch-handler callback, skipping none (strings
// were already blanked).
std::size_t match_braces(std::string_view text, std::size_t open_brace) {
    int depth = 0;
    for (std::size_t i = open_brace; i < text.size(); ++i) {
        if (text[i] == '{')
            ++depth;
        else if (text[i] == '}' && --depth == 0)
            return i;
    }
    return text.size();
}

std::vector<HandlerRegion> fetch_handler_regions(std::string_view original,
                                                 std::string_view cleaned) {
    std::vector<HandlerRegion> regions;
    auto add_region_from = [&](std::size_t start) {
        std::size_t brace = cleaned.find('{', start);
        if (brace == std::string_view::npos)
            return;
        regions.push_back({start, match_braces(cleaned, brace) + 1});
    };

    // addEventListener('fetch', ...) — the event name lives in the original
    // text because string contents are blanked in `cleaned`.
    std::size_t pos = 0;
    while ((pos = cleaned.find("addEventListener", pos)) != std::string_view::npos) {
        std::size_t paren = cleaned.find('(', pos);
        if (paren == std::string_view::npos)
            break;
        std::size_t quote = paren + 1;
        while (quote < original.size() &&
               std::isspace(static_cast<unsigned char>(original[quote])))
            ++quote;
        if (quote < original.size() &&
            (original[quote] == '"' || original[quote] == '\'' || original[quote] == '`')) {
            char q = original[quote];
            std::size_t close = original.find(q, quote + 1);
            if (close != std::string_view::npos &&
                original.substr(quote + 1, close - quote - 1) == "fetch")
                add_region_from(pos);
        }
        pos += 16;
    }
    // onfetch = ... assignments.
    pos = 0;
    while ((pos = cleaned.find("onfetch", pos)) != std::string_view::npos) {
        bool left_ok = pos == 0 || !is_word(cleaned[pos - 1]) || cleaned[pos - 1] == '.';
        std::size_t eq = pos + 7;
        while (eq < cleaned.size() && std::isspace(static_cast<unsigned char>(cleaned[eq])))
            ++eq;
        if (left_ok && eq < cleaned.size() && cleaned[eq] == '=')
            add_region_from(pos);
        pos += 7;
    }
    std::sort(regions.begin(), regions.end(),
              [](const HandlerRegion& a, const HandlerRegion& b) { return a.begin < b.begin; });
    return regions;
}

struct RegionScan {
    std::size_t read_pos = std::string_view::npos;
    std::size_t fetch_pos = std::string_view::npos;
    std::size_t write_pos = std::string_view::npos;
};

RegionScan scan_region(std::string_view cleaned, const HandlerRegion& region) {
    std::string_view body = cleaned.substr(region.begin, region.end - region.begin);
    RegionScan scan;
    std::size_t p = find_member_call(body, "match", 0);
    std::size_t p2 = find_member_call(body, "matchAll", 0);
    scan.read_pos = std::min(p, p2);
    scan.fetch_pos = find_call(body, "fetch", 0);
    std::size_t w1 = find_member_call(body, "put", 0);
    std::size_t w2 = find_member_call(body, "add", 0);
    std::size_t w3 = find_member_call(body, "addAll", 0);
    scan.write_pos = std::min({w1, w2, w3});
    if (scan.read_pos != std::string_view::npos)
        scan.read_pos += region.begin;
    if (scan.fetch_pos != std::string_view::npos)
        scan.fetch_pos += region.begin;
    if (scan.write_pos != std::string_view::npos)
        scan.write_pos += region.begin;
    return scan;
}

CacheStrategy strategy_of(const RegionScan& s) {
    bool has_read = s.read_pos != std::string_view::npos;
    bool has_fetch = s.fetch_pos != std::string_view::npos;
    bool has_write = s.write_pos != std::string_view::npos;
    if (!has_read && !has_fetch)
        return CacheStrategy::unknown;
    if (has_read && !has_fetch)
        return CacheStrategy::cache_only;
    if (!has_read && has_fetch)
        return CacheStrategy::network_only;
    if (s.read_pos < s.fetch_pos)
        return has_write ? CacheStrategy::stale_while_revalidate : CacheStrategy::cache_first;
    return CacheStrategy::network_first;
}

int risk_rank(CacheStrategy s) {
    switch (s) {
    case CacheStrategy::cache_only: return 5;
    case CacheStrategy::network_only: return 4;
    case CacheStrategy::cache_first: return 3;
    case CacheStrategy::network_first: return 2;
    case CacheStrategy::stale_while_revalidate: return 1;
    case CacheStrategy::unknown: return 0;
    }
    return 0;
}

} // namespace

std::string_view cache_strategy_name(CacheStrategy s) {
    switch (s) {
    case CacheStrategy::cache_first: return "cache_first";
    case CacheStrategy::network_first: return "network_first";
    case CacheStrategy::cache_only: return "cache_only";
    case CacheStrategy::network_only: return "network_only";
    case CacheStrategy::stale_while_revalidate: return "stale_while_revalidate";
    case CacheStrategy::unknown: return "unknown";
    }
    return "unknown";
}

std::string_view sw_confidence_name(SwConfidence c) {
    switch (c) {
    case SwConfidence::pattern_match: return "pattern_match";
    case SwConfidence::heuristic: return "heuristic";
    case SwConfidence::unknown: return "unknown";
    }
    return "unknown";
}

SwClassification classify_sw(std::string_view source) {
    SwClassification out;
    std::string cleaned = blank_noise(source);
    auto regions = fetch_handler_regions(source, cleaned);

    CacheStrategy best = CacheStrategy::unknown;
    bool conflict = false;
    for (const HandlerRegion& region : regions) {
        RegionScan scan = scan_region(cleaned, region);
        CacheStrategy strategy = strategy_of(scan);
        if (strategy == CacheStrategy::unknown)
            continue;
        auto push = [&](const char* name, std::size_t pos) {
            if (pos == std::string_view::npos)
                return;
            int line = line_of(cleaned, pos);
            out.evidence.push_back({name, line, line});
        };
        push("cache-read", scan.read_pos);
        push("network-fetch", scan.fetch_pos);
        push("cache-write", scan.write_pos);
        if (best == CacheStrategy::unknown) {
            best = strategy;
        } else if (best != strategy) {
            conflict = true;
            if (risk_rank(strategy) > risk_rank(best))
                best = strategy;
        }
    }
    out.strategy = best;
    if (out.evidence.empty()) {
        out.strategy = CacheStrategy::unknown;
        out.confidence = SwConfidence::unknown;
    } else {
        out.confidence = conflict ? SwConfidence::heuristic : SwConfidence::pattern_match;
    }
    return out;
}

std::optional<Finding> cache_only_risk(const SwClassification& classification) {
    if (classification.strategy != CacheStrategy::cache_only)
        return std::nullopt;
    return make_finding(RuleId::sec_sw_cacheonly, "service_worker",
                        "fetch handler answers from the cache with no network path; "
                        "the app cannot update itself");
}

Json sw_classification_to_json(const SwClassification& c) {
    Json evidence = Json::array();
    for (const SwEvidence& e : c.evidence)
        evidence.push_back({{"pattern", e.pattern},
                            {"line_begin", e.line_begin},
                            {"line_end", e.line_end}});
    return Json{{"strategy", std::string(cache_strategy_name(c.strategy))},
                {"confidence", std::string(sw_confidence_name(c.confidence))},
                {"evidence", evidence}};
}

} // namespace pwaudit
