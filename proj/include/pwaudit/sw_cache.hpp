#pragma once

#include "pwaudit/json.hpp"
#include "pwaudit/rules.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pwaudit {

enum class CacheStrategy {
    cache_first,
    network_first,
    cache_only,
    network_only,
    stale_while_revalidate,
    unknown,
};
std::string_view cache_strategy_name(CacheStrategy s);

enum class SwConfidence { pattern_match, heuristic, unknown };
std::string_view sw_confidence_name(SwConfidence c);

struct SwEvidence {
    std::string pattern; // "cache-read", "network-fetch", "cache-write"
    int line_begin = 0;
    int line_end = 0;

    bool operator==(const SwEvidence&) const = default;
};

struct SwClassification {
    CacheStrategy strategy = CacheStrategy::unknown;
    std::vector<SwEvidence> evidence;
    SwConfidence confidence = SwConfidence::unknown;
};

// Lexical classification of the fetch-handler caching strategy. Comment
// and whitespace tolerant; works on minified sources. Never executes the
// script.
SwClassification classify_sw(std::string_view source);

// SEC-SW-CACHEONLY for cache_only classifications, nothing otherwise.
std::optional<Finding> cache_only_risk(const SwClassification& classification);

Json sw_classification_to_json(const SwClassification& c);

} // namespace pwaudit
