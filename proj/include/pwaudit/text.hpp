#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pwaudit {

std::string_view trim(std::string_view s);
std::string ascii_lower(std::string_view s);

// Number of Unicode scalar values in a UTF-8 string (continuation bytes
// are not counted; malformed bytes count as one scalar each).
std::size_t utf8_length(std::string_view s);

// Simple case folding over UTF-8: ASCII, Latin-1/Extended-A, Greek and
// Cyrillic letters. Unmapped code points pass through unchanged.
std::string casefold(std::string_view s);

// Shared definition of name identity for duplicate detection: trim,
// then case-fold.
std::string normalize_name(std::string_view s);

std::uint64_t fnv1a64(std::string_view data);
std::string to_hex(std::uint64_t v);

std::optional<std::string> percent_decode(std::string_view s);
std::string percent_encode_path_char_free(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);
bool contains(std::string_view haystack, std::string_view needle);

// Current wall-clock time in milliseconds since the Unix epoch.
std::int64_t now_ms();
std::string iso8601_utc(std::int64_t epoch_ms);

} // namespace pwaudit
