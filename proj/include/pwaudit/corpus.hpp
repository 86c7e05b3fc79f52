#pragma once

#include "pwaudit/manifest.hpp"

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace pwaudit {

struct CorpusEntry {
    AbsoluteUrl document_url;
    RawManifest raw;
    Manifest manifest;
};

enum class CorpusFormat { jsonl, directory };

// Per-URL-field counters behind the word-cloud style aggregates.
struct UrlFieldStats {
    std::size_t present = 0;
    std::size_t with_query_params = 0;
    std::size_t cross_origin_https = 0;
    std::size_t parent_path = 0;
    std::size_t empty = 0;

    bool operator==(const UrlFieldStats&) const = default;
};

struct FieldStats {
    UrlFieldStats start_url;
    UrlFieldStats scope;
    // Canonical display value -> count; unknown values keyed by raw text.
    std::map<std::string, std::size_t> display_counts;
    // Raw display texts that are not one of the four documented modes.
    std::map<std::string, std::size_t> display_error_counts;

    bool operator==(const FieldStats&) const = default;
};

struct DuplicateSummary {
    std::size_t unique_duplicate_names = 0;
    std::size_t affected_entries = 0;
    std::size_t empty_names = 0;

    bool operator==(const DuplicateSummary&) const = default;
};

class CorpusIndex {
public:
    CorpusIndex() = default;

    // Adds one entry; an entry with an already-seen document_url replaces
    // the previous one (last wins) and counts as a dedup. Call rebuild()
    // after the last add.
    void add(CorpusEntry entry);
    void rebuild();

    std::size_t entry_count() const { return entries_.size(); }
    std::size_t skipped_count() const { return skipped_; }
    std::size_t dedup_count() const { return dedup_; }
    void note_skipped() { ++skipped_; }

    const std::map<std::string, CorpusEntry>& entries() const { return entries_; }
    const std::map<std::string, std::size_t>& name_counts() const { return name_counts_; }
    const std::map<std::string, std::set<std::string>>& icon_origins() const {
        return icon_origins_;
    }
    const std::map<std::pair<std::string, std::string>, std::size_t>&
    id_counts_per_origin() const {
        return id_counts_;
    }
    const FieldStats& field_stats() const { return stats_; }

    // Count of corpus entries sharing this normalized name, excluding the
    // entry at self_document_url when it matches.
    std::size_t name_count_excluding(const std::string& normalized_name,
                                     const std::string& self_document_url) const;
    std::size_t id_count_excluding(const std::string& origin, const std::string& id,
                                   const std::string& self_document_url) const;
    // Origins other than `own_origin` that reference this icon URL.
    std::vector<std::string> foreign_icon_origins(const std::string& icon_src,
                                                  const std::string& own_origin) const;

    bool operator==(const CorpusIndex& o) const {
        return entries_ == o.entries_ && name_counts_ == o.name_counts_ &&
               icon_origins_ == o.icon_origins_ && id_counts_ == o.id_counts_ &&
               stats_ == o.stats_;
    }

private:
    std::map<std::string, CorpusEntry> entries_; // keyed by document_url text
    std::map<std::string, std::size_t> name_counts_;
    std::map<std::string, std::set<std::string>> icon_origins_;
    std::map<std::pair<std::string, std::string>, std::size_t> id_counts_;
    FieldStats stats_;
    std::size_t skipped_ = 0;
    std::size_t dedup_ = 0;
};

inline bool operator==(const CorpusEntry& a, const CorpusEntry& b) {
    return a.document_url == b.document_url && a.raw == b.raw && a.manifest == b.manifest;
}

// Reads a corpus and builds the index. JSONL lines are {"url":..,
// "manifest":{..}}; directory mode reads *.webmanifest / *.json files named
// by the percent-encoded document URL. Malformed rows are counted and
// skipped. Throws SourceUnreadable when the path cannot be opened.
CorpusIndex ingest(const std::string& source, CorpusFormat format);

// (name, count) rows with count >= 2, by count descending then name.
std::vector<std::pair<std::string, std::size_t>> duplicate_names(const CorpusIndex& index);

DuplicateSummary duplicate_summary(const CorpusIndex& index);

enum class FrequencyField { name, start_url_raw, scope_raw, id };

// Raw value counts for the word-cloud feeds, by count descending then value.
std::vector<std::pair<std::string, std::size_t>> frequency_table(const CorpusIndex& index,
                                                                 FrequencyField field);

// Icon URLs referenced from two or more distinct document origins.
std::vector<std::pair<std::string, std::vector<std::string>>>
icon_collisions(const CorpusIndex& index);

Json stats_to_json(const CorpusIndex& index);
std::string frequency_to_csv(
    const std::vector<std::pair<std::string, std::size_t>>& rows);

} // namespace pwaudit
