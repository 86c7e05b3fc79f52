#include "pwaudit/corpus.hpp"

#include "pwaudit/errors.hpp"
#include "pwaudit/text.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace pwaudit {

namespace {

bool raw_field_text(const Json& fields, const char* key, std::string& out) {
    auto it = fields.find(key);
    if (it == fields.end())
        return false;
    out = it->is_string() ? it->get<std::string>() : it->dump();
    return true;
}

void count_url_field(const std::string& raw_text, const AbsoluteUrl& document_url,
                     UrlFieldStats& stats) {
    ++stats.present;
    std::string_view t = trim(raw_text);
    if (t.empty()) {
        ++stats.empty;
        return;
    }
    if (t.find('?') != std::string_view::npos)
        ++stats.with_query_params;
    if (is_parent_path_ref(t))
        ++stats.parent_path;
    if (reference_has_authority(t)) {
        if (auto abs = AbsoluteUrl::try_parse(t.substr(0, 2) == "//"
                                                  ? document_url.scheme + ":" + std::string(t)
                                                  : std::string(t))) {
            if (abs->origin() != document_url.origin())
                ++stats.cross_origin_https;
        }
    }
}

} // namespace

void CorpusIndex::add(CorpusEntry entry) {
    std::string key = entry.document_url.to_string();
    auto [it, inserted] = entries_.insert_or_assign(std::move(key), std::move(entry));
    if (!inserted)
        ++dedup_;
}

void CorpusIndex::rebuild() {
    name_counts_.clear();
    icon_origins_.clear();
    id_counts_.clear();
    stats_ = FieldStats{};

    for (const auto& [url, entry] : entries_) {
        const Manifest& m = entry.manifest;
        if (m.name) {
            std::string n = normalize_name(*m.name);
            if (!n.empty())
                ++name_counts_[n];
        }
        for (const IconEntry& icon : m.icons)
            icon_origins_[icon.src.to_string()].insert(m.document_url.origin().to_string());
        if (m.id)
            ++id_counts_[{m.document_url.origin().to_string(), *m.id}];

        std::string raw_text;
        if (raw_field_text(entry.raw.fields, "start_url", raw_text))
            count_url_field(raw_text, m.document_url, stats_.start_url);
        if (raw_field_text(entry.raw.fields, "scope", raw_text))
            count_url_field(raw_text, m.document_url, stats_.scope);
        if (raw_field_text(entry.raw.fields, "display", raw_text)) {
            ++stats_.display_counts[raw_text];
            if (raw_text != "browser" && raw_text != "minimal-ui" &&
                raw_text != "standalone" && raw_text != "fullscreen")
                ++stats_.display_error_counts[raw_text];
        }
    }
}

std::size_t CorpusIndex::name_count_excluding(const std::string& normalized_name,
                                              const std::string& self_document_url) const {
    auto it = name_counts_.find(normalized_name);
    if (it == name_counts_.end())
        return 0;
    std::size_t count = it->second;
    auto self = entries_.find(self_document_url);
    if (self != entries_.end() && self->second.manifest.name &&
        normalize_name(*self->second.manifest.name) == normalized_name)
        --count;
    return count;
}

std::size_t CorpusIndex::id_count_excluding(const std::string& origin, const std::string& id,
                                            const std::string& self_document_url) const {
    auto it = id_counts_.find({origin, id});
    if (it == id_counts_.end())
        return 0;
    std::size_t count = it->second;
    auto self = entries_.find(self_document_url);
    if (self != entries_.end() && self->second.manifest.id == id &&
        self->second.manifest.document_url.origin().to_string() == origin)
        --count;
    return count;
}

std::vector<std::string> CorpusIndex::foreign_icon_origins(const std::string& icon_src,
                                                           const std::string& own_origin) const {
    std::vector<std::string> out;
    auto it = icon_origins_.find(icon_src);
    if (it == icon_origins_.end())
        return out;
    for (const std::string& origin : it->second)
        if (origin != own_origin)
            out.push_back(origin);
    return out;
}

CorpusIndex ingest(const std::string& source, CorpusFormat format) {
    CorpusIndex index;

    auto add_manifest = [&index](const std::string& url_text, const Json& manifest_obj) {
        auto doc = AbsoluteUrl::try_parse(url_text);
        if (!doc || !manifest_obj.is_object()) {
            index.note_skipped();
            return;
        }
        CorpusEntry entry;
        entry.document_url = *doc;
        entry.raw.fields = manifest_obj;
        entry.raw.source_url = resolve(*doc, "manifest.webmanifest");
        entry.raw.document_url = *doc;
        entry.manifest = normalize(entry.raw);
        index.add(std::move(entry));
    };

    if (format == CorpusFormat::jsonl) {
        std::ifstream in(source);
        if (!in)
            throw SourceUnreadable("cannot open corpus file: " + source);
        std::string line;
        while (std::getline(in, line)) {
            if (trim(line).empty())
                continue;
            Json row = Json::parse(line, nullptr, false);
            if (row.is_discarded() || !row.is_object() || !row.contains("url") ||
                !row["url"].is_string() || !row.contains("manifest")) {
                index.note_skipped();
                continue;
            }
            add_manifest(row["url"].get<std::string>(), row["manifest"]);
        }
    } else {
        std::error_code ec;
        std::filesystem::directory_iterator dir(source, ec);
        if (ec)
            throw SourceUnreadable("cannot open corpus directory: " + source);
        std::vector<std::filesystem::path> files;
        for (const auto& de : dir) {
            if (!de.is_regular_file())
                continue;
            auto ext = de.path().extension().string();
            if (ext == ".webmanifest" || ext == ".json")
                files.push_back(de.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& path : files) {
            auto url_text = percent_decode(path.stem().string());
            if (!url_text) {
                index.note_skipped();
                continue;
            }
            std::ifstream in(path);
            std::stringstream body;
            body << in.rdbuf();
            Json manifest_obj = Json::parse(body.str(), nullptr, false);
            if (manifest_obj.is_discarded()) {
                index.note_skipped();
                continue;
            }
            add_manifest(*url_text, manifest_obj);
        }
    }
    index.rebuild();
    return index;
}

std::vector<std::pair<std::string, std::size_t>> duplicate_names(const CorpusIndex& index) {
    std::vector<std::pair<std::string, std::size_t>> out;
    for (const auto& [name, count] : index.name_counts())
        if (count >= 2)
            out.emplace_back(name, count);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second)
            return a.second > b.second;
        return a.first < b.first;
    });
    return out;
}

DuplicateSummary duplicate_summary(const CorpusIndex& index) {
    DuplicateSummary summary;
    for (const auto& [name, count] : duplicate_names(index)) {
        ++summary.unique_duplicate_names;
        summary.affected_entries += count;
    }
    for (const auto& [url, entry] : index.entries()) {
        if (!entry.manifest.name || trim(*entry.manifest.name).empty())
            ++summary.empty_names;
    }
    return summary;
}

std::vector<std::pair<std::string, std::size_t>> frequency_table(const CorpusIndex& index,
                                                                 FrequencyField field) {
    const char* key = nullptr;
    switch (field) {
    case FrequencyField::name: key = "name"; break;
    case FrequencyField::start_url_raw: key = "start_url"; break;
    case FrequencyField::scope_raw: key = "scope"; break;
    case FrequencyField::id: key = "id"; break;
    }
    std::map<std::string, std::size_t> counts;
    for (const auto& [url, entry] : index.entries()) {
        std::string value;
        if (raw_field_text(entry.raw.fields, key, value))
            ++counts[value];
    }
    std::vector<std::pair<std::string, std::size_t>> out(counts.begin(), counts.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second)
            return a.second > b.second;
        return a.first < b.first;
    });
    return out;
}

std::vector<std::pair<std::string, std::vector<std::string>>>
icon_collisions(const CorpusIndex& index) {
    std::vector<std::pair<std::string, std::vector<std::string>>> out;
    for (const auto& [src, origins] : index.icon_origins()) {
        if (origins.size() >= 2)
            out.emplace_back(src, std::vector<std::string>(origins.begin(), origins.end()));
    }
    return out; // map iteration is already ordered by icon src
}

Json stats_to_json(const CorpusIndex& index) {
    const FieldStats& s = index.field_stats();
    auto url_stats = [](const UrlFieldStats& u) {
        return Json{{"present", u.present},
                    {"with_query_params", u.with_query_params},
                    {"cross_origin_https", u.cross_origin_https},
                    {"parent_path", u.parent_path},
                    {"empty", u.empty}};
    };
    DuplicateSummary dup = duplicate_summary(index);
    Json j;
    j["entry_count"] = index.entry_count();
    j["skipped"] = index.skipped_count();
    j["deduplicated"] = index.dedup_count();
    j["start_url"] = url_stats(s.start_url);
    j["scope"] = url_stats(s.scope);
    j["display"] = s.display_counts;
    j["display_errors"] = s.display_error_counts;
    j["duplicates"] = {{"unique_duplicate_names", dup.unique_duplicate_names},
                       {"affected_entries", dup.affected_entries},
                       {"empty_names", dup.empty_names}};
    return j;
}

std::string frequency_to_csv(
    const std::vector<std::pair<std::string, std::size_t>>& rows) {
    std::string out = "token,count\n";
    for (const auto& [token, count] : rows) {
        bool needs_quotes = token.find_first_of(",\"\n") != std::string::npos;
        if (needs_quotes) {
            out += '"';
            for (char c : token) {
                if (c == '"')
                    out += '"';
                out += c;
            }
            out += '"';
        } else {
            out += token;
        }
        out += ',';
        out += std::to_string(count);
        out += '\n';
    }
    return out;
}

} // namespace pwaudit
