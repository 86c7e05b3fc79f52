#pragma once

#include "pwaudit/manifest.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pwaudit {

enum class ValueKind { text, url, url_list, boolean, object_list };
std::string_view value_kind_name(ValueKind k);

struct FieldSpec {
    std::string name;
    ValueKind kind;
    std::vector<std::string> documented_values; // for enumerated fields
    std::string constraints;                    // free-form note
};

struct FieldSchema {
    std::vector<FieldSpec> fields;

    // One spec per manifest field, as documented.
    static FieldSchema standard();
    const FieldSpec* find(std::string_view name) const;
};

enum class OperatorId {
    documented_value,   // (a)
    undocumented_value, // (b)
    unknown_field,      // (c)
    field_removal,      // (d)
    empty_value,        // (e)
    oversize_text,      // (f)
    script_payload,     // (g)
    relative_path,      // (h)
    parent_path,        // (i)
    cross_origin_url,   // (j)
    redirect_param,     // (k)
    malformed_json,     // designated: the one mutant that must not parse
};
std::string_view operator_name(OperatorId op);
std::optional<OperatorId> operator_from_name(std::string_view name);

struct Mutant {
    std::string mutant_id; // stable hash of base + operator + parameters
    OperatorId op;
    std::string field;                  // empty for global operators
    std::string parameter;              // human-readable parameter tag
    std::map<std::string, Json> mutated_fields; // field -> new value (null = removed)
    std::string rendered;               // manifest body to serve
    bool designated_malformed = false;
};

// Fixed, versioned XSS-shaped payload list (script tags, event-handler
// attributes, javascript: URLs).
const std::vector<std::string>& xss_payloads();
const std::vector<std::string>& xss_url_payloads();
std::string_view xss_payload_list_version();

// The default plan applies every operator to every applicable field; with
// pairs=true it additionally composes every two single mutations that touch
// distinct fields. Fully determined by (base, schema, seed).
std::vector<Mutant> generate_mutants(const RawManifest& base, const FieldSchema& schema,
                                     std::uint64_t seed, bool pairs = false);

enum class Outcome {
    installed,
    not_installable,
    field_ignored,
    prompt_anomaly,
    delayed_update,
    other,
};
std::string_view outcome_name(Outcome o);
std::optional<Outcome> outcome_from_name(std::string_view name);

struct ServeEvent {
    std::int64_t timestamp_ms;
    std::string mutant_id;
};

struct Observation {
    std::int64_t timestamp_ms;
    std::string mutant_id;
    Outcome outcome;
    std::string note;
};

struct FuzzSession {
    std::string session_id;
    std::uint64_t seed = 0;
    int interval_seconds = 60;
    RawManifest base;
    std::vector<Mutant> mutants;
    std::vector<ServeEvent> serve_log;    // timestamps are non-decreasing
    std::vector<Observation> observations;

    const Mutant* find_mutant(std::string_view mutant_id) const;
};

FuzzSession make_session(const RawManifest& base, const FieldSchema& schema,
                         std::uint64_t seed, int interval_seconds, bool pairs = false);

// JSONL event persistence: {type, timestamp, payload} rows. A session file
// replays into the same session, so a crashed server resumes with its log.
void save_session(const FuzzSession& session, const std::string& path);
FuzzSession load_session(const std::string& path);
void append_serve_event(const std::string& path, const ServeEvent& event);
void append_observation_event(const std::string& path, const Observation& obs);

// Throws UnknownMutant when the id is not part of the session. When
// store_path is non-empty the observation is also appended to the file.
void record_observation(FuzzSession& session, std::string_view mutant_id, Outcome outcome,
                        std::string_view note, const std::string& store_path = "");

struct MutantReport {
    std::string mutant_id;
    OperatorId op;
    std::string field;
    std::string parameter;
    std::size_t serve_count = 0;
    std::map<Outcome, std::size_t> outcomes;
    bool unobserved = true;
};

std::vector<MutantReport> session_report(const FuzzSession& session);
Json session_report_to_json(const FuzzSession& session);

} // namespace pwaudit
