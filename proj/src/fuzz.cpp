#include "pwaudit/fuzz.hpp"

#include "pwaudit/errors.hpp"
#include "pwaudit/text.hpp"

#include <algorithm>
#include <fstream>

namespace pwaudit {

namespace {

std::string seed_token(std::uint64_t seed, std::string_view salt) {
    return to_hex(fnv1a64(std::string(salt) + ":" + std::to_string(seed))).substr(0, 8);
}

Json apply_mutations(const Json& base_fields,
                     const std::map<std::string, Json>& mutated) {
    Json out = base_fields;
    for (const auto& [field, value] : mutated) {
        if (value.is_null())
            out.erase(field);
        else
            out[field] = value;
    }
    return out;
}

std::string mutant_hash(const RawManifest& base, OperatorId op, std::string_view field,
                        std::string_view parameter) {
    std::string material = serialize(base);
    material += '\x1f';
    material += operator_name(op);
    material += '\x1f';
    material += field;
    material += '\x1f';
    material += parameter;
    return to_hex(fnv1a64(material));
}

struct Generator {
    const RawManifest& base;
    const FieldSchema& schema;
    std::uint64_t seed;
    std::vector<Mutant> out;

    void emit(OperatorId op, const std::string& field, const std::string& parameter,
              std::map<std::string, Json> mutated) {
        Mutant m;
        m.op = op;
        m.field = field;
        m.parameter = parameter;
        m.mutant_id = mutant_hash(base, op, field, parameter);
        m.mutated_fields = std::move(mutated);
        m.rendered = apply_mutations(base.fields, m.mutated_fields).dump();
        out.push_back(std::move(m));
    }

    // Wraps a single URL-ish value into the shape the field expects.
    Json url_value(const FieldSpec& spec, const std::string& url) {
        if (spec.kind == ValueKind::url_list)
            return Json::array({Json{{"src", url}, {"sizes", "192x192"}}});
        return url;
    }

    std::string current_text(const FieldSpec& spec) {
        auto it = base.fields.find(spec.name);
        if (it != base.fields.end() && it->is_string())
            return it->get<std::string>();
        return "/";
    }

    void run(bool pairs) {
        for (const FieldSpec& spec : schema.fields) {
            documented_values(spec);
            undocumented_value(spec);
            field_removal(spec);
            empty_value(spec);
            oversize_text(spec);
            script_payloads(spec);
            url_operators(spec);
        }
        unknown_field();
        std::size_t singles = out.size();
        malformed();
        if (pairs)
            compose_pairs(singles);
    }

    void documented_values(const FieldSpec& spec) {
        for (const std::string& value : spec.documented_values) {
            Json v = value;
            if (spec.kind == ValueKind::boolean)
                v = (value == "true");
            emit(OperatorId::documented_value, spec.name, value, {{spec.name, v}});
        }
    }

    void undocumented_value(const FieldSpec& spec) {
        if (spec.documented_values.empty())
            return;
        std::string value = "undocumented-" + seed_token(seed, "undoc:" + spec.name);
        emit(OperatorId::undocumented_value, spec.name, value, {{spec.name, Json(value)}});
    }

    void field_removal(const FieldSpec& spec) {
        if (!base.fields.contains(spec.name))
            return;
        emit(OperatorId::field_removal, spec.name, "remove", {{spec.name, Json()}});
    }

    void empty_value(const FieldSpec& spec) {
        switch (spec.kind) {
        case ValueKind::text:
        case ValueKind::url:
            emit(OperatorId::empty_value, spec.name, "empty-string",
                 {{spec.name, Json("")}});
            break;
        case ValueKind::url_list:
        case ValueKind::object_list:
            emit(OperatorId::empty_value, spec.name, "empty-list",
                 {{spec.name, Json::array()}});
            break;
        case ValueKind::boolean:
            break; // no empty boolean
        }
    }

    void oversize_text(const FieldSpec& spec) {
        if (spec.kind != ValueKind::text)
            return;
        for (std::size_t length : {std::size_t{1000}, std::size_t{1001}, std::size_t{5000}}) {
            std::string value(length, 'a');
            emit(OperatorId::oversize_text, spec.name, std::to_string(length),
                 {{spec.name, Json(value)}});
        }
    }

    void script_payloads(const FieldSpec& spec) {
        if (spec.kind == ValueKind::text) {
            for (const std::string& payload : xss_payloads())
                emit(OperatorId::script_payload, spec.name, payload,
                     {{spec.name, Json(payload)}});
        } else if (spec.kind == ValueKind::url || spec.kind == ValueKind::url_list) {
            for (const std::string& payload : xss_url_payloads())
                emit(OperatorId::script_payload, spec.name, payload,
                     {{spec.name, url_value(spec, payload)}});
        }
    }

    void url_operators(const FieldSpec& spec) {
        if (spec.kind != ValueKind::url && spec.kind != ValueKind::url_list)
            return;
        emit(OperatorId::relative_path, spec.name, "./relative/start.html",
             {{spec.name, url_value(spec, "./relative/start.html")}});
        for (const char* ref : {"../", "../../up.html"})
            emit(OperatorId::parent_path, spec.name, ref,
                 {{spec.name, url_value(spec, ref)}});
        emit(OperatorId::cross_origin_url, spec.name, "https://attack.example/landing",
             {{spec.name, url_value(spec, "https://attack.example/landing")}});
        if (spec.kind == ValueKind::url) {
            std::string current = current_text(spec);
            std::string value = current +
                                (current.find('?') == std::string::npos ? "?" : "&") +
                                "redirect=attack.example";
            emit(OperatorId::redirect_param, spec.name, "redirect=attack.example",
                 {{spec.name, Json(value)}});
        }
    }

    void unknown_field() {
        std::string name = "x_probe_" + seed_token(seed, "unknown-field");
        std::string value = "probe-" + seed_token(seed, "unknown-value");
        emit(OperatorId::unknown_field, name, value, {{name, Json(value)}});
    }

    void malformed() {
        Mutant m;
        m.op = OperatorId::malformed_json;
        m.field = "";
        m.parameter = "truncated";
        m.mutant_id = mutant_hash(base, m.op, m.field, m.parameter);
        std::string body = base.fields.dump();
        m.rendered = body.substr(0, body.size() > 2 ? body.size() - 2 : 0) + ",";
        m.designated_malformed = true;
        out.push_back(std::move(m));
    }

    void compose_pairs(std::size_t singles) {
        for (std::size_t i = 0; i < singles; ++i) {
            for (std::size_t j = i + 1; j < singles; ++j) {
                const Mutant& a = out[i];
                const Mutant& b = out[j];
                if (a.field == b.field)
                    continue;
                Mutant m;
                m.op = a.op;
                m.field = a.field + "+" + b.field;
                m.parameter = a.mutant_id + "+" + b.mutant_id;
                m.mutant_id = mutant_hash(base, a.op, m.field, m.parameter);
                m.mutated_fields = a.mutated_fields;
                for (const auto& [k, v] : b.mutated_fields)
                    m.mutated_fields[k] = v;
                m.rendered = apply_mutations(base.fields, m.mutated_fields).dump();
                out.push_back(std::move(m));
            }
        }
    }
};

} // namespace

std::string_view value_kind_name(ValueKind k) {
    switch (k) {
    case ValueKind::text: return "text";
    case ValueKind::url: return "url";
    case ValueKind::url_list: return "url_list";
    case ValueKind::boolean: return "boolean";
    case ValueKind::object_list: return "object_list";
    }
    return "text";
}

FieldSchema FieldSchema::standard() {
    FieldSchema schema;
    schema.fields = {
        {"name", ValueKind::text, {}, "refused by desktop browsers above 1000 characters"},
        {"short_name", ValueKind::text, {}, ""},
        {"id", ValueKind::url, {}, "best practice is /"},
        {"start_url", ValueKind::url, {}, "must stay on the document origin"},
        {"scope", ValueKind::url, {}, "prefix match; should end in /"},
        {"display",
         ValueKind::text,
         {"browser", "minimal-ui", "standalone", "fullscreen"},
         "unknown values block installation"},
        {"theme_color", ValueKind::text, {}, ""},
        {"icons", ValueKind::url_list, {}, "src entries resolve against the manifest URL"},
        {"related_applications", ValueKind::object_list, {}, "paired with prefer_related_applications"},
        {"prefer_related_applications", ValueKind::boolean, {"true", "false"}, ""},
    };
    return schema;
}

const FieldSpec* FieldSchema::find(std::string_view name) const {
    for (const FieldSpec& spec : fields)
        if (spec.name == name)
            return &spec;
    return nullptr;
}

std::string_view operator_name(OperatorId op) {
    switch (op) {
    case OperatorId::documented_value: return "documented_value";
    case OperatorId::undocumented_value: return "undocumented_value";
    case OperatorId::unknown_field: return "unknown_field";
    case OperatorId::field_removal: return "field_removal";
    case OperatorId::empty_value: return "empty_value";
    case OperatorId::oversize_text: return "oversize_text";
    case OperatorId::script_payload: return "script_payload";
    case OperatorId::relative_path: return "relative_path";
    case OperatorId::parent_path: return "parent_path";
    case OperatorId::cross_origin_url: return "cross_origin_url";
    case OperatorId::redirect_param: return "redirect_param";
    case OperatorId::malformed_json: return "malformed_json";
    }
    return "documented_value";
}

std::optional<OperatorId> operator_from_name(std::string_view name) {
    for (int i = 0; i <= static_cast<int>(OperatorId::malformed_json); ++i) {
        auto op = static_cast<OperatorId>(i);
        if (operator_name(op) == name)
            return op;
    }
    return std::nullopt;
}

const std::vector<std::string>& xss_payloads() {
    static const std::vector<std::string> payloads = {
        "<script>alert(1)</script>",
        "\"><img src=x onerror=alert(1)>",
        "<svg onload=alert(1)>",
        "';alert(1)//",
    };
    return payloads;
}

const std::vector<std::string>& xss_url_payloads() {
    static const std::vector<std::string> payloads = {
        "javascript:alert(1)",
        "/start?q=<script>alert(1)</script>",
    };
    return payloads;
}

std::string_view xss_payload_list_version() {
    return "xss-payloads-v1";
}

std::vector<Mutant> generate_mutants(const RawManifest& base, const FieldSchema& schema,
                                     std::uint64_t seed, bool pairs) {
    Generator gen{base, schema, seed, {}};
    gen.run(pairs);
    return std::move(gen.out);
}

std::string_view outcome_name(Outcome o) {
    switch (o) {
    case Outcome::installed: return "installed";
    case Outcome::not_installable: return "not_installable";
    case Outcome::field_ignored: return "field_ignored";
    case Outcome::prompt_anomaly: return "prompt_anomaly";
    case Outcome::delayed_update: return "delayed_update";
    case Outcome::other: return "other";
    }
    return "other";
}

std::optional<Outcome> outcome_from_name(std::string_view name) {
    for (int i = 0; i <= static_cast<int>(Outcome::other); ++i) {
        auto o = static_cast<Outcome>(i);
        if (outcome_name(o) == name)
            return o;
    }
    return std::nullopt;
}

const Mutant* FuzzSession::find_mutant(std::string_view mutant_id) const {
    for (const Mutant& m : mutants)
        if (m.mutant_id == mutant_id)
            return &m;
    return nullptr;
}

FuzzSession make_session(const RawManifest& base, const FieldSchema& schema,
                         std::uint64_t seed, int interval_seconds, bool pairs) {
    FuzzSession session;
    session.seed = seed;
    session.interval_seconds = interval_seconds;
    session.base = base;
    session.mutants = generate_mutants(base, schema, seed, pairs);
    session.session_id = to_hex(fnv1a64(serialize(base) + "#" + std::to_string(seed)));
    return session;
}

namespace {

Json mutant_to_json(const Mutant& m) {
    Json mutated = Json::object();
    for (const auto& [field, value] : m.mutated_fields)
        mutated[field] = value;
    return Json{{"mutant_id", m.mutant_id},
                {"operator", std::string(operator_name(m.op))},
                {"field", m.field},
                {"parameter", m.parameter},
                {"mutated_fields", mutated},
                {"rendered", m.rendered},
                {"designated_malformed", m.designated_malformed}};
}

Mutant mutant_from_json(const Json& j) {
    Mutant m;
    m.mutant_id = j.at("mutant_id").get<std::string>();
    m.op = operator_from_name(j.at("operator").get<std::string>())
               .value_or(OperatorId::documented_value);
    m.field = j.at("field").get<std::string>();
    m.parameter = j.at("parameter").get<std::string>();
    for (auto it = j.at("mutated_fields").begin(); it != j.at("mutated_fields").end(); ++it)
        m.mutated_fields[it.key()] = it.value();
    m.rendered = j.at("rendered").get<std::string>();
    m.designated_malformed = j.value("designated_malformed", false);
    return m;
}

void append_event(const std::string& path, const std::string& type, std::int64_t ts,
                  const Json& payload) {
    std::ofstream out(path, std::ios::app);
    if (!out)
        throw SourceUnreadable("cannot append to session file: " + path);
    Json event{{"type", type}, {"timestamp", ts}, {"payload", payload}};
    out << event.dump() << "\n";
}

} // namespace

void save_session(const FuzzSession& session, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw SourceUnreadable("cannot write session file: " + path);
    std::int64_t ts = now_ms();
    Json header{{"session_id", session.session_id},
                {"seed", session.seed},
                {"interval_seconds", session.interval_seconds},
                {"base", session.base.fields},
                {"source_url", session.base.source_url.to_string()},
                {"document_url", session.base.document_url.to_string()}};
    out << Json{{"type", "session"}, {"timestamp", ts}, {"payload", header}}.dump() << "\n";
    for (const Mutant& m : session.mutants)
        out << Json{{"type", "mutant"}, {"timestamp", ts}, {"payload", mutant_to_json(m)}}.dump()
            << "\n";
    for (const ServeEvent& e : session.serve_log)
        out << Json{{"type", "serve"},
                    {"timestamp", e.timestamp_ms},
                    {"payload", {{"mutant_id", e.mutant_id}}}}
                   .dump()
            << "\n";
    for (const Observation& o : session.observations)
        out << Json{{"type", "observation"},
                    {"timestamp", o.timestamp_ms},
                    {"payload",
                     {{"mutant_id", o.mutant_id},
                      {"outcome", std::string(outcome_name(o.outcome))},
                      {"note", o.note}}}}
                   .dump()
            << "\n";
}

FuzzSession load_session(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw SourceUnreadable("cannot open session file: " + path);
    FuzzSession session;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        Json event = Json::parse(line, nullptr, false);
        if (event.is_discarded() || !event.is_object())
            continue;
        std::string type = event.value("type", "");
        const Json& payload = event.at("payload");
        if (type == "session") {
            session.session_id = payload.at("session_id").get<std::string>();
            session.seed = payload.at("seed").get<std::uint64_t>();
            session.interval_seconds = payload.at("interval_seconds").get<int>();
            session.base.fields = payload.at("base");
            session.base.source_url =
                AbsoluteUrl::parse(payload.at("source_url").get<std::string>());
            session.base.document_url =
                AbsoluteUrl::parse(payload.at("document_url").get<std::string>());
        } else if (type == "mutant") {
            session.mutants.push_back(mutant_from_json(payload));
        } else if (type == "serve") {
            session.serve_log.push_back(
                {event.at("timestamp").get<std::int64_t>(),
                 payload.at("mutant_id").get<std::string>()});
        } else if (type == "observation") {
            Observation o;
            o.timestamp_ms = event.at("timestamp").get<std::int64_t>();
            o.mutant_id = payload.at("mutant_id").get<std::string>();
            o.outcome = outcome_from_name(payload.at("outcome").get<std::string>())
                            .value_or(Outcome::other);
            o.note = payload.value("note", "");
            session.observations.push_back(std::move(o));
        }
    }
    return session;
}

void append_serve_event(const std::string& path, const ServeEvent& event) {
    append_event(path, "serve", event.timestamp_ms, Json{{"mutant_id", event.mutant_id}});
}

void append_observation_event(const std::string& path, const Observation& obs) {
    append_event(path, "observation", obs.timestamp_ms,
                 Json{{"mutant_id", obs.mutant_id},
                      {"outcome", std::string(outcome_name(obs.outcome))},
                      {"note", obs.note}});
}

void record_observation(FuzzSession& session, std::string_view mutant_id, Outcome outcome,
                        std::string_view note, const std::string& store_path) {
    if (!session.find_mutant(mutant_id))
        throw UnknownMutant("mutant '" + std::string(mutant_id) + "' is not in this session");
    Observation obs;
    obs.timestamp_ms = now_ms();
    obs.mutant_id = std::string(mutant_id);
    obs.outcome = outcome;
    obs.note = std::string(note);
    session.observations.push_back(obs);
    if (!store_path.empty())
        append_observation_event(store_path, obs);
}

std::vector<MutantReport> session_report(const FuzzSession& session) {
    std::vector<MutantReport> out;
    out.reserve(session.mutants.size());
    for (const Mutant& m : session.mutants) {
        MutantReport r;
        r.mutant_id = m.mutant_id;
        r.op = m.op;
        r.field = m.field;
        r.parameter = m.parameter;
        out.push_back(std::move(r));
    }
    auto row = [&out](const std::string& id) -> MutantReport* {
        for (MutantReport& r : out)
            if (r.mutant_id == id)
                return &r;
        return nullptr;
    };
    for (const ServeEvent& e : session.serve_log)
        if (MutantReport* r = row(e.mutant_id))
            ++r->serve_count;
    for (const Observation& o : session.observations) {
        if (MutantReport* r = row(o.mutant_id)) {
            ++r->outcomes[o.outcome];
            r->unobserved = false;
        }
    }
    return out;
}

Json session_report_to_json(const FuzzSession& session) {
    Json rows = Json::array();
    for (const MutantReport& r : session_report(session)) {
        Json outcomes = Json::object();
        for (const auto& [outcome, count] : r.outcomes)
            outcomes[std::string(outcome_name(outcome))] = count;
        rows.push_back({{"mutant_id", r.mutant_id},
                        {"operator", std::string(operator_name(r.op))},
                        {"field", r.field},
                        {"parameter", r.parameter},
                        {"serve_count", r.serve_count},
                        {"outcomes", outcomes},
                        {"unobserved", r.unobserved}});
    }
    return Json{{"session_id", session.session_id},
                {"seed", session.seed},
                {"interval_seconds", session.interval_seconds},
                {"mutant_count", session.mutants.size()},
                {"mutants", rows}};
}

} // namespace pwaudit
