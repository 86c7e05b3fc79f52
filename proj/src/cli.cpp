#include "pwaudit/cli.hpp"

#include "pwaudit/catalog.hpp"
#include "pwaudit/corpus.hpp"
#include "pwaudit/errors.hpp"
#include "pwaudit/fuzz.hpp"
#include "pwaudit/fuzz_server.hpp"
#include "pwaudit/lint.hpp"
#include "pwaudit/probes.hpp"
#include "pwaudit/sw_cache.hpp"
#include "pwaudit/text.hpp"
#include "pwaudit/version.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace pwaudit {

namespace {

constexpr int kExitClean = 0;
constexpr int kExitFindings = 1;
constexpr int kExitInputError = 2;
constexpr int kExitInternalError = 3;

struct GlobalOptions {
    std::string format = "text";
    std::string severity_threshold = "info";
    int timeout_seconds = 15;
    std::string user_agent = "pwaudit/0.1";
    std::string proxy;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw SourceUnreadable("cannot read " + path);
    std::stringstream body;
    body << in.rdbuf();
    return body.str();
}

ProbeOptions probe_options(const GlobalOptions& global) {
    ProbeOptions options;
    options.timeout_seconds = global.timeout_seconds;
    options.user_agent = global.user_agent;
    std::string proxy = global.proxy;
    if (proxy.empty()) {
        if (const char* env = std::getenv("HTTP_PROXY"))
            proxy = env;
        else if (const char* env2 = std::getenv("http_proxy"))
            proxy = env2;
    }
    if (!proxy.empty()) {
        if (auto url = AbsoluteUrl::try_parse(proxy)) {
            options.proxy_host = url->host;
            options.proxy_port = url->port;
        }
    }
    return options;
}

void emit(const GlobalOptions& global, std::ostream& out, const Json& json,
          const std::string& text) {
    if (global.format == "json")
        out << json.dump(2) << "\n";
    else
        out << text;
}

Json versioned(Json j) {
    Json out;
    out["schema_version"] = kSchemaVersion;
    out["tool_version"] = kToolVersion;
    for (auto it = j.begin(); it != j.end(); ++it)
        out[it.key()] = it.value();
    return out;
}

bool meets_threshold(Severity severity, Severity threshold) {
    return static_cast<int>(severity) >= static_cast<int>(threshold);
}

struct LintedFile {
    std::string path;
    bool input_error = false;
    std::string error_message;
    LintReport report;
};

LintedFile lint_one_file(const std::string& path, const AbsoluteUrl& document_url,
                         const CorpusIndex* corpus, bool has_sw, InstallMode mode) {
    LintedFile result;
    result.path = path;
    result.report.document_url = document_url.to_string();

    std::string body;
    try {
        body = read_file(path);
    } catch (const SourceUnreadable& e) {
        result.input_error = true;
        result.error_message = e.what();
        return result;
    }

    AbsoluteUrl source_url = document_url;
    try {
        source_url = resolve(document_url, std::filesystem::path(path).filename().string());
    } catch (const Error&) {
    }
    result.report.manifest_url = source_url.to_string();

    try {
        RawManifest raw = parse_manifest(body, source_url, document_url);
        Manifest manifest = normalize(raw);
        result.report.findings = lint(manifest, raw, corpus);
        bool secure = document_url.scheme == "https" || document_url.is_loopback();
        result.report.installability = check_installable(manifest, has_sw, secure, mode);
        result.report.parse_notes = manifest.parse_notes;
        if (is_placeholder_document(document_url))
            downgrade_origin_findings_for_placeholder(result.report);
    } catch (const MalformedJson& e) {
        result.input_error = true;
        result.error_message = e.what();
        result.report.findings.push_back(
            make_finding(RuleId::syn_json_malformed, "", e.what()));
    }
    return result;
}

int cmd_lint(const GlobalOptions& global, const std::vector<std::string>& paths,
             const std::string& url_text, const std::string& corpus_path,
             const std::string& corpus_format, bool has_sw, const std::string& mode_name,
             std::ostream& out, std::ostream& err) {
    auto document_url = AbsoluteUrl::try_parse(url_text);
    if (!document_url) {
        err << "invalid --url: " << url_text << "\n";
        return kExitInputError;
    }
    auto mode = install_mode_from_name(mode_name);
    if (!mode) {
        err << "invalid --mode: " << mode_name << "\n";
        return kExitInputError;
    }
    auto threshold = severity_from_name(global.severity_threshold);
    if (!threshold) {
        err << "invalid --severity-threshold: " << global.severity_threshold << "\n";
        return kExitInputError;
    }

    std::optional<CorpusIndex> corpus;
    if (!corpus_path.empty()) {
        try {
            corpus = ingest(corpus_path, corpus_format == "directory"
                                             ? CorpusFormat::directory
                                             : CorpusFormat::jsonl);
        } catch (const SourceUnreadable& e) {
            err << e.what() << "\n";
            return kExitInputError;
        }
    }

    std::vector<LintedFile> results;
    for (const std::string& path : paths)
        results.push_back(lint_one_file(path, *document_url,
                                        corpus ? &*corpus : nullptr, has_sw, *mode));
    std::sort(results.begin(), results.end(),
              [](const LintedFile& a, const LintedFile& b) { return a.path < b.path; });

    bool any_input_error = false;
    bool any_at_threshold = false;
    std::map<std::string, std::size_t> histogram;
    for (const LintedFile& r : results) {
        if (r.input_error)
            any_input_error = true;
        for (const Finding& f : r.report.findings) {
            ++histogram[std::string(rule_info(f.rule).code)];
            if (meets_threshold(f.severity, *threshold))
                any_at_threshold = true;
        }
    }

    if (results.size() == 1 && !results[0].input_error) {
        emit(global, out, versioned(report_to_json(results[0].report)),
             report_to_text(results[0].report));
    } else {
        Json entries = Json::array();
        std::ostringstream text;
        for (const LintedFile& r : results) {
            Json entry;
            entry["path"] = r.path;
            if (r.input_error) {
                entry["error"] = r.error_message;
                text << r.path << ": error: " << r.error_message << "\n";
            } else {
                entry["report"] = report_to_json(r.report);
                text << r.path << ":\n" << report_to_text(r.report) << "\n";
            }
            entries.push_back(entry);
        }
        Json hist = Json::object();
        for (const auto& [rule, count] : histogram)
            hist[rule] = count;
        text << "findings by rule:\n";
        for (const auto& [rule, count] : histogram)
            text << "  " << rule << ": " << count << "\n";
        emit(global, out, versioned(Json{{"entries", entries}, {"histogram", hist}}),
             text.str());
    }

    if (any_input_error)
        return kExitInputError;
    return any_at_threshold ? kExitFindings : kExitClean;
}

int cmd_validate(const GlobalOptions& global, const std::string& path,
                 const std::string& url_text, bool has_sw, bool assume_insecure,
                 const std::string& mode_name, std::ostream& out, std::ostream& err) {
    auto document_url = AbsoluteUrl::try_parse(url_text);
    if (!document_url) {
        err << "invalid --url: " << url_text << "\n";
        return kExitInputError;
    }
    auto mode = install_mode_from_name(mode_name);
    if (!mode) {
        err << "invalid --mode: " << mode_name << "\n";
        return kExitInputError;
    }

    std::string body;
    try {
        body = read_file(path);
    } catch (const SourceUnreadable& e) {
        err << e.what() << "\n";
        return kExitInputError;
    }

    ManifestPresence presence = ManifestPresence::present;
    std::optional<InstallabilityReport> report;
    try {
        RawManifest raw = parse_manifest(body, *document_url, *document_url);
        Manifest manifest = normalize(raw);
        bool secure = !assume_insecure &&
                      (document_url->scheme == "https" || document_url->is_loopback());
        report = check_installable(manifest, has_sw, secure, *mode);
    } catch (const MalformedJson&) {
        presence = ManifestPresence::malformed;
    }
    SiteClass site = classify_site(presence, report, has_sw);

    Json j = versioned(Json{{"classification", std::string(site_class_name(site))}});
    std::ostringstream text;
    if (report) {
        j["installability"] = {{"installable", report->installable},
                               {"mode", std::string(install_mode_name(report->mode))},
                               {"missing", report->missing},
                               {"notes", report->notes}};
        text << "installable (" << install_mode_name(report->mode)
             << "): " << (report->installable ? "yes" : "no") << "\n";
        if (!report->missing.empty()) {
            text << "missing:";
            for (const std::string& m : report->missing)
                text << " " << m;
            text << "\n";
        }
        for (const std::string& n : report->notes)
            text << "note: " << n << "\n";
    } else {
        j["installability"] = nullptr;
        text << "manifest is malformed\n";
    }
    text << "classification: " << site_class_name(site) << "\n";
    emit(global, out, j, text.str());

    if (presence == ManifestPresence::malformed)
        return kExitInputError;
    return report && report->installable ? kExitClean : kExitFindings;
}

int cmd_corpus(const GlobalOptions& global, const std::string& action,
               const std::string& path, const std::string& format_name,
               const std::string& field_name, bool csv, std::ostream& out,
               std::ostream& err) {
    CorpusFormat format = format_name == "directory" ? CorpusFormat::directory
                                                     : CorpusFormat::jsonl;
    CorpusIndex index;
    try {
        index = ingest(path, format);
    } catch (const SourceUnreadable& e) {
        err << e.what() << "\n";
        return kExitInputError;
    }

    if (action == "ingest") {
        Json j = versioned(Json{{"entry_count", index.entry_count()},
                                {"skipped", index.skipped_count()},
                                {"deduplicated", index.dedup_count()}});
        std::ostringstream text;
        text << "entries: " << index.entry_count() << " skipped: " << index.skipped_count()
             << " deduplicated: " << index.dedup_count() << "\n";
        emit(global, out, j, text.str());
        return kExitClean;
    }
    if (action == "stats") {
        Json j = versioned(stats_to_json(index));
        emit(global, out, j, j.dump(2) + "\n");
        return kExitClean;
    }
    if (action == "dups") {
        auto rows = duplicate_names(index);
        DuplicateSummary summary = duplicate_summary(index);
        Json names = Json::array();
        std::ostringstream text;
        for (const auto& [name, count] : rows) {
            names.push_back({{"name", name}, {"count", count}});
            text << count << "\t" << name << "\n";
        }
        text << "unique duplicate names: " << summary.unique_duplicate_names
             << ", affected entries: " << summary.affected_entries
             << ", empty names: " << summary.empty_names << "\n";
        Json j = versioned(Json{{"duplicate_names", names},
                                {"summary",
                                 {{"unique_duplicate_names", summary.unique_duplicate_names},
                                  {"affected_entries", summary.affected_entries},
                                  {"empty_names", summary.empty_names}}}});
        emit(global, out, j, text.str());
        return kExitClean;
    }
    if (action == "freq") {
        FrequencyField field = FrequencyField::name;
        if (field_name == "start_url")
            field = FrequencyField::start_url_raw;
        else if (field_name == "scope")
            field = FrequencyField::scope_raw;
        else if (field_name == "id")
            field = FrequencyField::id;
        else if (field_name != "name") {
            err << "invalid --field: " << field_name << "\n";
            return kExitInputError;
        }
        auto rows = frequency_table(index, field);
        if (csv) {
            out << frequency_to_csv(rows);
            return kExitClean;
        }
        Json table = Json::array();
        std::ostringstream text;
        for (const auto& [token, count] : rows) {
            table.push_back({{"token", token}, {"count", count}});
            text << count << "\t" << token << "\n";
        }
        emit(global, out, versioned(Json{{"field", field_name}, {"table", table}}),
             text.str());
        return kExitClean;
    }
    err << "unknown corpus action\n";
    return kExitInputError;
}

volatile std::sig_atomic_t g_interrupted = 0;

int cmd_fuzz_serve(const std::string& session_path, const std::string& bind,
                   int interval_override, std::ostream& out, std::ostream& err) {
    FuzzSession session = load_session(session_path);
    if (session.mutants.empty()) {
        err << "session has no mutants\n";
        return kExitInputError;
    }
    if (interval_override > 0)
        session.interval_seconds = interval_override;

    std::string host = "127.0.0.1";
    int port = 8321;
    std::size_t colon = bind.rfind(':');
    if (colon != std::string::npos) {
        host = bind.substr(0, colon);
        port = std::atoi(bind.c_str() + colon + 1);
    }

    FuzzServer server(std::move(session), session_path);
    try {
        server.start(host, port);
    } catch (const BindFailure& e) {
        err << e.what() << "\n";
        return kExitInputError;
    }
    out << "serving on http://" << host << ":" << server.port() << "/ ("
        << server.session().mutants.size() << " mutants, advancing every "
        << server.session().interval_seconds << "s); Ctrl-C stops\n"
        << std::flush;

    std::signal(SIGINT, [](int) { g_interrupted = 1; });
    while (!g_interrupted)
        std::this_thread::sleep_for(std::chrono::milliseconds(200));
    server.stop();
    return kExitClean;
}

int cmd_sw_classify(const GlobalOptions& global, const std::string& target,
                    std::ostream& out, std::ostream& err) {
    std::string source;
    if (starts_with(target, "http://") || starts_with(target, "https://")) {
        try {
            AbsoluteUrl url = AbsoluteUrl::parse(target);
            httplib::Client client(url.scheme + "://" + url.host + ":" +
                                   std::to_string(url.port));
            client.set_connection_timeout(global.timeout_seconds, 0);
            client.set_read_timeout(global.timeout_seconds, 0);
            auto result = client.Get(url.path + (url.query ? "?" + *url.query : ""));
            if (!result || result->status >= 400) {
                err << "cannot fetch " << target << "\n";
                return kExitInputError;
            }
            source = result->body;
        } catch (const Error& e) {
            err << e.what() << "\n";
            return kExitInputError;
        }
    } else {
        try {
            source = read_file(target);
        } catch (const SourceUnreadable& e) {
            err << e.what() << "\n";
            return kExitInputError;
        }
    }

    SwClassification c = classify_sw(source);
    Json j = versioned(sw_classification_to_json(c));
    std::ostringstream text;
    text << "strategy: " << cache_strategy_name(c.strategy)
         << " (confidence: " << sw_confidence_name(c.confidence) << ")\n";
    for (const SwEvidence& e : c.evidence)
        text << "  " << e.pattern << " at line " << e.line_begin << "\n";
    if (auto finding = cache_only_risk(c)) {
        text << "warning " << rule_info(finding->rule).code << ": " << finding->message
             << "\n";
        j["finding"] = finding_to_json(*finding);
    }
    emit(global, out, j, text.str());
    return c.strategy == CacheStrategy::cache_only ? kExitFindings : kExitClean;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"PWA manifest security analysis toolkit"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--format", global.format, "Output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
    app.add_option("--severity-threshold", global.severity_threshold,
                   "Exit 1 when findings at or above this severity exist")
        ->check(CLI::IsMember({"info", "warning", "error"}));
    app.add_option("--timeout", global.timeout_seconds, "Network timeout in seconds");
    app.add_option("--user-agent", global.user_agent, "User-Agent header for probes");
    app.add_option("--proxy", global.proxy, "HTTP proxy URL (or set HTTP_PROXY)");

    // lint
    auto* lint_cmd = app.add_subcommand("lint", "Lint one or more manifest files");
    std::vector<std::string> lint_paths;
    std::string lint_url = kPlaceholderDocumentUrl;
    std::string lint_corpus;
    std::string lint_corpus_format = "jsonl";
    bool lint_has_sw = false;
    std::string lint_mode = "chrome_lenient";
    lint_cmd->add_option("paths", lint_paths, "Manifest files")->required();
    lint_cmd->add_option("--url", lint_url, "Document URL the manifest is linked from");
    lint_cmd->add_option("--corpus", lint_corpus, "Corpus for duplicate checks");
    lint_cmd->add_option("--corpus-format", lint_corpus_format, "jsonl or directory")
        ->check(CLI::IsMember({"jsonl", "directory"}));
    lint_cmd->add_flag("--service-worker", lint_has_sw, "Assume a service worker exists");
    lint_cmd->add_option("--mode", lint_mode, "strict_w3c or chrome_lenient")
        ->check(CLI::IsMember({"strict_w3c", "chrome_lenient"}));

    // validate
    auto* validate_cmd = app.add_subcommand("validate", "Installability judgement");
    std::string validate_path;
    std::string validate_url = kPlaceholderDocumentUrl;
    bool validate_has_sw = false;
    bool validate_insecure = false;
    std::string validate_mode = "chrome_lenient";
    validate_cmd->add_option("path", validate_path, "Manifest file")->required();
    validate_cmd->add_option("--url", validate_url, "Document URL");
    validate_cmd->add_flag("--service-worker", validate_has_sw, "Assume a service worker");
    validate_cmd->add_flag("--insecure", validate_insecure,
                           "Treat the context as not secure");
    validate_cmd->add_option("--mode", validate_mode, "strict_w3c or chrome_lenient")
        ->check(CLI::IsMember({"strict_w3c", "chrome_lenient"}));

    // corpus
    auto* corpus_cmd = app.add_subcommand("corpus", "Corpus ingestion and statistics");
    std::string corpus_action;
    std::string corpus_path;
    std::string corpus_format = "jsonl";
    std::string corpus_field = "name";
    bool corpus_csv = false;
    corpus_cmd->add_option("action", corpus_action, "ingest | stats | dups | freq")
        ->required()
        ->check(CLI::IsMember({"ingest", "stats", "dups", "freq"}));
    corpus_cmd->add_option("path", corpus_path, "Corpus file or directory")->required();
    corpus_cmd->add_option("--corpus-format", corpus_format, "jsonl or directory")
        ->check(CLI::IsMember({"jsonl", "directory"}));
    corpus_cmd->add_option("--field", corpus_field, "freq field: name|start_url|scope|id");
    corpus_cmd->add_flag("--csv", corpus_csv, "Emit CSV (freq only)");

    // fuzz
    auto* fuzz_cmd = app.add_subcommand("fuzz", "Manifest mutation harness");
    fuzz_cmd->require_subcommand(1);
    auto* fuzz_gen = fuzz_cmd->add_subcommand("gen", "Generate a mutant plan");
    std::string fuzz_base;
    std::string fuzz_url = "http://127.0.0.1:8321/";
    std::uint64_t fuzz_seed = 1;
    int fuzz_interval = 60;
    bool fuzz_pairs = false;
    std::string fuzz_out_path = "fuzz-session.jsonl";
    fuzz_gen->add_option("base", fuzz_base, "Base manifest file")->required();
    fuzz_gen->add_option("--url", fuzz_url, "Document URL the harness will use");
    fuzz_gen->add_option("--seed", fuzz_seed, "Deterministic seed");
    fuzz_gen->add_option("--interval", fuzz_interval, "Rotation interval in seconds");
    fuzz_gen->add_flag("--pairs", fuzz_pairs, "Also compose two-operator mutants");
    fuzz_gen->add_option("--out", fuzz_out_path, "Session file to write");

    auto* fuzz_serve = fuzz_cmd->add_subcommand("serve", "Serve a session");
    std::string fuzz_session_path;
    std::string fuzz_bind = "127.0.0.1:8321";
    int fuzz_serve_interval = 0;
    fuzz_serve->add_option("session", fuzz_session_path, "Session file")->required();
    fuzz_serve->add_option("--bind", fuzz_bind, "host:port to bind");
    fuzz_serve->add_option("--interval", fuzz_serve_interval,
                           "Override the rotation interval");

    auto* fuzz_record = fuzz_cmd->add_subcommand("record", "Record an observation");
    std::string record_session, record_mutant, record_outcome, record_note;
    fuzz_record->add_option("session", record_session, "Session file")->required();
    fuzz_record->add_option("mutant", record_mutant, "Mutant id")->required();
    fuzz_record
        ->add_option("outcome", record_outcome,
                     "installed | not_installable | field_ignored | prompt_anomaly | "
                     "delayed_update | other")
        ->required();
    fuzz_record->add_option("--note", record_note, "Free-form note");

    auto* fuzz_report = fuzz_cmd->add_subcommand("report", "Summarize a session");
    std::string report_session;
    fuzz_report->add_option("session", report_session, "Session file")->required();

    // sw
    auto* sw_cmd = app.add_subcommand("sw", "Service worker analysis");
    sw_cmd->require_subcommand(1);
    auto* sw_classify_cmd = sw_cmd->add_subcommand("classify", "Classify cache strategy");
    std::string sw_target;
    sw_classify_cmd->add_option("target", sw_target, "Script file or URL")->required();

    // probe
    auto* probe_cmd = app.add_subcommand("probe", "Network probes");
    probe_cmd->require_subcommand(1);
    auto* probe_discover = probe_cmd->add_subcommand("discover", "Find the manifest link");
    std::string discover_url;
    probe_discover->add_option("url", discover_url, "Page URL")->required();
    auto* probe_redirects = probe_cmd->add_subcommand("redirects", "Follow redirects");
    std::string redirects_url;
    int redirects_max_hops = 10;
    probe_redirects->add_option("url", redirects_url, "URL to probe")->required();
    probe_redirects->add_option("--max-hops", redirects_max_hops, "Maximum hops");
    auto* probe_frames = probe_cmd->add_subcommand("frames", "Framing protection check");
    std::string frames_url;
    probe_frames->add_option("url", frames_url, "URL to probe")->required();
    auto* probe_watch = probe_cmd->add_subcommand("watch", "Watch a manifest for updates");
    std::string watch_url;
    std::string watch_store = ".pwaudit-watch";
    int watch_interval = 60;
    int watch_polls = 0;
    probe_watch->add_option("url", watch_url, "Manifest URL")->required();
    probe_watch->add_option("--store", watch_store, "Baseline store directory");
    probe_watch->add_option("--interval", watch_interval, "Poll interval in seconds");
    probe_watch->add_option("--polls", watch_polls, "Stop after N polls (0 = forever)");

    // catalog
    auto* catalog_cmd = app.add_subcommand("catalog", "Risk catalog queries");
    catalog_cmd->require_subcommand(1);
    auto* catalog_tally = catalog_cmd->add_subcommand("tally", "CIA risk tally");
    auto* catalog_list = catalog_cmd->add_subcommand("list", "List catalog rows");
    auto* catalog_support = catalog_cmd->add_subcommand("support", "Browser/OS support");
    std::string support_browser, support_os;
    catalog_support->add_option("browser", support_browser, "Browser name")->required();
    catalog_support->add_option("os", support_os, "OS name")->required();
    auto* catalog_uninstall = catalog_cmd->add_subcommand("uninstall", "Uninstall guidance");
    std::string uninstall_browser, uninstall_os;
    catalog_uninstall->add_option("browser", uninstall_browser, "Browser name")->required();
    catalog_uninstall->add_option("os", uninstall_os, "OS name")->required();

    std::vector<std::string> argv = args;
    try {
        std::vector<const char*> c_args;
        c_args.push_back("pwaudit");
        for (const std::string& a : argv)
            c_args.push_back(a.c_str());
        app.parse(static_cast<int>(c_args.size()), c_args.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitClean;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        err << app.help();
        return kExitInputError;
    }

    try {
        if (*lint_cmd)
            return cmd_lint(global, lint_paths, lint_url, lint_corpus, lint_corpus_format,
                            lint_has_sw, lint_mode, out, err);
        if (*validate_cmd)
            return cmd_validate(global, validate_path, validate_url, validate_has_sw,
                                validate_insecure, validate_mode, out, err);
        if (*corpus_cmd)
            return cmd_corpus(global, corpus_action, corpus_path, corpus_format,
                              corpus_field, corpus_csv, out, err);
        if (*fuzz_gen) {
            std::string body;
            try {
                body = read_file(fuzz_base);
            } catch (const SourceUnreadable& e) {
                err << e.what() << "\n";
                return kExitInputError;
            }
            auto doc = AbsoluteUrl::try_parse(fuzz_url);
            if (!doc) {
                err << "invalid --url: " << fuzz_url << "\n";
                return kExitInputError;
            }
            RawManifest base;
            try {
                base = parse_manifest(body, resolve(*doc, "manifest.json"), *doc);
            } catch (const MalformedJson& e) {
                err << e.what() << "\n";
                return kExitInputError;
            }
            FuzzSession session = make_session(base, FieldSchema::standard(), fuzz_seed,
                                               fuzz_interval, fuzz_pairs);
            save_session(session, fuzz_out_path);
            Json j = versioned(Json{{"session_id", session.session_id},
                                    {"seed", session.seed},
                                    {"mutants", session.mutants.size()},
                                    {"session_file", fuzz_out_path}});
            std::ostringstream text;
            text << "session " << session.session_id << ": " << session.mutants.size()
                 << " mutants -> " << fuzz_out_path << "\n";
            emit(global, out, j, text.str());
            return kExitClean;
        }
        if (*fuzz_serve)
            return cmd_fuzz_serve(fuzz_session_path, fuzz_bind, fuzz_serve_interval, out,
                                  err);
        if (*fuzz_record) {
            FuzzSession session = load_session(record_session);
            auto outcome = outcome_from_name(record_outcome);
            if (!outcome) {
                err << "invalid outcome: " << record_outcome << "\n";
                return kExitInputError;
            }
            try {
                record_observation(session, record_mutant, *outcome, record_note,
                                   record_session);
            } catch (const UnknownMutant& e) {
                err << e.what() << "\n";
                return kExitInputError;
            }
            out << "recorded " << record_mutant << " -> " << record_outcome << "\n";
            return kExitClean;
        }
        if (*fuzz_report) {
            FuzzSession session = load_session(report_session);
            Json j = versioned(session_report_to_json(session));
            std::ostringstream text;
            for (const MutantReport& r : session_report(session)) {
                text << r.mutant_id << " " << operator_name(r.op)
                     << (r.field.empty() ? "" : " " + r.field) << " serves=" << r.serve_count;
                if (r.unobserved) {
                    text << " unobserved";
                } else {
                    for (const auto& [o, count] : r.outcomes)
                        text << " " << outcome_name(o) << "=" << count;
                }
                text << "\n";
            }
            emit(global, out, j, text.str());
            return kExitClean;
        }
        if (*sw_classify_cmd)
            return cmd_sw_classify(global, sw_target, out, err);
        if (*probe_discover) {
            auto url = AbsoluteUrl::try_parse(discover_url);
            if (!url) {
                err << "invalid URL: " << discover_url << "\n";
                return kExitInputError;
            }
            AbsoluteUrl manifest_url = discover_manifest(*url, probe_options(global));
            emit(global, out, versioned(Json{{"manifest_url", manifest_url.to_string()}}),
                 manifest_url.to_string() + "\n");
            return kExitClean;
        }
        if (*probe_redirects) {
            auto url = AbsoluteUrl::try_parse(redirects_url);
            if (!url) {
                err << "invalid URL: " << redirects_url << "\n";
                return kExitInputError;
            }
            RedirectReport report = redirect_probe(*url, redirects_max_hops,
                                                   probe_options(global));
            std::ostringstream text;
            for (std::size_t i = 0; i < report.chain.size(); ++i) {
                const RedirectHop& hop = report.chain[i];
                text << i << ": " << hop.url.to_string();
                if (hop.mechanism)
                    text << " via " << redirect_mechanism_name(*hop.mechanism);
                if (hop.status)
                    text << " (" << *hop.status << ")";
                if (std::find(report.cross_origin_hops.begin(),
                              report.cross_origin_hops.end(),
                              i) != report.cross_origin_hops.end())
                    text << " [cross-origin]";
                text << "\n";
            }
            for (const auto& [name, value] : report.suspicious_params)
                text << "suspicious param: " << name << "=" << value << "\n";
            if (report.truncated)
                text << "chain truncated\n";
            emit(global, out, versioned(redirect_report_to_json(report)), text.str());
            return report.cross_origin_hops.empty() && report.suspicious_params.empty()
                       ? kExitClean
                       : kExitFindings;
        }
        if (*probe_frames) {
            auto url = AbsoluteUrl::try_parse(frames_url);
            if (!url) {
                err << "invalid URL: " << frames_url << "\n";
                return kExitInputError;
            }
            FrameReport report = frame_protection_probe(*url, probe_options(global));
            std::ostringstream text;
            text << "frameable: " << (report.frameable ? "yes" : "no") << "\n";
            if (report.x_frame_options)
                text << "x-frame-options: " << *report.x_frame_options << "\n";
            if (report.csp_frame_ancestors)
                text << "frame-ancestors: " << *report.csp_frame_ancestors << "\n";
            emit(global, out, versioned(frame_report_to_json(report)), text.str());
            return report.frameable ? kExitFindings : kExitClean;
        }
        if (*probe_watch) {
            auto url = AbsoluteUrl::try_parse(watch_url);
            if (!url) {
                err << "invalid URL: " << watch_url << "\n";
                return kExitInputError;
            }
            ManifestWatcher watcher(*url, watch_store, probe_options(global));
            int polls_done = 0;
            while (watch_polls == 0 || polls_done < watch_polls) {
                auto diff = watcher.poll_once();
                ++polls_done;
                if (diff) {
                    emit(global, out, versioned(update_diff_to_json(*diff)),
                         update_diff_to_json(*diff).dump(2) + "\n");
                    out << std::flush;
                }
                if (watch_polls != 0 && polls_done >= watch_polls)
                    break;
                std::this_thread::sleep_for(std::chrono::seconds(watch_interval));
            }
            err << "poll misses: " << watcher.poll_misses() << "\n";
            return kExitClean;
        }
        if (*catalog_tally) {
            CiaTally tally = cia_tally(load_catalog());
            std::ostringstream text;
            text << "C: " << tally.c << "\nI: " << tally.i << "\nA: " << tally.a
                 << "\ntotal: " << tally.total << "\n";
            emit(global, out, versioned(tally_to_json(tally)), text.str());
            return kExitClean;
        }
        if (*catalog_list) {
            auto catalog = load_catalog();
            std::ostringstream text;
            for (const ViolationRecord& rec : catalog)
                text << rec.cia << " " << rec.browser_count << "\t"
                     << phase_name(rec.phase) << "\t" << rec.risk_name << "\n";
            emit(global, out, versioned(Json{{"catalog", catalog_to_json(catalog)}}),
                 text.str());
            return kExitClean;
        }
        if (*catalog_support || *catalog_uninstall) {
            const std::string& browser_text =
                *catalog_support ? support_browser : uninstall_browser;
            const std::string& os_text = *catalog_support ? support_os : uninstall_os;
            auto browser = browser_from_name(browser_text);
            auto os = os_from_name(os_text);
            if (!browser || !os) {
                err << "unknown browser/os pair: " << browser_text << " " << os_text
                    << "\n";
                return kExitInputError;
            }
            if (*catalog_support) {
                BrowserProfile profile = browser_support(*browser, *os);
                std::ostringstream text;
                text << browser_name(profile.browser) << " on " << os_name(profile.os)
                     << " (" << platform_name(profile.platform) << ")\n"
                     << "install: " << install_support_name(profile.install_support) << "\n"
                     << "profiles: " << profile_support_name(profile.profile_support)
                     << "\n";
                emit(global, out, versioned(profile_to_json(profile)), text.str());
            } else {
                UninstallGuide guide = uninstall_guide(*browser, *os);
                std::ostringstream text;
                text << "uninstalling a PWA in " << browser_name(guide.browser) << " on "
                     << os_name(guide.os) << ":\n";
                int step = 1;
                for (const std::string& s : guide.steps)
                    text << "  " << step++ << ". " << s << "\n";
                text << "  fallback: " << guide.fallback << "\n";
                emit(global, out, versioned(guide_to_json(guide)), text.str());
            }
            return kExitClean;
        }
    } catch (const FetchFailure& e) {
        err << e.what() << "\n";
        return kExitInputError;
    } catch (const NoManifestLink& e) {
        err << e.what() << "\n";
        return kExitFindings;
    } catch (const SourceUnreadable& e) {
        err << e.what() << "\n";
        return kExitInputError;
    } catch (const Error& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternalError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternalError;
    }
    err << app.help();
    return kExitInputError;
}

} // namespace pwaudit
