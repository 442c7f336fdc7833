// deckctl: offline validation, conflict reports, jargon checks, repository
// maintenance, and the HTTP service entry point.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <pthread.h>

#include "CLI11.hpp"

#include "deckcraft/constraints.hpp"
#include "deckcraft/deck_json.hpp"
#include "deckcraft/jargon.hpp"
#include "deckcraft/llm_provider.hpp"
#include "deckcraft/mock_provider.hpp"
#include "deckcraft/repository.hpp"
#include "deckcraft/service.hpp"

using namespace deckcraft;

namespace {

enum Exit { kOk = 0, kDomain = 1, kMalformed = 2, kProvider = 3 };

int exit_code_for(Errc code) {
    switch (code) {
    case Errc::malformed_document:
    case Errc::unsupported_schema_version:
    case Errc::bad_request: return kMalformed;
    case Errc::provider_error: return kProvider;
    default: return kDomain;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::malformed_document, "cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string clock_text(Seconds s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld:%02lld", static_cast<long long>(s.count() / 60),
                  static_cast<long long>(s.count() % 60));
    return buf;
}

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

int cmd_validate(const std::string& path) {
    Deck deck = parse_deck(read_file(path));
    auto violations = validate(deck);
    for (const auto& v : violations) std::cout << v.pointer << ": " << v.message << "\n";
    if (!violations.empty()) return kDomain;
    std::cout << "ok\n";
    return kOk;
}

int cmd_conflicts(const std::string& path, const std::string& format) {
    Presentation p = deserialize(read_file(path)).presentation;
    ConflictReport report = compute_conflicts(p);
    if (format == "json") {
        std::cout << dump(to_json(report));
        return kOk;
    }
    auto timeline = compute_timeline(p);
    std::map<std::string, std::string> titles;
    for (const auto& s : p.sections) titles[s.id] = s.title;
    for (std::size_t i = 0; i < p.sections.size(); ++i) {
        const Section& s = p.sections[i];
        const SectionConflict& c = report.sections[i];
        std::cout << s.title << " [" << to_string(s.emphasis) << "] " << clock_text(timeline[i].start) << "-"
                  << clock_text(timeline[i].end) << " " << upper(to_string(c.level));
        if (!c.pairs.empty()) {
            // The worst pair is the one with the smallest ratio.
            const ConflictPair* worst = &c.pairs.front();
            for (const auto& pair : c.pairs)
                if (pair.ratio.value() < worst->ratio.value()) worst = &pair;
            char r[32];
            std::snprintf(r, sizeof r, "%.2f", worst->ratio.value());
            std::cout << " (r=" << r << " vs " << titles[worst->less_important_id] << ")";
        }
        if (c.overflow) std::cout << " OVERFLOW";
        std::cout << "\n";
    }
    std::cout << "total " << clock_text(report.sum_duration) << " of " << clock_text(report.total_duration)
              << "\n";
    return kOk;
}

int cmd_jargon(const std::string& path, const std::string& slide_id, const std::string& lexicon_path,
               bool live) {
    Presentation p = deserialize(read_file(path)).presentation;
    const Slide* slide = find_slide(p, slide_id);
    if (!slide) throw Error(Errc::unknown_slide, "no slide '" + slide_id + "'");

    std::shared_ptr<JargonProvider> provider;
    if (live) {
        auto config = LiveProviderConfig::from_env();
        if (!config) throw Error(Errc::provider_error, "--live needs JARGON_API_URL/JARGON_API_KEY/JARGON_MODEL");
        provider = std::make_shared<LlmJargonProvider>(std::make_shared<HttpChatClient>(*config));
    } else if (!lexicon_path.empty()) {
        Json j;
        try {
            j = Json::parse(read_file(lexicon_path));
        } catch (const Json::parse_error& e) {
            throw Error(Errc::malformed_document, "lexicon is not JSON: " + std::string(e.what()));
        }
        provider = std::make_shared<MockJargonProvider>(lexicon_from_json(j));
    } else {
        provider = std::make_shared<MockJargonProvider>(default_lexicon());
    }
    auto context = expand_audience_context(*provider, p.audience, p.topic);
    auto terms = detect_jargon(*provider, *slide, context, {}, p.topic);
    std::cout << dump(to_json(terms));
    return kOk;
}

Repository open_repository(const std::string& store) {
    return Repository(std::make_unique<FileStore>(store));
}

int cmd_repo_save(const std::string& path, const std::string& store, const std::string& granularity,
                  const std::string& id) {
    Presentation p = deserialize(read_file(path)).presentation;
    auto g = parse_granularity(granularity);
    if (!g) throw Error(Errc::bad_request, "granularity must be presentation, section or slide");
    SavedValue value;
    switch (*g) {
    case Granularity::Presentation:
        if (!id.empty() && id != p.id) throw Error(Errc::unknown_presentation, "deck holds '" + p.id + "'");
        value = p;
        break;
    case Granularity::Section: {
        const Section* s = find_section(p, id);
        if (!s) throw Error(Errc::unknown_section, "no section '" + id + "'");
        value = *s;
        break;
    }
    case Granularity::Slide: {
        const Slide* s = find_slide(p, id);
        if (!s) throw Error(Errc::unknown_slide, "no slide '" + id + "'");
        value = *s;
        break;
    }
    }
    Repository repo = open_repository(store);
    auto entry = repo.save(value, p.id);
    std::cout << dump(to_json(entry));
    return kOk;
}

int cmd_repo_import(const std::string& entry_id, const std::string& store) {
    Repository repo = open_repository(store);
    SavedValue copy = repo.import_copy(entry_id);
    Json out = std::visit(
        [](const auto& v) -> Json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Presentation>) return to_json(Deck{kDeckSchemaVersion, v});
            else return to_json(v);
        },
        copy);
    std::cout << dump(out);
    return kOk;
}

int cmd_repo_search(const std::string& query, const std::string& store, const std::string& granularity,
                    bool json) {
    std::optional<Granularity> g;
    if (!granularity.empty()) {
        g = parse_granularity(granularity);
        if (!g) throw Error(Errc::bad_request, "granularity must be presentation, section or slide");
    }
    Repository repo = open_repository(store);
    auto hits = repo.search(query, g);
    if (json) {
        Json out = Json::array();
        for (const auto& h : hits) out.push_back(to_json(h));
        std::cout << dump(out);
        return kOk;
    }
    for (const auto& h : hits) {
        std::string key = h.version ? h.version->lineage_id + "@" + std::to_string(h.version->version_index)
                                    : h.entry_id;
        std::cout << h.score << "\t" << to_string(h.granularity) << "\t" << key << "\t" << h.snippet << "\n";
    }
    return kOk;
}

int cmd_serve(const std::string& config_path, const std::string& store, const std::string& bind) {
    ServiceConfig config = config_path.empty() ? ServiceConfig{} : ServiceConfig::from_file(config_path);
    config.apply_env();
    if (!store.empty()) config.store_dir = store;
    if (!bind.empty()) {
        auto colon = bind.rfind(':');
        if (colon == std::string::npos) throw Error(Errc::config_error, "--bind must look like host:port");
        config.bind_host = bind.substr(0, colon);
        try {
            config.port = std::stoi(bind.substr(colon + 1));
        } catch (const std::exception&) {
            throw Error(Errc::config_error, "bad port in --bind");
        }
    }

    // Block the shutdown signals before any thread starts so only the waiter sees them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    ServiceHost host(config);
    std::cout << "listening on " << config.bind_host << ":" << host.port() << std::endl;
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        host.stop();
    });
    host.run();
    // run() also returns if the server fails; wake the waiter in that case.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deckcraft presentation tooling"};
    app.require_subcommand(1);

    std::string file, format = "human", slide_id, lexicon, store, granularity, search_granularity, id, query, entry_id, config, bind;
    bool live = false, json = false;

    auto* validate_cmd = app.add_subcommand("validate", "Check a deck file against every invariant");
    validate_cmd->add_option("file", file, "Deck JSON")->required();

    auto* conflicts_cmd = app.add_subcommand("conflicts", "Report time-emphasis conflicts and overflow");
    conflicts_cmd->add_option("file", file, "Deck JSON")->required();
    conflicts_cmd->add_option("--format", format, "human or json")->check(CLI::IsMember({"human", "json"}));

    auto* jargon_cmd = app.add_subcommand("jargon", "Flag jargon on one slide for the deck's audience");
    jargon_cmd->add_option("file", file, "Deck JSON")->required();
    jargon_cmd->add_option("--slide", slide_id, "Slide id")->required();
    auto* lexicon_opt = jargon_cmd->add_option("--mock-lexicon", lexicon, "Lexicon JSON for the mock provider");
    jargon_cmd->add_flag("--live", live, "Use the chat model configured via JARGON_* variables")
        ->excludes(lexicon_opt);

    auto* repo_cmd = app.add_subcommand("repo", "Slide repository maintenance");
    repo_cmd->require_subcommand(1);
    auto* save_cmd = repo_cmd->add_subcommand("save", "Save a deck, section or slide");
    save_cmd->add_option("file", file, "Deck JSON")->required();
    save_cmd->add_option("--store", store, "Store directory")->required();
    save_cmd->add_option("--granularity", granularity, "presentation, section or slide")
        ->default_val("presentation");
    save_cmd->add_option("--id", id, "Section or slide id");
    auto* import_cmd = repo_cmd->add_subcommand("import", "Print a fresh-id copy of an entry");
    import_cmd->add_option("entry", entry_id, "Entry id")->required();
    import_cmd->add_option("--store", store, "Store directory")->required();
    auto* search_cmd = repo_cmd->add_subcommand("search", "Ranked keyword search");
    search_cmd->add_option("query", query, "Keywords")->required();
    search_cmd->add_option("--store", store, "Store directory")->required();
    search_cmd->add_option("--granularity", search_granularity, "Restrict to one granularity");
    search_cmd->add_flag("--json", json, "Print hits as JSON");

    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP authoring service");
    serve_cmd->add_option("--config", config, "Config JSON file");
    serve_cmd->add_option("--store", store, "Store directory (overrides config and STORE_DIR)");
    serve_cmd->add_option("--bind", bind, "host:port (overrides config and BIND_ADDR)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate_cmd) return cmd_validate(file);
        if (*conflicts_cmd) return cmd_conflicts(file, format);
        if (*jargon_cmd) return cmd_jargon(file, slide_id, lexicon, live);
        if (*save_cmd) return cmd_repo_save(file, store, granularity, id);
        if (*import_cmd) return cmd_repo_import(entry_id, store);
        if (*search_cmd) return cmd_repo_search(query, store, search_granularity, json);
        if (*serve_cmd) return cmd_serve(config, store, bind);
    } catch (const Error& e) {
        std::cerr << "error: " << code_name(e.code()) << ": " << e.what() << "\n";
        if (e.details().contains("violations"))
            for (const auto& v : e.details()["violations"])
                std::cerr << "  " << v.value("pointer", "") << ": " << v.value("message", "") << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDomain;
    }
    return kOk;
}
