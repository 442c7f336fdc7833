#include "deckcraft/service.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "deckcraft/deck_json.hpp"
#include "deckcraft/mock_provider.hpp"

namespace deckcraft {

namespace {

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
}

std::pair<std::string, int> split_bind_addr(const std::string& addr) {
    auto colon = addr.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == addr.size())
        throw Error(Errc::config_error, "bind address must look like host:port, got '" + addr + "'");
    int port = 0;
    try {
        std::size_t used = 0;
        port = std::stoi(addr.substr(colon + 1), &used);
        if (used != addr.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw Error(Errc::config_error, "bad port in bind address '" + addr + "'");
    }
    if (port < 0 || port > 65535) throw Error(Errc::config_error, "port out of range in '" + addr + "'");
    return {addr.substr(0, colon), port};
}

std::string config_string(const Json& j, const char* key, const std::string& where) {
    const Json& v = j.at(key);
    if (!v.is_string()) throw Error(Errc::config_error, where + "." + key + " must be a string");
    return v.get<std::string>();
}

template <class F>
void for_each_slide(Presentation& p, F&& f) {
    for (auto& section : p.sections)
        for (auto& slide : section.slides) f(slide);
}

template <class F>
void for_each_slide(const SavedValue& v, F&& f) {
    std::visit(
        [&](const auto& value) {
            using T = std::decay_t<decltype(value)>;
            if constexpr (std::is_same_v<T, Slide>) {
                f(value);
            } else if constexpr (std::is_same_v<T, Section>) {
                for (const auto& s : value.slides) f(s);
            } else {
                for (const auto& section : value.sections)
                    for (const auto& s : section.slides) f(s);
            }
        },
        v);
}

Error unknown_presentation(const std::string& id) {
    return Error(Errc::unknown_presentation, "no presentation '" + id + "'", Json{{"id", id}});
}
Error unknown_section(const std::string& id) {
    return Error(Errc::unknown_section, "no section '" + id + "'", Json{{"id", id}});
}
Error unknown_slide(const std::string& id) {
    return Error(Errc::unknown_slide, "no slide '" + id + "'", Json{{"id", id}});
}

} // namespace

// ---- config -----------------------------------------------------------------

ServiceConfig ServiceConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::config_error, "cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    Json j;
    try {
        j = Json::parse(buf.str());
    } catch (const Json::parse_error& e) {
        throw Error(Errc::config_error, "config file is not JSON: " + std::string(e.what()));
    }
    if (!j.is_object()) throw Error(Errc::config_error, "config file must hold a JSON object");

    ServiceConfig c;
    if (j.contains("bind_addr")) std::tie(c.bind_host, c.port) = split_bind_addr(config_string(j, "bind_addr", "config"));
    if (j.contains("store_dir")) c.store_dir = config_string(j, "store_dir", "config");
    if (j.contains("jargon")) {
        const Json& jj = j["jargon"];
        if (!jj.is_object()) throw Error(Errc::config_error, "config.jargon must be an object");
        if (jj.contains("api_url") || jj.contains("api_key") || jj.contains("model")) {
            LiveProviderConfig live;
            live.api_url = jj.contains("api_url") ? config_string(jj, "api_url", "jargon")
                                                  : "https://api.openai.com/v1/chat/completions";
            if (jj.contains("api_key")) live.api_key = config_string(jj, "api_key", "jargon");
            if (jj.contains("model")) live.model = config_string(jj, "model", "jargon");
            c.live = live;
        }
        if (jj.contains("mock_lexicon")) c.mock_lexicon = config_string(jj, "mock_lexicon", "jargon");
        if (jj.contains("concurrency")) {
            if (!jj["concurrency"].is_number_integer())
                throw Error(Errc::config_error, "jargon.concurrency must be an integer");
            c.jargon_concurrency = jj["concurrency"].get<int>();
        }
    }
    return c;
}

void ServiceConfig::apply_env() {
    if (auto addr = env("BIND_ADDR")) std::tie(bind_host, port) = split_bind_addr(*addr);
    if (auto dir = env("STORE_DIR")) store_dir = *dir;
    if (auto from_env = LiveProviderConfig::from_env()) {
        LiveProviderConfig merged = live.value_or(LiveProviderConfig{});
        if (env("JARGON_API_URL") || merged.api_url.empty()) merged.api_url = from_env->api_url;
        if (env("JARGON_API_KEY")) merged.api_key = from_env->api_key;
        if (env("JARGON_MODEL")) merged.model = from_env->model;
        live = merged;
    }
}

std::shared_ptr<JargonProvider> make_provider(const ServiceConfig& config) {
    if (config.jargon_concurrency < 1 || config.jargon_concurrency > BoundedProvider::kMaxInFlight)
        throw Error(Errc::config_error, "jargon concurrency must be between 1 and " +
                                            std::to_string(BoundedProvider::kMaxInFlight));
    std::shared_ptr<JargonProvider> inner;
    if (config.live) {
        if (config.live->api_key.empty())
            throw Error(Errc::config_error, "live jargon provider configured without an API key");
        inner = std::make_shared<LlmJargonProvider>(std::make_shared<HttpChatClient>(*config.live));
    } else if (config.mock_lexicon) {
        std::ifstream in(*config.mock_lexicon, std::ios::binary);
        if (!in) throw Error(Errc::config_error, "cannot read lexicon " + config.mock_lexicon->string());
        std::stringstream buf;
        buf << in.rdbuf();
        Json j;
        try {
            j = Json::parse(buf.str());
        } catch (const Json::parse_error& e) {
            throw Error(Errc::malformed_document, "lexicon is not JSON: " + std::string(e.what()));
        }
        inner = std::make_shared<MockJargonProvider>(lexicon_from_json(j));
    } else {
        inner = std::make_shared<MockJargonProvider>(default_lexicon());
    }
    return std::make_shared<BoundedProvider>(std::move(inner), config.jargon_concurrency);
}

// ---- workspace registry -----------------------------------------------------

AuthoringService::AuthoringService(std::shared_ptr<Repository> repository,
                                   std::shared_ptr<JargonProvider> provider, Minter& minter)
    : repository_(std::move(repository)), provider_(std::move(provider)), minter_(minter) {}

std::shared_ptr<AuthoringService::Workspace> AuthoringService::workspace(const std::string& id) const {
    std::shared_lock lock(registry_mutex_);
    auto it = workspaces_.find(id);
    if (it == workspaces_.end()) throw unknown_presentation(id);
    return it->second;
}

std::shared_ptr<AuthoringService::Workspace>
AuthoringService::workspace_of_section(const std::string& section_id) const {
    std::shared_lock lock(registry_mutex_);
    auto it = section_owner_.find(section_id);
    if (it == section_owner_.end()) throw unknown_section(section_id);
    return workspaces_.at(it->second);
}

std::shared_ptr<AuthoringService::Workspace>
AuthoringService::workspace_of_slide(const std::string& slide_id) const {
    std::shared_lock lock(registry_mutex_);
    auto it = slide_owner_.find(slide_id);
    if (it == slide_owner_.end()) throw unknown_slide(slide_id);
    return workspaces_.at(it->second);
}

std::shared_ptr<AuthoringService::Workspace> AuthoringService::open_workspace(Presentation p) {
    auto ws = std::make_shared<Workspace>();
    ws->presentation = std::move(p);
    std::lock_guard ws_lock(ws->mutex);
    {
        std::unique_lock lock(registry_mutex_);
        workspaces_[ws->presentation.id] = ws;
    }
    reindex(*ws);
    return ws;
}

// Caller holds ws.mutex.
void AuthoringService::reindex(Workspace& ws) {
    std::set<std::string> sections, slides;
    for (const auto& section : ws.presentation.sections) {
        sections.insert(section.id);
        for (const auto& slide : section.slides) slides.insert(slide.id);
    }
    std::unique_lock lock(registry_mutex_);
    const std::string& pid = ws.presentation.id;
    for (const auto& id : ws.indexed_sections)
        if (!sections.count(id)) section_owner_.erase(id);
    for (const auto& id : ws.indexed_slides)
        if (!slides.count(id)) slide_owner_.erase(id);
    for (const auto& id : sections) section_owner_[id] = pid;
    for (const auto& id : slides) slide_owner_[id] = pid;
    for (auto it = ws.hidden.begin(); it != ws.hidden.end();)
        it = slides.count(it->first) ? std::next(it) : ws.hidden.erase(it);
    ws.indexed_sections = std::move(sections);
    ws.indexed_slides = std::move(slides);
}

void AuthoringService::check_revision(const Workspace& ws, std::optional<std::uint64_t> expected) const {
    if (expected && *expected != ws.revision)
        throw Error(Errc::revision_conflict,
                    "presentation changed since revision " + std::to_string(*expected),
                    Json{{"expected", *expected}, {"current", ws.revision}});
}

void AuthoringService::check_assets(const std::vector<ElementSpec>& specs) const {
    for (const auto& spec : specs)
        if (spec.kind == ElementKind::Image && !repository_->has_asset(spec.content))
            throw Error(Errc::unknown_asset, "image references unknown asset '" + spec.content + "'",
                        Json{{"hash", spec.content}});
}

// ---- presentations and sections -------------------------------------------

Versioned AuthoringService::create_presentation(std::string title, Seconds total_duration,
                                                AudienceProfile audience, std::optional<std::string> topic) {
    auto p = deckcraft::create_presentation(std::move(title), total_duration, std::move(audience),
                                            std::move(topic), minter_);
    auto ws = open_workspace(p);
    return {std::move(p), ws->revision};
}

Versioned AuthoringService::presentation(const std::string& id) const {
    auto ws = workspace(id);
    std::lock_guard lock(ws->mutex);
    return {ws->presentation, ws->revision};
}

Versioned AuthoringService::update_presentation(const std::string& id, const PresentationPatch& patch,
                                                std::optional<std::uint64_t> expected_revision) {
    auto ws = workspace(id);
    std::lock_guard lock(ws->mutex);
    check_revision(*ws, expected_revision);
    ws->presentation = deckcraft::update_presentation(ws->presentation, patch);
    ++ws->revision;
    return {ws->presentation, ws->revision};
}

Section AuthoringService::add_section(const std::string& presentation_id, SectionSpec spec) {
    auto ws = workspace(presentation_id);
    std::lock_guard lock(ws->mutex);
    auto [next, section] = deckcraft::add_section(ws->presentation, std::move(spec), minter_);
    ws->presentation = std::move(next);
    ++ws->revision;
    reindex(*ws);
    return section;
}

Section AuthoringService::update_section(const std::string& section_id, const SectionPatch& patch,
                                         std::optional<std::uint64_t> expected_revision) {
    auto ws = workspace_of_section(section_id);
    std::lock_guard lock(ws->mutex);
    check_revision(*ws, expected_revision);
    ws->presentation = deckcraft::update_section(ws->presentation, section_id, patch);
    ++ws->revision;
    return *find_section(ws->presentation, section_id);
}

Versioned AuthoringService::reorder_sections(const std::string& presentation_id,
                                             const std::vector<std::string>& order,
                                             std::optional<std::uint64_t> expected_revision) {
    auto ws = workspace(presentation_id);
    std::lock_guard lock(ws->mutex);
    check_revision(*ws, expected_revision);
    ws->presentation = deckcraft::reorder_sections(ws->presentation, order);
    ++ws->revision;
    return {ws->presentation, ws->revision};
}

// ---- slides -----------------------------------------------------------------

Slide AuthoringService::add_slide(const std::string& section_id, std::optional<std::string> title,
                                  std::vector<ElementSpec> elements, std::optional<std::size_t> position) {
    check_assets(elements);
    auto ws = workspace_of_section(section_id);
    std::lock_guard lock(ws->mutex);
    Slide slide = make_slide(std::move(title), std::move(elements), minter_);
    ws->presentation = insert_slide(ws->presentation, section_id, slide, position);
    ++ws->revision;
    reindex(*ws);
    return slide;
}

Slide AuthoringService::update_slide(const std::string& slide_id, const SlidePatch& patch,
                                     std::optional<std::uint64_t> expected_revision) {
    check_assets(patch.add_elements);
    auto ws = workspace_of_slide(slide_id);
    std::lock_guard lock(ws->mutex);
    check_revision(*ws, expected_revision);
    Slide slide = *find_slide(ws->presentation, slide_id);
    if (patch.title) slide = set_slide_title(slide, *patch.title);
    for (const auto& [element_id, edit] : patch.edits) {
        if (edit.content) {
            auto it = std::find_if(slide.elements.begin(), slide.elements.end(),
                                   [&](const Element& e) { return e.id == element_id; });
            if (it != slide.elements.end() && it->kind == ElementKind::Image &&
                !repository_->has_asset(*edit.content))
                throw Error(Errc::unknown_asset, "image references unknown asset '" + *edit.content + "'",
                            Json{{"hash", *edit.content}});
        }
        slide = edit_element(slide, element_id, edit);
    }
    for (const auto& spec : patch.add_elements) slide = add_element(slide, make_element(spec, minter_));
    for (const auto& element_id : patch.remove_elements) slide = remove_element(slide, element_id);
    ws->presentation = replace_slide(ws->presentation, slide);
    ++ws->revision;
    return slide;
}

Versioned AuthoringService::move_slide(const std::string& slide_id, const std::string& target_section_id,
                                       std::size_t position) {
    auto ws = workspace_of_slide(slide_id);
    std::lock_guard lock(ws->mutex);
    if (!find_section(ws->presentation, target_section_id)) throw unknown_section(target_section_id);
    ws->presentation = deckcraft::move_slide(ws->presentation, slide_id, target_section_id, position);
    ++ws->revision;
    return {ws->presentation, ws->revision};
}

// ---- analysis ---------------------------------------------------------------

std::vector<TimelineEntry> AuthoringService::timeline(const std::string& presentation_id) const {
    return compute_timeline(presentation(presentation_id).presentation);
}

ConflictReport AuthoringService::conflicts(const std::string& presentation_id) const {
    return compute_conflicts(presentation(presentation_id).presentation);
}

std::vector<std::string> AuthoringService::dirty_slides(const std::string& presentation_id) const {
    auto p = presentation(presentation_id).presentation;
    std::vector<std::string> out;
    for (const auto& section : p.sections)
        for (const auto& slide : section.slides)
            if (slide.lineage_ref && !repository_->detect_changes(slide).empty()) out.push_back(slide.id);
    return out;
}

// ---- repository -------------------------------------------------------------

RepositoryEntry AuthoringService::save(Granularity granularity, const std::string& id) {
    std::shared_ptr<Workspace> ws;
    switch (granularity) {
    case Granularity::Presentation: ws = workspace(id); break;
    case Granularity::Section: ws = workspace_of_section(id); break;
    case Granularity::Slide: ws = workspace_of_slide(id); break;
    }
    std::lock_guard lock(ws->mutex);
    SavedValue value;
    switch (granularity) {
    case Granularity::Presentation: value = ws->presentation; break;
    case Granularity::Section: value = *find_section(ws->presentation, id); break;
    case Granularity::Slide: value = *find_slide(ws->presentation, id); break;
    }
    RepositoryEntry entry = repository_->save(value, ws->presentation.id);

    std::map<std::string, LineageRef> refs;
    for_each_slide(entry.payload, [&](const Slide& s) {
        if (s.lineage_ref) refs.emplace(s.id, *s.lineage_ref);
    });
    bool rebound = false;
    for_each_slide(ws->presentation, [&](Slide& s) {
        auto it = refs.find(s.id);
        if (it != refs.end() && !s.lineage_ref) {
            s.lineage_ref = it->second;
            rebound = true;
        }
    });
    if (rebound) ++ws->revision;
    return entry;
}

std::vector<SearchHit> AuthoringService::search(std::string_view query,
                                                std::optional<Granularity> granularity) const {
    return repository_->search(query, granularity);
}

ImportResult AuthoringService::import_entry(const std::string& entry_id,
                                            std::optional<std::string> target_presentation_id,
                                            std::optional<std::size_t> position) {
    if (!target_presentation_id) {
        SavedValue copy = repository_->import_copy(entry_id);
        ImportResult result{granularity_of(copy), copy, std::nullopt, std::nullopt};
        if (auto* p = std::get_if<Presentation>(&copy)) {
            auto ws = open_workspace(*p);
            result.presentation_id = p->id;
            result.revision = ws->revision;
        }
        return result;
    }
    auto ws = workspace(*target_presentation_id);
    std::lock_guard lock(ws->mutex);
    Presentation next = repository_->import_into(entry_id, ws->presentation, position);
    std::set<std::string> before;
    for (const auto& s : ws->presentation.sections) before.insert(s.id);
    const Section* inserted = nullptr;
    for (const auto& s : next.sections)
        if (!before.count(s.id)) inserted = &s;
    ImportResult result{Granularity::Section, *inserted, next.id, std::nullopt};
    ws->presentation = std::move(next);
    result.revision = ++ws->revision;
    reindex(*ws);
    return result;
}

Slide AuthoringService::reuse_slide(const std::string& lineage_id, int version_index,
                                    const std::string& section_id, std::optional<std::size_t> position) {
    auto ws = workspace_of_section(section_id);
    std::lock_guard lock(ws->mutex);
    auto [next, slide] = repository_->reuse_slide(lineage_id, version_index, ws->presentation, section_id, position);
    ws->presentation = std::move(next);
    ++ws->revision;
    reindex(*ws);
    return slide;
}

SlideDiff AuthoringService::diff(const std::string& slide_id) const {
    auto ws = workspace_of_slide(slide_id);
    Slide slide;
    {
        std::lock_guard lock(ws->mutex);
        slide = *find_slide(ws->presentation, slide_id);
    }
    return repository_->detect_changes(slide);
}

Slide AuthoringService::sync(const std::string& slide_id, const SyncDecision& decision) {
    auto ws = workspace_of_slide(slide_id);
    std::lock_guard lock(ws->mutex);
    const Slide& working = *find_slide(ws->presentation, slide_id);
    if (!working.lineage_ref)
        throw Error(Errc::no_lineage, "slide '" + slide_id + "' was not reused from the repository",
                    Json{{"id", slide_id}});
    SyncOutcome outcome = repository_->resolve_sync(working.lineage_ref->lineage_id, working, decision);
    ws->presentation = replace_slide(ws->presentation, outcome.slide);
    ++ws->revision;
    return outcome.slide;
}

// ---- jargon -----------------------------------------------------------------

JargonReport AuthoringService::check_jargon(const std::string& slide_id) {
    auto ws = workspace_of_slide(slide_id);
    Slide slide;
    AudienceProfile audience;
    std::optional<std::string> topic;
    HideState hidden;
    std::optional<ExpandedAudienceContext> cached;
    {
        std::lock_guard lock(ws->mutex);
        slide = *find_slide(ws->presentation, slide_id);
        audience = ws->presentation.audience;
        topic = ws->presentation.topic;
        if (auto it = ws->hidden.find(slide_id); it != ws->hidden.end()) hidden = it->second;
        if (ws->expanded && ws->expanded->first == audience) cached = ws->expanded->second;
    }
    // Provider calls run without the workspace lock so edits are not blocked.
    if (canonical_slide_text(slide).find_first_not_of(" \t\r\n") == std::string::npos)
        throw Error(Errc::empty_slide, "slide '" + slide_id + "' has no text to check", Json{{"id", slide_id}});
    if (!cached) {
        cached = expand_audience_context(*provider_, audience, topic);
        std::lock_guard lock(ws->mutex);
        ws->expanded.emplace(audience, *cached);
    }
    JargonReport report;
    report.slide_id = slide_id;
    report.text = canonical_slide_text(slide);
    report.audience = *cached;
    report.terms = detect_jargon(*provider_, slide, *cached, hidden, topic);
    return report;
}

HideState AuthoringService::hide_jargon(const std::string& slide_id, HideOp op, std::string_view term) {
    auto ws = workspace_of_slide(slide_id);
    std::lock_guard lock(ws->mutex);
    HideState& state = ws->hidden[slide_id];
    switch (op) {
    case HideOp::Term:
        if (term.empty()) throw Error(Errc::bad_request, "term to hide must not be empty");
        state = hide_term(state, term);
        break;
    case HideOp::All: state = hide_all(state); break;
    case HideOp::Reset: state = reset_hidden(state); break;
    }
    return state;
}

// ---- assets -----------------------------------------------------------------

AssetPut AuthoringService::put_asset(std::string_view bytes) { return repository_->put_asset(bytes); }

std::optional<std::string> AuthoringService::asset(const std::string& hash) const {
    return repository_->get_asset(hash);
}

// ---- host -------------------------------------------------------------------

ServiceHost::ServiceHost(const ServiceConfig& config, Minter& minter) {
    auto provider = make_provider(config);
    repository_ = std::make_shared<Repository>(std::make_unique<FileStore>(config.store_dir), minter);
    service_ = std::make_unique<AuthoringService>(repository_, std::move(provider), minter);
    frontend_ = std::make_unique<HttpFrontend>(*service_);
    port_ = frontend_->bind(config.bind_host, config.port);
}

ServiceHost::~ServiceHost() { stop(); }

void ServiceHost::run() { frontend_->listen(); }

void ServiceHost::start_background() {
    thread_ = std::thread([this] { frontend_->listen(); });
    while (!frontend_->running()) std::this_thread::yield();
}

void ServiceHost::stop() {
    if (frontend_) frontend_->stop();
    if (thread_.joinable()) thread_.join();
}

} // namespace deckcraft
