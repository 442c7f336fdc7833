#include "deckcraft/repository.hpp"

#include <algorithm>
#include <mutex>
#include <set>

#include "deckcraft/deck_json.hpp"

namespace deckcraft {

namespace {

std::string version_key(const std::string& lineage_id, int version_index) {
    return "lineage:" + lineage_id + "#" + std::to_string(version_index);
}

std::string entry_key(const std::string& entry_id) { return "entry:" + entry_id; }

std::vector<std::string> text_of(const Slide& s) {
    std::vector<std::string> out;
    for (const auto& e : s.elements)
        if (e.kind == ElementKind::Text && !e.content.empty()) out.push_back(e.content);
    return out;
}

template <class Value, class F>
void for_each_slide(Value& value, F&& fn) {
    std::visit(
        [&](auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Slide>) {
                fn(v);
            } else if constexpr (std::is_same_v<T, Section>) {
                for (auto& s : v.slides) fn(s);
            } else {
                for (auto& sec : v.sections)
                    for (auto& s : sec.slides) fn(s);
            }
        },
        value);
}

Timestamp timestamp_at(const Json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string())
        throw Error(Errc::config_error, std::string("stored document lacks '") + key + "'");
    auto ts = parse_timestamp(j[key].get<std::string>());
    if (!ts) throw Error(Errc::config_error, std::string("stored document has a bad '") + key + "'");
    return *ts;
}

} // namespace

std::string_view to_string(Granularity g) {
    switch (g) {
    case Granularity::Presentation: return "presentation";
    case Granularity::Section: return "section";
    case Granularity::Slide: return "slide";
    }
    return "slide";
}

std::optional<Granularity> parse_granularity(std::string_view text) {
    if (text == "presentation") return Granularity::Presentation;
    if (text == "section") return Granularity::Section;
    if (text == "slide") return Granularity::Slide;
    return std::nullopt;
}

Granularity granularity_of(const SavedValue& value) {
    return static_cast<Granularity>(value.index());
}

std::string_view to_string(SyncDecision::Kind kind) {
    switch (kind) {
    case SyncDecision::Kind::IgnoreChanges: return "ignore_changes";
    case SyncDecision::Kind::SetAsOrigin: return "set_as_origin";
    case SyncDecision::Kind::KeepBoth: return "keep_both";
    case SyncDecision::Kind::ReplaceContent: return "replace_content";
    }
    return "ignore_changes";
}

SyncDecision sync_decision_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("decision") || !j["decision"].is_string())
        throw Error(Errc::invalid_decision, "body must carry a \"decision\" string");
    const std::string name = j["decision"].get<std::string>();
    SyncDecision d;
    if (name == "ignore_changes") d.kind = SyncDecision::Kind::IgnoreChanges;
    else if (name == "set_as_origin") d.kind = SyncDecision::Kind::SetAsOrigin;
    else if (name == "keep_both") d.kind = SyncDecision::Kind::KeepBoth;
    else if (name == "replace_content") d.kind = SyncDecision::Kind::ReplaceContent;
    else throw Error(Errc::invalid_decision, "unknown sync decision '" + name + "'");

    if (d.kind == SyncDecision::Kind::ReplaceContent) {
        if (!j.contains("targets") || !j["targets"].is_array() || j["targets"].empty())
            throw Error(Errc::invalid_decision, "replace_content needs a non-empty \"targets\" list");
        for (const auto& t : j["targets"]) {
            if (!t.is_number_integer())
                throw Error(Errc::invalid_decision, "replace_content targets must be integers");
            d.targets.push_back(t.get<int>());
        }
    }
    return d;
}

Json to_json(const SyncDecision& d) {
    Json j{{"decision", to_string(d.kind)}};
    if (d.kind == SyncDecision::Kind::ReplaceContent) j["targets"] = d.targets;
    return j;
}

Json to_json(const RepositoryEntry& e) {
    Json payload = std::visit([](const auto& v) { return to_json(v); }, e.payload);
    return Json{{"entry_id", e.entry_id},
                {"granularity", to_string(e.granularity)},
                {"saved_at", format_timestamp(e.saved_at)},
                {"source_presentation_id",
                 e.source_presentation_id ? Json(*e.source_presentation_id) : Json(nullptr)},
                {"payload", std::move(payload)}};
}

RepositoryEntry entry_from_json(const Json& j) {
    try {
        RepositoryEntry e;
        e.entry_id = j.at("entry_id").get<std::string>();
        auto g = parse_granularity(j.at("granularity").get<std::string>());
        if (!g) throw Error(Errc::config_error, "stored entry has an unknown granularity");
        e.granularity = *g;
        e.saved_at = timestamp_at(j, "saved_at");
        if (j.contains("source_presentation_id") && j["source_presentation_id"].is_string())
            e.source_presentation_id = j["source_presentation_id"].get<std::string>();
        const Json& payload = j.at("payload");
        switch (e.granularity) {
        case Granularity::Presentation: e.payload = presentation_from_json(payload, "/payload"); break;
        case Granularity::Section: e.payload = section_from_json(payload, "/payload"); break;
        case Granularity::Slide: e.payload = slide_from_json(payload, "/payload"); break;
        }
        return e;
    } catch (const Json::exception& ex) {
        throw Error(Errc::config_error, std::string("stored entry is malformed: ") + ex.what());
    } catch (const Error& ex) {
        if (ex.code() == Errc::malformed_document)
            throw Error(Errc::config_error, std::string("stored entry is malformed: ") + ex.what());
        throw;
    }
}

Json to_json(const SlideLineage& l) {
    Json versions = Json::array();
    for (const auto& v : l.versions)
        versions.push_back(Json{{"version_index", v.version_index},
                                {"saved_at", format_timestamp(v.saved_at)},
                                {"replaced_at", v.replaced_at ? Json(format_timestamp(*v.replaced_at))
                                                              : Json(nullptr)},
                                {"slide", to_json(v.slide)}});
    return Json{{"lineage_id", l.lineage_id}, {"versions", std::move(versions)}};
}

SlideLineage lineage_from_json(const Json& j) {
    try {
        SlideLineage l;
        l.lineage_id = j.at("lineage_id").get<std::string>();
        for (const auto& v : j.at("versions")) {
            LineageVersion lv;
            lv.version_index = v.at("version_index").get<int>();
            lv.saved_at = timestamp_at(v, "saved_at");
            if (v.contains("replaced_at") && v["replaced_at"].is_string())
                lv.replaced_at = timestamp_at(v, "replaced_at");
            lv.slide = slide_from_json(v.at("slide"), "/slide");
            if (lv.version_index != static_cast<int>(l.versions.size()))
                throw Error(Errc::config_error, "lineage " + l.lineage_id + " has non-contiguous versions");
            l.versions.push_back(std::move(lv));
        }
        return l;
    } catch (const Json::exception& ex) {
        throw Error(Errc::config_error, std::string("stored lineage is malformed: ") + ex.what());
    } catch (const Error& ex) {
        if (ex.code() == Errc::malformed_document)
            throw Error(Errc::config_error, std::string("stored lineage is malformed: ") + ex.what());
        throw;
    }
}

Json to_json(const SearchHit& h) {
    Json j{{"granularity", to_string(h.granularity)}};
    j["entry_id"] = h.entry_id.empty() ? Json(nullptr) : Json(h.entry_id);
    if (h.version)
        j["lineage_ref"] = Json{{"lineage_id", h.version->lineage_id},
                                {"version_index", h.version->version_index}};
    else
        j["lineage_ref"] = nullptr;
    j["score"] = h.score;
    j["snippet"] = h.snippet;
    j["saved_at"] = format_timestamp(h.saved_at);
    return j;
}

// ---- Repository -----------------------------------------------------------

namespace {

/// The base version with each element renamed to the id its counterpart has
/// in `working`: the same id, or the id a copy made for `working` carries.
/// With `rename_unmatched`, elements without a counterpart get the copy id too.
Slide in_working_ids(Slide base, const Slide& working, bool rename_unmatched) {
    std::set<std::string> ids;
    for (const auto& w : working.elements) ids.insert(w.id);
    for (auto& e : base.elements) {
        if (ids.count(e.id)) continue;
        std::string copied = derive_id(working.id, e.id);
        if (rename_unmatched || ids.count(copied)) e.id = std::move(copied);
    }
    return base;
}

} // namespace

Repository::Repository(std::unique_ptr<DocumentStore> store, Minter& minter)
    : store_(std::move(store)), minter_(minter) {
    StoreSnapshot snap = store_->load();
    for (const auto& j : snap.lineages) {
        SlideLineage l = lineage_from_json(j);
        std::string id = l.lineage_id;
        lineages_.emplace(id, std::move(l));
    }
    for (const auto& j : snap.entries) {
        RepositoryEntry e = entry_from_json(j);
        std::string id = e.entry_id;
        entries_.emplace(id, std::move(e));
    }
    for (const auto& [id, l] : lineages_) index_lineage(l);
    for (const auto& [id, e] : entries_) index_entry(e);
}

const SlideLineage& Repository::require_lineage(const std::string& lineage_id) const {
    auto it = lineages_.find(lineage_id);
    if (it == lineages_.end())
        throw Error(Errc::unknown_lineage, "unknown lineage '" + lineage_id + "'");
    return it->second;
}

const LineageVersion& Repository::require_version(const std::string& lineage_id,
                                                  int version_index) const {
    const SlideLineage& l = require_lineage(lineage_id);
    if (version_index < 0 || version_index >= static_cast<int>(l.versions.size()))
        throw Error(Errc::unknown_version, "lineage '" + lineage_id + "' has no version " +
                                               std::to_string(version_index));
    return l.versions[static_cast<std::size_t>(version_index)];
}

void Repository::check_refs(const SavedValue& value) const {
    for_each_slide(value, [&](const Slide& s) {
        if (s.lineage_ref) require_version(s.lineage_ref->lineage_id, s.lineage_ref->version_index);
    });
}

void Repository::register_slides(SavedValue& value, Timestamp now) {
    for_each_slide(value, [&](Slide& s) {
        if (s.lineage_ref) return;
        SlideLineage l;
        l.lineage_id = minter_.next_id();
        s.lineage_ref = LineageRef{l.lineage_id, 0};
        l.versions.push_back(LineageVersion{0, s, now, std::nullopt});
        persist_lineage(l);
        index_lineage(l);
        std::string id = l.lineage_id;
        lineages_.emplace(id, std::move(l));
    });
}

void Repository::persist_lineage(const SlideLineage& l) {
    store_->put_lineage(l.lineage_id, to_json(l));
}

void Repository::index_entry(const RepositoryEntry& e) {
    SearchIndex::Document doc;
    doc.key = entry_key(e.entry_id);
    doc.kind = static_cast<int>(e.granularity);
    doc.saved_at = e.saved_at;
    if (const auto* p = std::get_if<Presentation>(&e.payload)) {
        doc.title = p->title;
        for (const auto& s : p->sections) doc.body.push_back(s.title);
    } else if (const auto* s = std::get_if<Section>(&e.payload)) {
        doc.title = s->title;
        for (const auto& sl : s->slides)
            if (sl.title) doc.body.push_back(*sl.title);
    } else {
        // Slides are searchable through their lineage versions.
        return;
    }
    index_.put(std::move(doc));
}

void Repository::index_lineage(const SlideLineage& l) {
    for (const auto& v : l.versions) {
        SearchIndex::Document doc;
        doc.key = version_key(l.lineage_id, v.version_index);
        doc.kind = static_cast<int>(Granularity::Slide);
        doc.saved_at = v.replaced_at.value_or(v.saved_at);
        doc.title = v.slide.title.value_or("");
        doc.body = text_of(v.slide);
        index_.put(std::move(doc));
    }
}

RepositoryEntry Repository::save(const SavedValue& value,
                                 std::optional<std::string> source_presentation_id) {
    std::unique_lock lock(mutex_);
    check_refs(value);

    RepositoryEntry e;
    e.entry_id = minter_.next_id();
    e.granularity = granularity_of(value);
    e.saved_at = minter_.now();
    e.payload = value;
    if (!source_presentation_id)
        if (const auto* p = std::get_if<Presentation>(&value)) source_presentation_id = p->id;
    e.source_presentation_id = std::move(source_presentation_id);

    register_slides(e.payload, e.saved_at);
    store_->put_entry(e.entry_id, to_json(e));
    index_entry(e);
    entries_.emplace(e.entry_id, e);
    return e;
}

SavedValue Repository::import_copy(const std::string& entry_id) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(entry_id);
    if (it == entries_.end()) throw Error(Errc::unknown_entry, "unknown entry '" + entry_id + "'");
    return std::visit([&](const auto& v) -> SavedValue { return copy_with_fresh_ids(v, minter_); },
                      it->second.payload);
}

Presentation Repository::import_into(const std::string& entry_id, const Presentation& target,
                                     std::optional<std::size_t> position) const {
    SavedValue copy = import_copy(entry_id);
    auto* section = std::get_if<Section>(&copy);
    if (!section)
        throw Error(Errc::granularity_mismatch,
                    "entry '" + entry_id + "' is a " + std::string(to_string(granularity_of(copy))) +
                        "; only sections can be placed into a presentation");
    return insert_section(target, std::move(*section), position);
}

std::pair<Presentation, Slide> Repository::reuse_slide(const std::string& lineage_id,
                                                       int version_index,
                                                       const Presentation& target,
                                                       std::string_view section_id,
                                                       std::optional<std::size_t> position) const {
    Slide copy;
    {
        std::shared_lock lock(mutex_);
        copy = copy_with_fresh_ids(require_version(lineage_id, version_index).slide, minter_);
    }
    copy.lineage_ref = LineageRef{lineage_id, version_index};
    if (!find_section(target, section_id))
        throw Error(Errc::unknown_section, "unknown section '" + std::string(section_id) + "'");
    Presentation out = insert_slide(target, section_id, copy, position);
    return {std::move(out), std::move(copy)};
}

Slide Repository::base_of(const Slide& working) const {
    if (!working.lineage_ref)
        throw Error(Errc::no_lineage, "slide '" + working.id + "' is not linked to a lineage");
    std::shared_lock lock(mutex_);
    return require_version(working.lineage_ref->lineage_id, working.lineage_ref->version_index).slide;
}

SlideDiff Repository::detect_changes(const Slide& working) const {
    return diff_slides(working, in_working_ids(base_of(working), working, false));
}

SyncOutcome Repository::resolve_sync(const std::string& lineage_id, const Slide& working,
                                     const SyncDecision& decision) {
    std::unique_lock lock(mutex_);
    const SlideLineage& current = require_lineage(lineage_id);
    const bool ref_in_lineage = working.lineage_ref && working.lineage_ref->lineage_id == lineage_id;

    switch (decision.kind) {
    case SyncDecision::Kind::IgnoreChanges: {
        int v = ref_in_lineage ? working.lineage_ref->version_index
                               : static_cast<int>(current.versions.size()) - 1;
        Slide restored = in_working_ids(require_version(lineage_id, v).slide, working, true);
        restored.id = working.id;
        return SyncOutcome{std::move(restored)};
    }
    case SyncDecision::Kind::SetAsOrigin: {
        SlideLineage fork;
        fork.lineage_id = minter_.next_id();
        Slide head = working;
        head.lineage_ref = LineageRef{fork.lineage_id, 0};
        fork.versions.push_back(LineageVersion{0, head, minter_.now(), std::nullopt});
        persist_lineage(fork);
        index_lineage(fork);
        lineages_.emplace(fork.lineage_id, std::move(fork));
        return SyncOutcome{std::move(head)};
    }
    case SyncDecision::Kind::KeepBoth: {
        SlideLineage updated = current;
        int index = static_cast<int>(updated.versions.size());
        Slide head = working;
        head.lineage_ref = LineageRef{lineage_id, index};
        updated.versions.push_back(LineageVersion{index, head, minter_.now(), std::nullopt});
        persist_lineage(updated);
        index_lineage(updated);
        lineages_[lineage_id] = std::move(updated);
        return SyncOutcome{std::move(head)};
    }
    case SyncDecision::Kind::ReplaceContent: {
        if (decision.targets.empty())
            throw Error(Errc::invalid_decision, "replace_content needs at least one target version");
        std::set<int> targets(decision.targets.begin(), decision.targets.end());
        for (int t : targets) require_version(lineage_id, t);

        SlideLineage updated = current;
        Timestamp now = minter_.now();
        for (int t : targets) {
            LineageVersion& v = updated.versions[static_cast<std::size_t>(t)];
            v.slide.title = working.title;
            v.slide.elements = working.elements;
            v.replaced_at = now;
        }
        persist_lineage(updated);
        index_lineage(updated);
        lineages_[lineage_id] = std::move(updated);

        Slide out = working;
        int bound = (ref_in_lineage && targets.count(working.lineage_ref->version_index))
                        ? working.lineage_ref->version_index
                        : *targets.begin();
        out.lineage_ref = LineageRef{lineage_id, bound};
        return SyncOutcome{std::move(out)};
    }
    }
    throw Error(Errc::invalid_decision, "unknown sync decision");
}

std::vector<SearchHit> Repository::search(std::string_view query,
                                          std::optional<Granularity> granularity) const {
    if (tokenize(query).empty()) throw Error(Errc::empty_query, "search query must not be empty");
    std::shared_lock lock(mutex_);
    std::optional<int> kind;
    if (granularity) kind = static_cast<int>(*granularity);
    std::vector<SearchHit> out;
    for (auto& m : index_.query(query, kind)) {
        SearchHit hit;
        hit.score = m.score;
        hit.snippet = std::move(m.snippet);
        hit.saved_at = m.saved_at;
        if (m.key.rfind("entry:", 0) == 0) {
            hit.entry_id = m.key.substr(6);
            hit.granularity = entries_.at(hit.entry_id).granularity;
        } else {
            auto hash = m.key.rfind('#');
            hit.granularity = Granularity::Slide;
            hit.version = LineageRef{m.key.substr(8, hash - 8), std::stoi(m.key.substr(hash + 1))};
        }
        out.push_back(std::move(hit));
    }
    return out;
}

AssetPut Repository::put_asset(std::string_view bytes) {
    std::string hash = sha256_hex(bytes);
    std::unique_lock lock(mutex_);
    bool created = store_->put_asset(hash, bytes);
    return AssetPut{std::move(hash), created};
}

std::optional<std::string> Repository::get_asset(const std::string& hash) const {
    std::shared_lock lock(mutex_);
    return store_->get_asset(hash);
}

bool Repository::has_asset(const std::string& hash) const {
    return get_asset(hash).has_value();
}

std::optional<RepositoryEntry> Repository::entry(const std::string& entry_id) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(entry_id);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::optional<SlideLineage> Repository::lineage(const std::string& lineage_id) const {
    std::shared_lock lock(mutex_);
    auto it = lineages_.find(lineage_id);
    if (it == lineages_.end()) return std::nullopt;
    return it->second;
}

std::vector<RepositoryEntry> Repository::entries() const {
    std::shared_lock lock(mutex_);
    std::vector<RepositoryEntry> out;
    for (const auto& [id, e] : entries_) out.push_back(e);
    std::sort(out.begin(), out.end(), [](const RepositoryEntry& a, const RepositoryEntry& b) {
        if (a.saved_at != b.saved_at) return a.saved_at < b.saved_at;
        return a.entry_id < b.entry_id;
    });
    return out;
}

std::vector<SlideLineage> Repository::lineages() const {
    std::shared_lock lock(mutex_);
    std::vector<SlideLineage> out;
    for (const auto& [id, l] : lineages_) out.push_back(l);
    return out;
}

std::string Repository::state_digest() const {
    std::shared_lock lock(mutex_);
    std::string canonical;
    for (const auto& [id, e] : entries_) canonical += to_json(e).dump() + "\n";
    canonical += "--\n";
    for (const auto& [id, l] : lineages_) canonical += to_json(l).dump() + "\n";
    canonical += "--\n";
    for (const auto& h : store_->asset_hashes()) canonical += h + "\n";
    return sha256_hex(canonical);
}

} // namespace deckcraft
