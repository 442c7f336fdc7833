#pragma once

#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "deckcraft/deck.hpp"
#include "deckcraft/error.hpp"
#include "deckcraft/minter.hpp"
#include "deckcraft/search_index.hpp"
#include "deckcraft/slide_diff.hpp"
#include "deckcraft/store.hpp"

namespace deckcraft {

enum class Granularity { Presentation = 0, Section = 1, Slide = 2 };

std::string_view to_string(Granularity g);
std::optional<Granularity> parse_granularity(std::string_view text);

using SavedValue = std::variant<Presentation, Section, Slide>;

Granularity granularity_of(const SavedValue& value);

struct RepositoryEntry {
    std::string entry_id;
    Granularity granularity = Granularity::Slide;
    SavedValue payload;
    Timestamp saved_at{};
    std::optional<std::string> source_presentation_id;

    bool operator==(const RepositoryEntry&) const = default;
};

struct LineageVersion {
    int version_index = 0;
    Slide slide; // lineage_ref always points back at (lineage, version_index)
    Timestamp saved_at{};
    std::optional<Timestamp> replaced_at;

    bool operator==(const LineageVersion&) const = default;
};

struct SlideLineage {
    std::string lineage_id;
    std::vector<LineageVersion> versions; // version_index == position

    std::size_t size() const { return versions.size(); }
    bool operator==(const SlideLineage&) const = default;
};

struct SyncDecision {
    enum class Kind { IgnoreChanges, SetAsOrigin, KeepBoth, ReplaceContent };

    Kind kind = Kind::IgnoreChanges;
    std::vector<int> targets; // ReplaceContent only

    static SyncDecision ignore_changes() { return {Kind::IgnoreChanges, {}}; }
    static SyncDecision set_as_origin() { return {Kind::SetAsOrigin, {}}; }
    static SyncDecision keep_both() { return {Kind::KeepBoth, {}}; }
    static SyncDecision replace_content(std::vector<int> targets) {
        return {Kind::ReplaceContent, std::move(targets)};
    }

    bool operator==(const SyncDecision&) const = default;
};

std::string_view to_string(SyncDecision::Kind kind);
/// {"decision": "ignore_changes"|"set_as_origin"|"keep_both"|"replace_content",
///  "targets": [int...]}; anything else raises Errc::invalid_decision.
SyncDecision sync_decision_from_json(const Json& j);
Json to_json(const SyncDecision& d);

struct SyncOutcome {
    /// The working slide after resolution: content restored for
    /// IgnoreChanges, lineage reference rebound for the other decisions.
    Slide slide;
};

struct SearchHit {
    Granularity granularity = Granularity::Slide;
    std::string entry_id;               // presentation and section hits
    std::optional<LineageRef> version;  // slide hits
    int score = 0;
    std::string snippet;
    Timestamp saved_at{};

    bool operator==(const SearchHit&) const = default;
};

struct AssetPut {
    std::string hash;
    bool created = false;
};

Json to_json(const RepositoryEntry& e);
RepositoryEntry entry_from_json(const Json& j);
Json to_json(const SlideLineage& l);
SlideLineage lineage_from_json(const Json& j);
Json to_json(const SearchHit& h);

/// The central slide repository. Safe for concurrent use: reads share a lock,
/// writes are serialized. Every value handed out is a copy.
class Repository {
public:
    Repository(std::unique_ptr<DocumentStore> store, Minter& minter = default_minter());

    /// Deep-copies the value into a new entry. Slides without a lineage
    /// reference start a new lineage (version 0) and the stored copy carries
    /// the new reference; existing references must resolve.
    RepositoryEntry save(const SavedValue& value,
                         std::optional<std::string> source_presentation_id = std::nullopt);

    /// Fresh-id deep copy of an entry's payload. Lineage references are kept.
    SavedValue import_copy(const std::string& entry_id) const;

    /// Fresh-id copy of a saved section inserted into `target`.
    Presentation import_into(const std::string& entry_id, const Presentation& target,
                             std::optional<std::size_t> position = std::nullopt) const;

    /// Fresh-id copy of a lineage version placed into a section.
    std::pair<Presentation, Slide> reuse_slide(const std::string& lineage_id, int version_index,
                                               const Presentation& target,
                                               std::string_view section_id,
                                               std::optional<std::size_t> position = std::nullopt) const;

    /// The lineage version a working slide was derived from.
    Slide base_of(const Slide& working) const;
    SlideDiff detect_changes(const Slide& working) const;

    SyncOutcome resolve_sync(const std::string& lineage_id, const Slide& working,
                             const SyncDecision& decision);

    std::vector<SearchHit> search(std::string_view query,
                                  std::optional<Granularity> granularity = std::nullopt) const;

    AssetPut put_asset(std::string_view bytes);
    std::optional<std::string> get_asset(const std::string& hash) const;
    bool has_asset(const std::string& hash) const;

    std::optional<RepositoryEntry> entry(const std::string& entry_id) const;
    std::optional<SlideLineage> lineage(const std::string& lineage_id) const;
    std::vector<RepositoryEntry> entries() const;   // by saved_at, then id
    std::vector<SlideLineage> lineages() const;     // by id

    /// SHA-256 over the canonical form of every entry, lineage and asset hash.
    std::string state_digest() const;

private:
    void register_slides(SavedValue& value, Timestamp now);
    void check_refs(const SavedValue& value) const;
    const SlideLineage& require_lineage(const std::string& lineage_id) const;
    const LineageVersion& require_version(const std::string& lineage_id, int version_index) const;
    void index_entry(const RepositoryEntry& e);
    void index_lineage(const SlideLineage& l);
    void persist_lineage(const SlideLineage& l);

    std::unique_ptr<DocumentStore> store_;
    Minter& minter_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, RepositoryEntry> entries_;
    std::map<std::string, SlideLineage> lineages_;
    SearchIndex index_;
};

} // namespace deckcraft
