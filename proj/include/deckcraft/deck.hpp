#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "deckcraft/minter.hpp"

namespace deckcraft {

using Seconds = std::chrono::seconds;

inline constexpr Seconds kDefaultSectionDuration{120};

struct AudienceProfile {
    int expertise_level = 3; // 1 (novice) .. 5 (expert)
    std::string description;

    bool operator==(const AudienceProfile&) const = default;
};

/// Ordered None < Low < Medium < High. None never takes part in conflict checks.
enum class Emphasis { None = 0, Low = 1, Medium = 2, High = 3 };

std::string_view to_string(Emphasis e);
std::optional<Emphasis> parse_emphasis(std::string_view text);

enum class ElementKind { Text, Image };

std::string_view to_string(ElementKind k);
std::optional<ElementKind> parse_element_kind(std::string_view text);

/// Normalized slide coordinates; the whole box lies inside the unit square.
struct Bounds {
    double x = 0.0;
    double y = 0.0;
    double w = 1.0;
    double h = 1.0;

    bool operator==(const Bounds&) const = default;
};

bool bounds_valid(const Bounds& b);

struct Element {
    std::string id;
    ElementKind kind = ElementKind::Text;
    std::string content; // text, or sha256 asset hash for images
    Bounds bounds;

    bool operator==(const Element&) const = default;
};

struct LineageRef {
    std::string lineage_id;
    int version_index = 0;

    bool operator==(const LineageRef&) const = default;
};

struct Slide {
    std::string id;
    std::optional<std::string> title;
    std::vector<Element> elements;
    std::optional<LineageRef> lineage_ref;

    bool operator==(const Slide&) const = default;
};

struct Section {
    std::string id;
    std::string title;
    Seconds duration = kDefaultSectionDuration;
    Emphasis emphasis = Emphasis::None;
    std::vector<Slide> slides;

    bool operator==(const Section&) const = default;
};

struct Presentation {
    std::string id;
    std::string title;
    Seconds total_duration{0};
    AudienceProfile audience;
    std::vector<Section> sections;
    Timestamp created_at{};
    std::optional<std::string> topic;

    bool operator==(const Presentation&) const = default;
};

inline constexpr int kDeckSchemaVersion = 1;

struct Deck {
    int schema_version = kDeckSchemaVersion;
    Presentation presentation;

    bool operator==(const Deck&) const = default;
};

// ---- validation helpers ---------------------------------------------------

void require_valid_duration(Seconds d);
void require_valid_audience(const AudienceProfile& audience);

// ---- construction ---------------------------------------------------------

Presentation create_presentation(std::string title, Seconds total_duration,
                                 AudienceProfile audience,
                                 std::optional<std::string> topic = std::nullopt,
                                 Minter& minter = default_minter());

struct PresentationPatch {
    std::optional<std::string> title;
    std::optional<Seconds> total_duration;
    std::optional<AudienceProfile> audience;
    std::optional<std::string> topic;
};

Presentation update_presentation(const Presentation& p, const PresentationPatch& patch);

struct SectionSpec {
    std::string title;
    std::optional<Seconds> duration;
    std::optional<Emphasis> emphasis;
    std::optional<std::size_t> position;
};

/// Returns the updated presentation and the section that was inserted.
std::pair<Presentation, Section> add_section(const Presentation& p, SectionSpec spec,
                                             Minter& minter = default_minter());

/// Inserts an already-built section (e.g. an imported copy). Default position: end.
Presentation insert_section(const Presentation& p, Section section,
                            std::optional<std::size_t> position = std::nullopt);

struct SectionPatch {
    std::optional<std::string> title;
    std::optional<Seconds> duration;
    std::optional<Emphasis> emphasis;
};

Presentation update_section(const Presentation& p, std::string_view section_id,
                            const SectionPatch& patch);

Presentation remove_section(const Presentation& p, std::string_view section_id);

Presentation reorder_sections(const Presentation& p, const std::vector<std::string>& new_order);

// ---- slides and elements --------------------------------------------------

struct ElementSpec {
    ElementKind kind = ElementKind::Text;
    std::string content;
    Bounds bounds;
};

Element make_element(ElementSpec spec, Minter& minter = default_minter());

Slide make_slide(std::optional<std::string> title, std::vector<ElementSpec> elements,
                 Minter& minter = default_minter());

Presentation insert_slide(const Presentation& p, std::string_view section_id, Slide slide,
                          std::optional<std::size_t> position = std::nullopt);

Presentation move_slide(const Presentation& p, std::string_view slide_id,
                        std::string_view target_section_id, std::size_t position);

/// Replaces the slide with the same id, wherever it lives.
Presentation replace_slide(const Presentation& p, Slide slide);

Presentation remove_slide(const Presentation& p, std::string_view slide_id);

struct ElementEdit {
    std::optional<std::string> content;
    std::optional<Bounds> bounds;
};

Slide edit_element(const Slide& slide, std::string_view element_id, const ElementEdit& edit);
Slide add_element(const Slide& slide, Element element);
Slide remove_element(const Slide& slide, std::string_view element_id);
Slide set_slide_title(const Slide& slide, std::optional<std::string> title);

// ---- lookup ---------------------------------------------------------------

const Section* find_section(const Presentation& p, std::string_view section_id);
const Slide* find_slide(const Presentation& p, std::string_view slide_id);
/// Id of the section holding the slide, if any.
const Section* section_of_slide(const Presentation& p, std::string_view slide_id);

Seconds sum_of_durations(const Presentation& p);

/// Deep copy with fresh ids at every level. Lineage references are kept.
/// A copied element's id is derive_id(new slide id, original element id), so
/// the copy stays traceable to the version it came from.
Slide copy_with_fresh_ids(const Slide& slide, Minter& minter);
Section copy_with_fresh_ids(const Section& section, Minter& minter);
Presentation copy_with_fresh_ids(const Presentation& p, Minter& minter);

} // namespace deckcraft
