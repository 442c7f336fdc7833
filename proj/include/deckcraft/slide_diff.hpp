#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "deckcraft/deck.hpp"
#include "deckcraft/error.hpp"

namespace deckcraft {

enum class ChangedField { Content, Bounds, Kind };

std::string_view to_string(ChangedField f);

struct ModifiedElement {
    std::string element_id;
    std::vector<ChangedField> fields; // subset of {content, bounds, kind}, in that order

    bool operator==(const ModifiedElement&) const = default;
};

/// Element-id keyed difference of a working slide against a base slide.
///
/// `added` follows the working slide's element order, `removed` the base
/// slide's. `order_changed` is set when the elements present on both sides
/// appear in a different relative order; together with the other fields it
/// makes an empty diff equivalent to structural equality of the two slides
/// (slide id and lineage reference excluded).
struct SlideDiff {
    std::vector<std::string> added;
    std::vector<std::string> removed;
    std::vector<ModifiedElement> modified;
    bool title_changed = false;
    bool order_changed = false;

    bool empty() const {
        return added.empty() && removed.empty() && modified.empty() && !title_changed &&
               !order_changed;
    }
    bool operator==(const SlideDiff&) const = default;
};

SlideDiff diff_slides(const Slide& working, const Slide& base);

Json to_json(const SlideDiff& diff);

} // namespace deckcraft
