#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "deckcraft/deck.hpp"
#include "deckcraft/error.hpp"

namespace deckcraft {

// Canonical JSON form. Keys are emitted in a fixed order so that
// serialize(deserialize(serialize(d))) is byte-identical to serialize(d).

Json to_json(const Element& e);
Json to_json(const Slide& s);
Json to_json(const Section& s);
Json to_json(const Presentation& p);
Json to_json(const Deck& d);
Json to_json(const AudienceProfile& a);
Json to_json(const Bounds& b);

// Structural parsing only: throws Errc::malformed_document (with a JSON
// pointer in details) when a key is missing or has the wrong type. Domain
// invariants are checked by validate().
Element element_from_json(const Json& j, const std::string& pointer = "");
Slide slide_from_json(const Json& j, const std::string& pointer = "");
Section section_from_json(const Json& j, const std::string& pointer = "");
Presentation presentation_from_json(const Json& j, const std::string& pointer = "");
AudienceProfile audience_from_json(const Json& j, const std::string& pointer = "");
Bounds bounds_from_json(const Json& j, const std::string& pointer = "");

struct Violation {
    std::string pointer; // RFC 6901 JSON pointer into the deck document
    std::string message;

    bool operator==(const Violation&) const = default;
};

std::vector<Violation> validate(const Deck& deck);
std::vector<Violation> validate(const Presentation& p, const std::string& pointer = "/presentation");

/// Parses the document and its schema version without checking invariants.
Deck parse_deck(std::string_view bytes);

std::string serialize(const Deck& deck);

/// parse_deck + validate. Invariant violations raise Errc::invalid_deck with
/// the violation list in details.
Deck deserialize(std::string_view bytes);

/// JSON text in the canonical layout (two-space indent, trailing newline).
std::string dump(const Json& j);

} // namespace deckcraft
