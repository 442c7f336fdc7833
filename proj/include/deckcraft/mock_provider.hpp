#pragma once

#include <array>
#include <string>
#include <vector>

#include "deckcraft/jargon.hpp"

namespace deckcraft {

struct LexiconEntry {
    std::string term;
    int difficulty = 1; // 1..5, compared against the audience level
    std::string definition;
    std::array<std::string, 2> alternatives;

    bool operator==(const LexiconEntry&) const = default;
};

/// Parses a JSON list of {term, difficulty, definition, alternatives[2]}.
/// Shape errors raise Errc::malformed_document; case-insensitive duplicate
/// terms raise Errc::duplicate_lexicon_term.
std::vector<LexiconEntry> lexicon_from_json(const Json& j);
Json to_json(const std::vector<LexiconEntry>& lexicon);

/// Lexicon shipped with the service and CLI.
const std::vector<LexiconEntry>& default_lexicon();

/// Deterministic offline provider.
///
/// expand() keeps the user's level and lists every lexicon term at or below
/// it as known. detect() flags each lexicon term harder than the inferred
/// level at its first whole-word occurrence (case-sensitive match preferred,
/// then ASCII case-insensitive).
class MockJargonProvider final : public JargonProvider {
public:
    explicit MockJargonProvider(std::vector<LexiconEntry> lexicon);

    ExpandedAudienceContext expand(const AudienceProfile& audience,
                                   const std::optional<std::string>& presentation_context) override;
    std::vector<JargonTerm> detect(std::string_view slide_title, std::string_view slide_text,
                                   const ExpandedAudienceContext& context,
                                   const std::optional<std::string>& presentation_context) override;

    const std::vector<LexiconEntry>& lexicon() const { return lexicon_; }

private:
    std::vector<LexiconEntry> lexicon_;
};

} // namespace deckcraft
