#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <semaphore>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "deckcraft/deck.hpp"
#include "deckcraft/error.hpp"

namespace deckcraft {

/// Enriched audience model produced by the first pipeline stage. Field names
/// mirror the JSON keys the expansion prompt asks for.
struct ExpandedAudienceContext {
    std::string original_description;
    std::string expanded_description;
    int inferred_expertise_level = 3;
    std::vector<std::string> known_concepts;
    std::vector<std::string> likely_jargon;
    std::string domain_background;

    bool operator==(const ExpandedAudienceContext&) const = default;
};

/// A flagged span of the canonical slide text. Offsets count Unicode code
/// points; end_index is exclusive.
struct JargonTerm {
    std::string term;
    std::string definition;
    std::vector<std::string> alternatives; // exactly two once it leaves the pipeline
    std::size_t start_index = 0;
    std::size_t end_index = 0;
    bool hidden = false;

    bool operator==(const JargonTerm&) const = default;
};

Json to_json(const ExpandedAudienceContext& c);
Json to_json(const JargonTerm& t);
Json to_json(const std::vector<JargonTerm>& terms);

/// Both stages of jargon detection. Implementations return schema-valid
/// values or throw Error(Errc::provider_error).
class JargonProvider {
public:
    virtual ~JargonProvider() = default;

    virtual ExpandedAudienceContext expand(const AudienceProfile& audience,
                                           const std::optional<std::string>& presentation_context) = 0;

    virtual std::vector<JargonTerm> detect(std::string_view slide_title, std::string_view slide_text,
                                           const ExpandedAudienceContext& context,
                                           const std::optional<std::string>& presentation_context) = 0;
};

/// Caps the number of provider calls in flight across threads.
class BoundedProvider final : public JargonProvider {
public:
    static constexpr std::ptrdiff_t kMaxInFlight = 64;

    BoundedProvider(std::shared_ptr<JargonProvider> inner, std::ptrdiff_t max_in_flight = 4);

    ExpandedAudienceContext expand(const AudienceProfile& audience,
                                   const std::optional<std::string>& presentation_context) override;
    std::vector<JargonTerm> detect(std::string_view slide_title, std::string_view slide_text,
                                   const ExpandedAudienceContext& context,
                                   const std::optional<std::string>& presentation_context) override;

private:
    std::shared_ptr<JargonProvider> inner_;
    std::counting_semaphore<kMaxInFlight> slots_;
};

// ---- text helpers ---------------------------------------------------------

/// Title (when present and non-empty) followed by each text element's
/// content, joined with '\n'. All jargon offsets index into this string.
std::string canonical_slide_text(const Slide& slide);

std::size_t codepoint_length(std::string_view utf8);
/// Code-point range [start, end) of a UTF-8 string; nullopt when out of range.
std::optional<std::string_view> codepoint_substr(std::string_view utf8, std::size_t start,
                                                 std::size_t end);
std::string ascii_fold(std::string_view text);

// ---- hide state -----------------------------------------------------------

/// Terms a presenter has dismissed for one slide. Matching is ASCII
/// case-insensitive.
struct HideState {
    std::set<std::string> hidden_terms; // folded
    bool all_hidden = false;

    bool hides(std::string_view term) const;
    bool operator==(const HideState&) const = default;
};

HideState hide_term(HideState state, std::string_view term);
HideState hide_all(HideState state);
HideState reset_hidden(HideState state);

Json to_json(const HideState& s);

// ---- pipeline -------------------------------------------------------------

/// Calls the provider's expansion stage and normalizes the result: the level
/// is clamped into [1,5] and the original description is filled in.
ExpandedAudienceContext expand_audience_context(JargonProvider& provider,
                                                const AudienceProfile& audience,
                                                const std::optional<std::string>& presentation_context = std::nullopt);

/// Rebinds each term to where it actually occurs in `slide_text`: first the
/// given indices, then the first case-sensitive occurrence, then the first
/// case-insensitive one. Terms that occur nowhere are dropped, as are exact
/// duplicates. Output is ordered by position.
std::vector<JargonTerm> validate_and_repair_indices(std::string_view slide_text,
                                                    std::vector<JargonTerm> terms);

/// Runs detection on the slide's canonical text, then repairs indices, drops
/// terms the audience already knows, drops hidden terms, and keeps only terms
/// with at least two alternatives (trimmed to exactly two).
std::vector<JargonTerm> detect_jargon(JargonProvider& provider, const Slide& slide,
                                      const ExpandedAudienceContext& context,
                                      const HideState& hidden = {},
                                      const std::optional<std::string>& presentation_context = std::nullopt);

} // namespace deckcraft
