#include "deckcraft/jargon.hpp"

#include <algorithm>

namespace deckcraft {

namespace {

bool continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

/// Byte offset of the code point with index `cp`, or npos past the end.
std::size_t byte_offset(std::string_view utf8, std::size_t cp) {
    std::size_t seen = 0;
    for (std::size_t i = 0; i < utf8.size(); ++i) {
        if (continuation(static_cast<unsigned char>(utf8[i]))) continue;
        if (seen == cp) return i;
        ++seen;
    }
    return seen == cp ? utf8.size() : std::string_view::npos;
}

std::size_t codepoints_before(std::string_view utf8, std::size_t byte) {
    return codepoint_length(utf8.substr(0, byte));
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

class SlotGuard {
public:
    explicit SlotGuard(std::counting_semaphore<BoundedProvider::kMaxInFlight>& s) : s_(s) { s_.acquire(); }
    ~SlotGuard() { s_.release(); }
    SlotGuard(const SlotGuard&) = delete;
    SlotGuard& operator=(const SlotGuard&) = delete;

private:
    std::counting_semaphore<BoundedProvider::kMaxInFlight>& s_;
};

} // namespace

Json to_json(const ExpandedAudienceContext& c) {
    return Json{{"original_description", c.original_description},
                {"expanded_description", c.expanded_description},
                {"inferred_expertise_level", c.inferred_expertise_level},
                {"known_concepts", c.known_concepts},
                {"likely_jargon", c.likely_jargon},
                {"domain_background", c.domain_background}};
}

Json to_json(const JargonTerm& t) {
    return Json{{"term", t.term},
                {"definition", t.definition},
                {"alternatives", t.alternatives},
                {"start_index", t.start_index},
                {"end_index", t.end_index},
                {"hidden", t.hidden}};
}

Json to_json(const std::vector<JargonTerm>& terms) {
    Json out = Json::array();
    for (const auto& t : terms) out.push_back(to_json(t));
    return out;
}

BoundedProvider::BoundedProvider(std::shared_ptr<JargonProvider> inner, std::ptrdiff_t max_in_flight)
    : inner_(std::move(inner)), slots_(std::clamp<std::ptrdiff_t>(max_in_flight, 1, kMaxInFlight)) {}

ExpandedAudienceContext BoundedProvider::expand(const AudienceProfile& audience,
                                                const std::optional<std::string>& presentation_context) {
    SlotGuard guard(slots_);
    return inner_->expand(audience, presentation_context);
}

std::vector<JargonTerm> BoundedProvider::detect(std::string_view slide_title, std::string_view slide_text,
                                                const ExpandedAudienceContext& context,
                                                const std::optional<std::string>& presentation_context) {
    SlotGuard guard(slots_);
    return inner_->detect(slide_title, slide_text, context, presentation_context);
}

std::string canonical_slide_text(const Slide& slide) {
    std::vector<std::string_view> parts;
    if (slide.title && !slide.title->empty()) parts.push_back(*slide.title);
    for (const auto& e : slide.elements)
        if (e.kind == ElementKind::Text) parts.push_back(e.content);
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.push_back('\n');
        out.append(parts[i]);
    }
    return out;
}

std::size_t codepoint_length(std::string_view utf8) {
    return static_cast<std::size_t>(std::count_if(utf8.begin(), utf8.end(), [](char c) {
        return !continuation(static_cast<unsigned char>(c));
    }));
}

std::optional<std::string_view> codepoint_substr(std::string_view utf8, std::size_t start,
                                                 std::size_t end) {
    if (start > end) return std::nullopt;
    std::size_t b = byte_offset(utf8, start);
    std::size_t e = byte_offset(utf8, end);
    if (b == std::string_view::npos || e == std::string_view::npos) return std::nullopt;
    return utf8.substr(b, e - b);
}

std::string ascii_fold(std::string_view text) {
    std::string out(text);
    for (auto& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

bool HideState::hides(std::string_view term) const {
    return all_hidden || hidden_terms.count(ascii_fold(trim(term))) > 0;
}

HideState hide_term(HideState state, std::string_view term) {
    std::string folded = ascii_fold(trim(term));
    if (!folded.empty()) state.hidden_terms.insert(std::move(folded));
    return state;
}

HideState hide_all(HideState state) {
    state.all_hidden = true;
    return state;
}

HideState reset_hidden(HideState) { return HideState{}; }

Json to_json(const HideState& s) {
    return Json{{"hidden_terms", Json(std::vector<std::string>(s.hidden_terms.begin(), s.hidden_terms.end()))},
                {"all_hidden", s.all_hidden}};
}

ExpandedAudienceContext expand_audience_context(JargonProvider& provider,
                                                const AudienceProfile& audience,
                                                const std::optional<std::string>& presentation_context) {
    require_valid_audience(audience);
    ExpandedAudienceContext ctx = provider.expand(audience, presentation_context);
    ctx.inferred_expertise_level = std::clamp(ctx.inferred_expertise_level, 1, 5);
    if (ctx.original_description.empty()) ctx.original_description = audience.description;
    if (trim(ctx.expanded_description).empty())
        throw Error(Errc::provider_error, "audience expansion returned an empty description");
    return ctx;
}

std::vector<JargonTerm> validate_and_repair_indices(std::string_view slide_text,
                                                    std::vector<JargonTerm> terms) {
    std::vector<JargonTerm> out;
    const std::string folded_text = ascii_fold(slide_text);
    for (auto& t : terms) {
        if (t.term.empty()) continue;
        if (t.start_index < t.end_index) {
            auto span = codepoint_substr(slide_text, t.start_index, t.end_index);
            if (span && *span == t.term) {
                out.push_back(std::move(t));
                continue;
            }
        }
        std::size_t byte = slide_text.find(t.term);
        if (byte == std::string_view::npos) {
            byte = folded_text.find(ascii_fold(t.term));
            if (byte == std::string::npos) continue;
            // ASCII folding preserves byte length, so the span is the same size.
            t.term = std::string(slide_text.substr(byte, t.term.size()));
        }
        t.start_index = codepoints_before(slide_text, byte);
        t.end_index = t.start_index + codepoint_length(t.term);
        out.push_back(std::move(t));
    }
    std::stable_sort(out.begin(), out.end(), [](const JargonTerm& a, const JargonTerm& b) {
        if (a.start_index != b.start_index) return a.start_index < b.start_index;
        return a.end_index < b.end_index;
    });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const JargonTerm& a, const JargonTerm& b) {
                              return a.start_index == b.start_index && a.end_index == b.end_index;
                          }),
              out.end());
    return out;
}

std::vector<JargonTerm> detect_jargon(JargonProvider& provider, const Slide& slide,
                                      const ExpandedAudienceContext& context, const HideState& hidden,
                                      const std::optional<std::string>& presentation_context) {
    const std::string text = canonical_slide_text(slide);
    if (trim(text).empty()) throw Error(Errc::empty_slide, "slide '" + slide.id + "' has no text to check");

    auto raw = provider.detect(slide.title.value_or(""), text, context, presentation_context);
    // Filter before repair so a malformed duplicate cannot shadow a usable term at the same span.
    std::erase_if(raw, [](const JargonTerm& t) { return t.alternatives.size() < 2; });
    auto repaired = validate_and_repair_indices(text, std::move(raw));

    std::set<std::string> known;
    for (const auto& c : context.known_concepts) known.insert(ascii_fold(trim(c)));

    std::vector<JargonTerm> out;
    for (auto& t : repaired) {
        if (known.count(ascii_fold(trim(t.term)))) continue;
        if (hidden.hides(t.term)) continue;
        t.alternatives.resize(2);
        t.hidden = false;
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace deckcraft
