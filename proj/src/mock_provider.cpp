#include "deckcraft/mock_provider.hpp"

#include <algorithm>
#include <set>

namespace deckcraft {

namespace {

constexpr const char* kDefaultLexicon = R"lexicon([
  {"term": "Heavy Media Multitaskers (HMMs)", "difficulty": 4,
   "definition": "People who regularly use several media streams at the same time, such as texting while watching videos.",
   "alternatives": ["frequent media users", "people who multitask with media"]},
  {"term": "task-switching cost", "difficulty": 4,
   "definition": "The time and accuracy lost each time attention moves from one task to another.",
   "alternatives": ["time lost when switching tasks", "the price of jumping between tasks"]},
  {"term": "working memory", "difficulty": 4,
   "definition": "The small amount of information the mind can hold and use at one moment.",
   "alternatives": ["short-term memory", "mental scratchpad"]},
  {"term": "cognitive load", "difficulty": 4,
   "definition": "How much mental effort a task demands.",
   "alternatives": ["mental effort", "brain workload"]},
  {"term": "executive function", "difficulty": 5,
   "definition": "The set of mental skills used to plan, focus attention, and juggle tasks.",
   "alternatives": ["self-management skills", "planning and focus skills"]},
  {"term": "attentional control", "difficulty": 5,
   "definition": "The ability to choose what to pay attention to and ignore distractions.",
   "alternatives": ["focus control", "ability to stay focused"]},
  {"term": "neural network", "difficulty": 4,
   "definition": "A computer model loosely inspired by the brain that learns patterns from data.",
   "alternatives": ["learning computer model", "pattern-learning program"]},
  {"term": "productivity", "difficulty": 1,
   "definition": "How much useful work gets done.",
   "alternatives": ["output", "getting things done"]},
  {"term": "multitasking", "difficulty": 1,
   "definition": "Doing more than one thing at the same time.",
   "alternatives": ["doing several things at once", "juggling tasks"]},
  {"term": "smartphone", "difficulty": 1,
   "definition": "A mobile phone that runs apps.",
   "alternatives": ["phone", "mobile phone"]}
])lexicon";

bool word_char(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

bool whole_word_at(std::string_view text, std::size_t pos, std::size_t len) {
    // Only enforce a boundary where the term itself starts/ends with a word character.
    if (pos > 0 && word_char(static_cast<unsigned char>(text[pos])) &&
        word_char(static_cast<unsigned char>(text[pos - 1])))
        return false;
    std::size_t end = pos + len;
    if (end < text.size() && word_char(static_cast<unsigned char>(text[end - 1])) &&
        word_char(static_cast<unsigned char>(text[end])))
        return false;
    return true;
}

std::size_t find_word(std::string_view haystack, std::string_view needle) {
    for (std::size_t pos = haystack.find(needle); pos != std::string_view::npos;
         pos = haystack.find(needle, pos + 1))
        if (whole_word_at(haystack, pos, needle.size())) return pos;
    return std::string_view::npos;
}

} // namespace

std::vector<LexiconEntry> lexicon_from_json(const Json& j) {
    auto bad = [](const std::string& pointer, const std::string& what) {
        return Error(Errc::malformed_document, "lexicon " + what + " at '" + pointer + "'",
                     Json{{"pointer", pointer}});
    };
    if (!j.is_array()) throw bad("", "must be a JSON list");
    std::vector<LexiconEntry> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const Json& item = j[i];
        std::string p = "/" + std::to_string(i);
        if (!item.is_object()) throw bad(p, "entry must be an object");
        if (!item.contains("term") || !item["term"].is_string() || item["term"].get<std::string>().empty())
            throw bad(p + "/term", "entry needs a non-empty term");
        if (!item.contains("difficulty") || !item["difficulty"].is_number_integer())
            throw bad(p + "/difficulty", "difficulty must be an integer");
        int difficulty = item["difficulty"].get<int>();
        if (difficulty < 1 || difficulty > 5) throw bad(p + "/difficulty", "difficulty must be in [1,5]");
        if (!item.contains("definition") || !item["definition"].is_string())
            throw bad(p + "/definition", "definition must be a string");
        if (!item.contains("alternatives") || !item["alternatives"].is_array() ||
            item["alternatives"].size() != 2 || !item["alternatives"][0].is_string() ||
            !item["alternatives"][1].is_string())
            throw bad(p + "/alternatives", "alternatives must be a list of exactly two strings");

        LexiconEntry e;
        e.term = item["term"].get<std::string>();
        e.difficulty = difficulty;
        e.definition = item["definition"].get<std::string>();
        e.alternatives = {item["alternatives"][0].get<std::string>(),
                          item["alternatives"][1].get<std::string>()};
        if (!seen.insert(ascii_fold(e.term)).second)
            throw Error(Errc::duplicate_lexicon_term, "duplicate lexicon term '" + e.term + "'");
        out.push_back(std::move(e));
    }
    return out;
}

Json to_json(const std::vector<LexiconEntry>& lexicon) {
    Json out = Json::array();
    for (const auto& e : lexicon)
        out.push_back(Json{{"term", e.term},
                           {"difficulty", e.difficulty},
                           {"definition", e.definition},
                           {"alternatives", {e.alternatives[0], e.alternatives[1]}}});
    return out;
}

const std::vector<LexiconEntry>& default_lexicon() {
    static const std::vector<LexiconEntry> lexicon = lexicon_from_json(Json::parse(kDefaultLexicon));
    return lexicon;
}

MockJargonProvider::MockJargonProvider(std::vector<LexiconEntry> lexicon) : lexicon_(std::move(lexicon)) {
    std::set<std::string> seen;
    for (const auto& e : lexicon_)
        if (!seen.insert(ascii_fold(e.term)).second)
            throw Error(Errc::duplicate_lexicon_term, "duplicate lexicon term '" + e.term + "'");
}

ExpandedAudienceContext MockJargonProvider::expand(const AudienceProfile& audience,
                                                   const std::optional<std::string>&) {
    ExpandedAudienceContext ctx;
    ctx.original_description = audience.description;
    ctx.expanded_description = "Audience described as \"" + audience.description +
                               "\" with self-reported expertise " +
                               std::to_string(audience.expertise_level) + "/5.";
    ctx.inferred_expertise_level = audience.expertise_level;
    for (const auto& e : lexicon_) {
        if (e.difficulty <= audience.expertise_level) ctx.known_concepts.push_back(e.term);
        else ctx.likely_jargon.push_back(e.term);
    }
    ctx.domain_background = audience.description;
    return ctx;
}

std::vector<JargonTerm> MockJargonProvider::detect(std::string_view, std::string_view slide_text,
                                                   const ExpandedAudienceContext& context,
                                                   const std::optional<std::string>&) {
    const std::string folded = ascii_fold(slide_text);
    std::vector<JargonTerm> out;
    for (const auto& e : lexicon_) {
        if (e.difficulty <= context.inferred_expertise_level) continue;
        std::size_t pos = find_word(slide_text, e.term);
        if (pos == std::string_view::npos) pos = find_word(folded, ascii_fold(e.term));
        if (pos == std::string_view::npos) continue;
        JargonTerm t;
        t.term = std::string(slide_text.substr(pos, e.term.size()));
        t.definition = e.definition;
        t.alternatives = {e.alternatives[0], e.alternatives[1]};
        t.start_index = codepoint_length(slide_text.substr(0, pos));
        t.end_index = t.start_index + codepoint_length(t.term);
        out.push_back(std::move(t));
    }
    std::stable_sort(out.begin(), out.end(), [](const JargonTerm& a, const JargonTerm& b) {
        return a.start_index < b.start_index;
    });
    return out;
}

} // namespace deckcraft
