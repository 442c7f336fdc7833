#include "doctest.h"

#include "deckcraft/prompts.hpp"
#include "properties.hpp"

using namespace deckcraft;

namespace {

ExpandedAudienceContext context() {
    ExpandedAudienceContext c;
    c.original_description = "parents";
    c.expanded_description = "Parents of teenagers.";
    c.inferred_expertise_level = 2;
    c.known_concepts = {"apps", "screen time"};
    c.likely_jargon = {"dopamine loop"};
    c.domain_background = "Various";
    return c;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("rendered prompts equal the golden files") {
    auto outcome = props::prompt_fidelity(DECKCRAFT_GOLDEN_DIR);
    CHECK_MESSAGE(outcome.passed, outcome.detail);
    CHECK(outcome.cases == 6);
}

TEST_CASE("audience prompt embeds the description and level") {
    auto p = render_audience_prompt("night-shift nurses", 2);
    CHECK(contains(p, "ORIGINAL AUDIENCE DESCRIPTION: \"night-shift nurses\""));
    CHECK(contains(p, "USER-PROVIDED EXPERTISE LEVEL: 2/5"));
}

TEST_CASE("jargon prompt lists known concepts and likely jargon") {
    auto p = render_jargon_prompt(context(), "Screens", "Screens\nTalk about apps.", std::string("Family life"));
    CHECK(contains(p, "- apps\n- screen time\n"));
    CHECK(contains(p, "- dopamine loop\n"));
    CHECK(contains(p, "Title: Screens\nContent: Screens\nTalk about apps.\n"));
    CHECK(contains(p, "Consider the expertise level (2/5) carefully"));
    CHECK(contains(p, "- Presentation Context: Family life\n"));
}

TEST_CASE("jargon prompt falls back for missing pieces") {
    auto c = context();
    c.known_concepts.clear();
    c.likely_jargon.clear();
    auto p = render_jargon_prompt(c, "", "text", std::nullopt);
    CHECK(contains(p, "- No specific known concepts provided"));
    CHECK(contains(p, "- No specific jargon areas identified"));
    CHECK(contains(p, "Title: Untitled"));
    CHECK_FALSE(contains(p, "Presentation Context"));
    CHECK_FALSE(contains(render_jargon_prompt(c, "", "text", std::string()), "Presentation Context"));
}
