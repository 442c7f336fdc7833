#include "deckcraft/prompts.hpp"

namespace deckcraft {

namespace {

constexpr std::string_view kAudienceHead =
    R"(You are an expert at understanding audience descriptions for presentations.
Analyze this audience description and provide detailed context that will help with jargon detection.

ORIGINAL AUDIENCE DESCRIPTION: ")";

constexpr std::string_view kAudienceLevel = R"("
USER-PROVIDED EXPERTISE LEVEL: )";

constexpr std::string_view kAudienceTail = R"(/5

Your task: Expand this into a detailed profile that clearly explains what this audience would and would not know.

Respond in JSON format:
{
  "expandedDescription": "Detailed 2-3 sentence description of their background and knowledge level",
  "inferredExpertiseLevel": number (1-5, can adjust user's estimate if clearly wrong),
  "knownConcepts": ["concept1", "concept2", "concept3"],
  "likelyJargon": ["term1", "term2", "term3"],
  "domainBackground": "Their field/industry background"
}

EXAMPLES:

Input: "NLP professor"
Output: {
  "expandedDescription": "Computer Science professor specializing in Natural Language Processing research. Has PhD-level expertise in machine learning, deep learning, linguistics, and computational methods. Familiar with all standard ML algorithms, programming concepts, and academic research terminology.",
  "inferredExpertiseLevel": 5,
  "knownConcepts": ["machine learning", "neural networks", "transformers", "BERT", "random forest", "SVM", "tokenization", "embeddings", "algorithms", "APIs", "frameworks", "deep learning", "statistical models"],
  "likelyJargon": ["novel architectures from 2024", "proprietary model names", "company-specific tools", "bleeding-edge research terms"],
  "domainBackground": "Computer Science academia with focus on NLP/AI research"
}

Input: "undergrad freshman no programming experience"
Output: {
  "expandedDescription": "First-year undergraduate student with no prior programming or computer science background. Familiar with basic technology use (smartphones, apps, social media) but unfamiliar with technical concepts, programming terminology, or how software systems work.",
  "inferredExpertiseLevel": 1,
  "knownConcepts": ["apps", "websites", "social media", "AI tools like ChatGPT", "smartphones", "basic internet concepts"],
  "likelyJargon": ["programming terms", "algorithms", "databases", "machine learning", "neural networks", "APIs", "coding concepts"],
  "domainBackground": "General education, non-technical"
}

Be specific about what they would know vs. what would be jargon.
Focus on their domain expertise.)";

std::string bullet_list(const std::vector<std::string>& items, std::string_view fallback) {
    if (items.empty()) return std::string(fallback);
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += '\n';
        out += "- ";
        out += items[i];
    }
    return out;
}

} // namespace

std::string render_audience_prompt(std::string_view original_description, int user_expertise_level) {
    std::string out;
    out += kAudienceHead;
    out += original_description;
    out += kAudienceLevel;
    out += std::to_string(user_expertise_level);
    out += kAudienceTail;
    return out;
}

std::string render_jargon_prompt(const ExpandedAudienceContext& ctx, std::string_view slide_title,
                                 std::string_view slide_text,
                                 const std::optional<std::string>& presentation_context) {
    const std::string level = std::to_string(ctx.inferred_expertise_level);
    std::string out;
    out += "Analyze this slide content for jargon terms that would confuse the specified audience.\n\n";
    out += "AUDIENCE PROFILE:\n";
    out += "- Original Description: \"" + ctx.original_description + "\"\n";
    out += "- Detailed Profile: " + ctx.expanded_description + "\n";
    out += "- Expertise Level: " + level + "/5\n";
    out += "- Domain Background: " + ctx.domain_background + "\n";
    // The context line collapses to an empty line when there is no context.
    if (presentation_context && !presentation_context->empty())
        out += "- Presentation Context: " + *presentation_context;
    out += "\n\n";
    out += "WHAT THIS AUDIENCE KNOWS:\n";
    out += bullet_list(ctx.known_concepts, "- No specific known concepts provided");
    out += "\n\n";
    out += "LIKELY JARGON FOR THIS AUDIENCE:\n";
    out += bullet_list(ctx.likely_jargon, "- No specific jargon areas identified");
    out += "\n\n";
    out += "SLIDE CONTENT TO ANALYZE:\n";
    out += "Title: " + (slide_title.empty() ? std::string("Untitled") : std::string(slide_title)) + "\n";
    out += "Content: " + std::string(slide_text) + "\n\n";
    out += "CRITICAL INSTRUCTIONS:\n";
    out += "1. Use the detailed audience profile to determine what would be jargon\n";
    out += "2. If a term is in the \"WHAT THIS AUDIENCE KNOWS\" list, it's NOT jargon\n";
    out += "3. If a term is similar to items in \"LIKELY JARGON\" list, it probably IS jargon\n";
    out += "4. Consider the expertise level (" + level + "/5) carefully\n";
    out += "5. Only flag terms that would genuinely prevent understanding\n\n";
    out += "EXPERTISE LEVEL GUIDELINES:\n";
    out += "- Level 1-2: Most technical terms are jargon, but common tech words (AI, app, website) are okay\n";
    out += "- Level 3: Specialized and domain-specific terms are jargon\n";
    out += "- Level 4: Only cutting-edge or highly specialized terms are jargon\n";
    out += "- Level 5: Only the most novel, bleeding-edge, or extremely specialized terms are jargon\n\n";
    out += "IMPORTANT: \n";
    out += "- For professors/experts (Level 4-5): Very few terms should be jargon\n";
    out += "- For beginners (Level 1-2): Many technical terms will be jargon\n";
    out += "- Focus on the audience's specific domain background: " + ctx.domain_background + "\n\n";
    out += "Respond with JSON only (no markdown):\n";
    out += R"({
  "jargonTerms": [
    {
      "term": "exact term from text",
      "definition": "Clear explanation appropriate for this audience",
      "alternatives": ["simpler alternative 1", "accessible phrase 2"],
      "startIndex": number,
      "endIndex": number
    }
  ]
})";
    return out;
}

} // namespace deckcraft
