#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "deckcraft/jargon.hpp"

namespace deckcraft {

/// First stage: asks the model to expand a terse audience description into
/// a detailed profile.
std::string render_audience_prompt(std::string_view original_description, int user_expertise_level);

/// Second stage: asks the model to flag jargon in one slide for the expanded
/// audience. `slide_text` is the canonical slide text the indices refer to.
std::string render_jargon_prompt(const ExpandedAudienceContext& context, std::string_view slide_title,
                                 std::string_view slide_text,
                                 const std::optional<std::string>& presentation_context);

} // namespace deckcraft
