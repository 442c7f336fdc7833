#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "deckcraft/jargon.hpp"

namespace deckcraft {

/// One user message in, the assistant's text out. Throws
/// Error(Errc::provider_error) on transport failure.
class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

struct LiveProviderConfig {
    std::string api_url; // full chat-completions endpoint URL
    std::string api_key;
    std::string model = "gpt-4o-mini";
    std::chrono::seconds timeout{30};
    int retries = 1;

    /// Reads JARGON_API_URL, JARGON_API_KEY and JARGON_MODEL. Returns nullopt
    /// when none of them is set.
    static std::optional<LiveProviderConfig> from_env();
};

/// OpenAI-style chat-completions client over HTTP(S).
class HttpChatClient final : public ChatClient {
public:
    explicit HttpChatClient(LiveProviderConfig config);
    std::string complete(const std::string& prompt) override;

private:
    LiveProviderConfig config_;
    std::string origin_; // scheme://host[:port]
    std::string path_;
};

/// Parses model output as JSON. A failed parse gets exactly one repair
/// attempt (strip a markdown code fence, else take the outermost {...});
/// a second failure raises Errc::provider_error.
Json parse_model_json(std::string_view raw);

ExpandedAudienceContext audience_context_from_response(const Json& j,
                                                       std::string_view original_description);
std::vector<JargonTerm> jargon_terms_from_response(const Json& j);

/// Provider backed by a chat model, driven by the two prompt templates.
class LlmJargonProvider final : public JargonProvider {
public:
    explicit LlmJargonProvider(std::shared_ptr<ChatClient> client);

    ExpandedAudienceContext expand(const AudienceProfile& audience,
                                   const std::optional<std::string>& presentation_context) override;
    std::vector<JargonTerm> detect(std::string_view slide_title, std::string_view slide_text,
                                   const ExpandedAudienceContext& context,
                                   const std::optional<std::string>& presentation_context) override;

private:
    std::shared_ptr<ChatClient> client_;
};

} // namespace deckcraft
