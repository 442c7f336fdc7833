#include "deckcraft/llm_provider.hpp"

#include <cmath>
#include <cstdlib>

#include "httplib.h"

#include "deckcraft/prompts.hpp"

namespace deckcraft {

namespace {

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
}

std::string strip_fence(std::string_view raw) {
    auto open = raw.find("```");
    if (open == std::string_view::npos) return {};
    auto body = raw.find('\n', open);
    if (body == std::string_view::npos) return {};
    auto close = raw.find("```", body + 1);
    if (close == std::string_view::npos) return {};
    return std::string(raw.substr(body + 1, close - body - 1));
}

std::vector<std::string> string_list(const Json& j, const char* key) {
    std::vector<std::string> out;
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return out;
    if (!it->is_array())
        throw Error(Errc::provider_error, std::string("model response field '") + key + "' is not a list");
    for (const auto& v : *it)
        if (v.is_string()) out.push_back(v.get<std::string>());
    return out;
}

std::size_t index_field(const Json& item, const char* key) {
    auto it = item.find(key);
    if (it == item.end() || !it->is_number()) return 0;
    double v = it->get<double>();
    if (!(v >= 0.0) || v > 1e9) return 0;
    return static_cast<std::size_t>(v);
}

} // namespace

std::optional<LiveProviderConfig> LiveProviderConfig::from_env() {
    auto url = env("JARGON_API_URL");
    auto key = env("JARGON_API_KEY");
    auto model = env("JARGON_MODEL");
    if (!url && !key && !model) return std::nullopt;
    LiveProviderConfig c;
    c.api_url = url.value_or("https://api.openai.com/v1/chat/completions");
    c.api_key = key.value_or("");
    if (model) c.model = *model;
    return c;
}

HttpChatClient::HttpChatClient(LiveProviderConfig config) : config_(std::move(config)) {
    if (config_.api_key.empty())
        throw Error(Errc::provider_error, "live jargon provider needs JARGON_API_KEY");
    auto scheme_end = config_.api_url.find("://");
    if (scheme_end == std::string::npos)
        throw Error(Errc::provider_error, "JARGON_API_URL must be an absolute http(s) URL");
    auto path_start = config_.api_url.find('/', scheme_end + 3);
    origin_ = config_.api_url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : config_.api_url.substr(path_start);
}

std::string HttpChatClient::complete(const std::string& prompt) {
    Json body{{"model", config_.model},
              {"messages", Json::array({Json{{"role", "user"}, {"content", prompt}}})}};
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        httplib::Client client(origin_);
        client.set_connection_timeout(config_.timeout);
        client.set_read_timeout(config_.timeout);
        client.set_write_timeout(config_.timeout);
        client.set_bearer_token_auth(config_.api_key);
        auto res = client.Post(path_, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw Error(Errc::provider_error, "chat endpoint answered HTTP " + std::to_string(res->status));
        try {
            Json reply = Json::parse(res->body);
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const Json::exception& e) {
            throw Error(Errc::provider_error, std::string("unexpected chat endpoint reply: ") + e.what());
        }
    }
    throw Error(Errc::provider_error, "chat endpoint unavailable (" + last_error + ")");
}

Json parse_model_json(std::string_view raw) {
    try {
        return Json::parse(raw);
    } catch (const Json::parse_error&) {
    }
    std::string repaired = strip_fence(raw);
    if (repaired.empty()) {
        auto open = raw.find('{');
        auto close = raw.rfind('}');
        if (open != std::string_view::npos && close != std::string_view::npos && close > open)
            repaired = std::string(raw.substr(open, close - open + 1));
    }
    try {
        return Json::parse(repaired);
    } catch (const Json::parse_error& e) {
        throw Error(Errc::provider_error, std::string("model reply is not JSON: ") + e.what());
    }
}

ExpandedAudienceContext audience_context_from_response(const Json& j,
                                                       std::string_view original_description) {
    if (!j.is_object()) throw Error(Errc::provider_error, "audience expansion reply is not an object");
    ExpandedAudienceContext ctx;
    ctx.original_description = std::string(original_description);
    auto desc = j.find("expandedDescription");
    if (desc == j.end() || !desc->is_string() || desc->get<std::string>().empty())
        throw Error(Errc::provider_error, "audience expansion reply lacks expandedDescription");
    ctx.expanded_description = desc->get<std::string>();
    auto level = j.find("inferredExpertiseLevel");
    if (level == j.end() || !level->is_number())
        throw Error(Errc::provider_error, "audience expansion reply lacks inferredExpertiseLevel");
    double lv = level->get<double>();
    if (!std::isfinite(lv)) throw Error(Errc::provider_error, "inferredExpertiseLevel is not finite");
    ctx.inferred_expertise_level = static_cast<int>(std::lround(std::clamp(lv, 1.0, 5.0)));
    ctx.known_concepts = string_list(j, "knownConcepts");
    ctx.likely_jargon = string_list(j, "likelyJargon");
    auto bg = j.find("domainBackground");
    if (bg != j.end() && bg->is_string()) ctx.domain_background = bg->get<std::string>();
    return ctx;
}

std::vector<JargonTerm> jargon_terms_from_response(const Json& j) {
    if (!j.is_object() || !j.contains("jargonTerms") || !j["jargonTerms"].is_array())
        throw Error(Errc::provider_error, "jargon reply lacks a jargonTerms list");
    std::vector<JargonTerm> out;
    for (const auto& item : j["jargonTerms"]) {
        if (!item.is_object() || !item.contains("term") || !item["term"].is_string()) continue;
        JargonTerm t;
        t.term = item["term"].get<std::string>();
        if (item.contains("definition") && item["definition"].is_string())
            t.definition = item["definition"].get<std::string>();
        t.alternatives = string_list(item, "alternatives");
        t.start_index = index_field(item, "startIndex");
        t.end_index = index_field(item, "endIndex");
        out.push_back(std::move(t));
    }
    return out;
}

LlmJargonProvider::LlmJargonProvider(std::shared_ptr<ChatClient> client) : client_(std::move(client)) {}

ExpandedAudienceContext LlmJargonProvider::expand(const AudienceProfile& audience,
                                                  const std::optional<std::string>&) {
    auto raw = client_->complete(render_audience_prompt(audience.description, audience.expertise_level));
    return audience_context_from_response(parse_model_json(raw), audience.description);
}

std::vector<JargonTerm> LlmJargonProvider::detect(std::string_view slide_title, std::string_view slide_text,
                                                  const ExpandedAudienceContext& context,
                                                  const std::optional<std::string>& presentation_context) {
    auto raw = client_->complete(render_jargon_prompt(context, slide_title, slide_text, presentation_context));
    return jargon_terms_from_response(parse_model_json(raw));
}

} // namespace deckcraft
