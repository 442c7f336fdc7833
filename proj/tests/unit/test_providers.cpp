#include "doctest.h"

#include <atomic>
#include <thread>

#include "httplib.h"

#include "deckcraft/llm_provider.hpp"
#include "deckcraft/mock_provider.hpp"

using namespace deckcraft;

namespace {

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return Errc::bad_request;
}

class CannedClient final : public ChatClient {
public:
    std::vector<std::string> replies;
    std::vector<std::string> prompts;
    std::string complete(const std::string& prompt) override {
        prompts.push_back(prompt);
        std::string r = replies.front();
        replies.erase(replies.begin());
        return r;
    }
};

// A chat endpoint on a local port that answers from a script.
class FakeEndpoint {
public:
    std::function<void(const httplib::Request&, httplib::Response&)> handler;
    std::atomic<int> calls{0};

    FakeEndpoint() {
        server_.Post("/v1/chat", [this](const httplib::Request& req, httplib::Response& res) {
            ++calls;
            handler(req, res);
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FakeEndpoint() {
        server_.stop();
        thread_.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat"; }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

std::string reply_with(const std::string& content) {
    return Json{{"choices", Json::array({Json{{"message", Json{{"role", "assistant"}, {"content", content}}}}})}}
        .dump();
}

} // namespace

TEST_CASE("model JSON gets exactly one repair attempt") {
    CHECK(parse_model_json(R"({"a": 1})")["a"] == 1);
    CHECK(parse_model_json("```json\n{\"a\": 2}\n```")["a"] == 2);
    CHECK(parse_model_json("Sure! Here it is: {\"a\": 3} Hope that helps.")["a"] == 3);
    CHECK(code_of([] { parse_model_json("no json here"); }) == Errc::provider_error);
    CHECK(code_of([] { parse_model_json("```json\n{broken\n```"); }) == Errc::provider_error);
    CHECK(code_of([] { parse_model_json("{\"a\": }"); }) == Errc::provider_error);
}

TEST_CASE("audience replies are checked and clamped") {
    auto ctx = audience_context_from_response(
        Json::parse(R"({"expandedDescription":"d","inferredExpertiseLevel":7.4,"knownConcepts":["a",3,"b"]})"),
        "orig");
    CHECK(ctx.original_description == "orig");
    CHECK(ctx.inferred_expertise_level == 5);
    CHECK(ctx.known_concepts == std::vector<std::string>{"a", "b"});
    CHECK(ctx.likely_jargon.empty());
    CHECK(audience_context_from_response(Json::parse(R"({"expandedDescription":"d","inferredExpertiseLevel":2.6})"),
                                         "o")
              .inferred_expertise_level == 3);

    CHECK(code_of([] { audience_context_from_response(Json::array(), "o"); }) == Errc::provider_error);
    CHECK(code_of([] { audience_context_from_response(Json::parse(R"({"inferredExpertiseLevel":2})"), "o"); }) ==
          Errc::provider_error);
    CHECK(code_of([] {
              audience_context_from_response(Json::parse(R"({"expandedDescription":"d","inferredExpertiseLevel":"3"})"),
                                             "o");
          }) == Errc::provider_error);
    CHECK(code_of([] {
              audience_context_from_response(
                  Json::parse(R"({"expandedDescription":"d","inferredExpertiseLevel":3,"knownConcepts":"x"})"), "o");
          }) == Errc::provider_error);
}

TEST_CASE("jargon replies skip unusable items") {
    auto terms = jargon_terms_from_response(Json::parse(R"({"jargonTerms":[
        {"term":"latency","definition":"delay","alternatives":["lag","wait"],"startIndex":4,"endIndex":11},
        {"definition":"no term"},
        7,
        {"term":"jitter","startIndex":-3,"endIndex":"x"}
    ]})"));
    REQUIRE(terms.size() == 2);
    CHECK(terms[0].term == "latency");
    CHECK(terms[0].start_index == 4);
    CHECK(terms[0].end_index == 11);
    CHECK(terms[1].term == "jitter");
    CHECK(terms[1].start_index == 0);
    CHECK(terms[1].end_index == 0);
    CHECK(terms[1].alternatives.empty());
    CHECK(code_of([] { jargon_terms_from_response(Json::object()); }) == Errc::provider_error);
}

TEST_CASE("the LLM provider drives both prompts") {
    auto client = std::make_shared<CannedClient>();
    client->replies = {
        "```json\n{\"expandedDescription\":\"Parents.\",\"inferredExpertiseLevel\":2,\"knownConcepts\":[\"apps\"]}\n```",
        R"({"jargonTerms":[{"term":"latency","definition":"d","alternatives":["a","b"],"startIndex":0,"endIndex":7}]})",
    };
    LlmJargonProvider provider(client);
    auto ctx = provider.expand({2, "parents"}, std::nullopt);
    CHECK(ctx.expanded_description == "Parents.");
    auto terms = provider.detect("", "latency", ctx, std::nullopt);
    REQUIRE(terms.size() == 1);
    REQUIRE(client->prompts.size() == 2);
    CHECK(client->prompts[0].find("\"parents\"") != std::string::npos);
    CHECK(client->prompts[1].find("Content: latency") != std::string::npos);
}

TEST_CASE("the HTTP chat client posts an OpenAI-style request") {
    FakeEndpoint endpoint;
    std::string seen_auth;
    Json seen_body;
    endpoint.handler = [&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        seen_body = Json::parse(req.body);
        res.set_content(reply_with("hello"), "application/json");
    };
    LiveProviderConfig config;
    config.api_url = endpoint.url();
    config.api_key = "k-123";
    config.model = "test-model";
    HttpChatClient client(config);
    CHECK(client.complete("prompt text") == "hello");
    CHECK(seen_auth == "Bearer k-123");
    CHECK(seen_body["model"] == "test-model");
    CHECK(seen_body["messages"][0]["role"] == "user");
    CHECK(seen_body["messages"][0]["content"] == "prompt text");
}

TEST_CASE("the HTTP chat client retries server errors once") {
    FakeEndpoint endpoint;
    endpoint.handler = [&](const httplib::Request&, httplib::Response& res) {
        if (endpoint.calls == 1) res.status = 503;
        else res.set_content(reply_with("ok"), "application/json");
    };
    LiveProviderConfig config;
    config.api_url = endpoint.url();
    config.api_key = "k";
    HttpChatClient client(config);
    CHECK(client.complete("p") == "ok");
    CHECK(endpoint.calls == 2);
}

TEST_CASE("the HTTP chat client reports failures as provider errors") {
    FakeEndpoint endpoint;
    endpoint.handler = [](const httplib::Request&, httplib::Response& res) { res.status = 500; };
    LiveProviderConfig config;
    config.api_url = endpoint.url();
    config.api_key = "k";
    config.retries = 2;
    CHECK(code_of([&] { HttpChatClient(config).complete("p"); }) == Errc::provider_error);
    CHECK(endpoint.calls == 3);

    endpoint.handler = [](const httplib::Request&, httplib::Response& res) { res.status = 401; };
    CHECK(code_of([&] { HttpChatClient(config).complete("p"); }) == Errc::provider_error);
    CHECK(endpoint.calls == 4);

    endpoint.handler = [](const httplib::Request&, httplib::Response& res) {
        res.set_content("{\"choices\": []}", "application/json");
    };
    CHECK(code_of([&] { HttpChatClient(config).complete("p"); }) == Errc::provider_error);

    config.api_key.clear();
    CHECK(code_of([&] { HttpChatClient c(config); }) == Errc::provider_error);
    config.api_key = "k";
    config.api_url = "not a url";
    CHECK(code_of([&] { HttpChatClient c(config); }) == Errc::provider_error);
}

TEST_CASE("the mock expansion lists terms at or below the level") {
    MockJargonProvider mock({LexiconEntry{"easy", 1, "d", {"a", "b"}}, LexiconEntry{"hard", 4, "d", {"a", "b"}}});
    auto ctx = mock.expand({3, "students"}, std::nullopt);
    CHECK(ctx.inferred_expertise_level == 3);
    CHECK(ctx.original_description == "students");
    CHECK_FALSE(ctx.expanded_description.empty());
    CHECK(ctx.known_concepts == std::vector<std::string>{"easy"});
    CHECK(ctx.likely_jargon == std::vector<std::string>{"hard"});
}
