#include "doctest.h"

#include <algorithm>
#include <set>

#include "deckcraft/search_index.hpp"
#include "generators.hpp"

using namespace deckcraft;

namespace {

SearchIndex::Document doc(std::string key, std::string title, std::vector<std::string> body, int kind = 0,
                          long long saved = 0) {
    return {std::move(key), kind, std::move(title), std::move(body), Timestamp(std::chrono::seconds(saved))};
}

// Linear-scan reference over every document.
std::vector<std::pair<std::string, int>> scan(const std::vector<SearchIndex::Document>& docs, const std::string& q,
                                              std::optional<int> kind) {
    auto raw = tokenize(q);
    std::set<std::string> tokens(raw.begin(), raw.end());
    std::vector<std::tuple<int, long long, std::string>> scored;
    for (const auto& d : docs) {
        if (kind && d.kind != *kind) continue;
        auto tt = tokenize(d.title);
        std::vector<std::string> bt;
        for (const auto& f : d.body)
            for (auto& t : tokenize(f)) bt.push_back(t);
        int score = 0;
        for (const auto& t : tokens) {
            if (std::find(tt.begin(), tt.end(), t) != tt.end()) score += 2;
            if (std::find(bt.begin(), bt.end(), t) != bt.end()) score += 1;
        }
        if (score > 0) scored.emplace_back(score, d.saved_at.time_since_epoch().count(), d.key);
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
        if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) > std::get<1>(b);
        return std::get<2>(a) < std::get<2>(b);
    });
    std::vector<std::pair<std::string, int>> out;
    for (const auto& [s, t, k] : scored) out.emplace_back(k, s);
    return out;
}

} // namespace

TEST_CASE("tokenizer lower-cases ASCII and keeps UTF-8 words whole") {
    CHECK(tokenize("Hello, World! 42x") == std::vector<std::string>{"hello", "world", "42x"});
    CHECK(tokenize("caf\xc3\xa9 au-lait") == std::vector<std::string>{"caf\xc3\xa9", "au", "lait"});
    CHECK(tokenize("  ...  ").empty());
}

TEST_CASE("title matches weigh twice body matches") {
    SearchIndex idx;
    idx.put(doc("a", "multitasking myths", {"intro"}));
    idx.put(doc("b", "intro", {"multitasking myths"}));
    idx.put(doc("c", "unrelated", {"nothing"}));
    auto hits = idx.query("Multitasking");
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].key == "a");
    CHECK(hits[0].score == 2);
    CHECK(hits[0].snippet == "multitasking myths");
    CHECK(hits[1].key == "b");
    CHECK(hits[1].score == 1);
    CHECK(hits[1].snippet == "multitasking myths");
}

TEST_CASE("ties break by recency then key, and kinds filter") {
    SearchIndex idx;
    idx.put(doc("old", "focus", {}, 1, 10));
    idx.put(doc("new", "focus", {}, 1, 20));
    idx.put(doc("also", "focus", {}, 2, 20));
    auto hits = idx.query("focus");
    REQUIRE(hits.size() == 3);
    CHECK(hits[0].key == "also");
    CHECK(hits[1].key == "new");
    CHECK(hits[2].key == "old");
    CHECK(idx.query("focus", 1).size() == 2);
    CHECK(idx.query("focus", 3).empty());
}

TEST_CASE("put replaces and erase removes") {
    SearchIndex idx;
    idx.put(doc("a", "alpha", {}));
    idx.put(doc("a", "beta", {}));
    CHECK(idx.size() == 1);
    CHECK(idx.query("alpha").empty());
    CHECK(idx.query("beta").size() == 1);
    idx.erase("a");
    CHECK(idx.query("beta").empty());
    CHECK(idx.size() == 0);
}

TEST_CASE("long snippets are clipped") {
    SearchIndex idx;
    idx.put(doc("a", std::string(200, 'x') + " needle", {}));
    auto hits = idx.query("needle");
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].snippet.size() == 123);
    CHECK(hits[0].snippet.substr(120) == "...");
}

TEST_CASE("index agrees with a linear scan") {
    gen::Rng rng(99);
    for (int round = 0; round < 50; ++round) {
        SearchIndex idx;
        std::vector<SearchIndex::Document> docs;
        int n = rng.between(1, 30);
        for (int i = 0; i < n; ++i) {
            std::vector<std::string> body;
            for (int k = rng.between(0, 3); k > 0; --k) body.push_back(gen::text(rng));
            auto d = doc("k" + std::to_string(i), gen::text(rng, 4), body, rng.between(0, 2), rng.between(0, 5));
            docs.push_back(d);
            idx.put(d);
        }
        // Overwrite and remove a few to exercise postings maintenance.
        for (int k = 0; k < 3 && !docs.empty(); ++k) {
            auto& d = docs[static_cast<std::size_t>(rng.between(0, static_cast<int>(docs.size()) - 1))];
            d.title = gen::text(rng, 4);
            idx.put(d);
        }
        auto victim = docs.back().key;
        docs.pop_back();
        idx.erase(victim);

        for (int q = 0; q < 10; ++q) {
            std::string query = gen::text(rng, 3);
            std::optional<int> kind;
            if (rng.chance(0.3)) kind = rng.between(0, 2);
            auto hits = idx.query(query, kind);
            std::vector<std::pair<std::string, int>> got;
            for (const auto& h : hits) got.emplace_back(h.key, h.score);
            CHECK(got == scan(docs, query, kind));
        }
    }
}
