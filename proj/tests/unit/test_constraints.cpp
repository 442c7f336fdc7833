#include "doctest.h"

#include <fstream>
#include <sstream>

#include "deckcraft/constraints.hpp"
#include "deckcraft/deck_json.hpp"
#include "properties.hpp"

using namespace deckcraft;

namespace {

Presentation load(const std::string& name) {
    std::ifstream in(std::filesystem::path(DECKCRAFT_FIXTURES_DIR) / name, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return deserialize(buf.str()).presentation;
}

Presentation sections(std::initializer_list<std::pair<long long, Emphasis>> spec, long long total = 10000) {
    Presentation p;
    p.id = "p";
    p.total_duration = Seconds(total);
    p.audience = {3, "anyone"};
    int i = 0;
    for (const auto& [d, e] : spec) {
        std::string id = "s" + std::to_string(i++);
        p.sections.push_back(Section{id, id, Seconds(d), e, {}});
    }
    return p;
}

} // namespace

TEST_CASE("ratio thresholds are inclusive and exact") {
    CHECK(classify_ratio(Ratio::of(Seconds(1), Seconds(2))) == ConflictLevel::High);
    CHECK(classify_ratio(Ratio::of(Seconds(2), Seconds(5))) == ConflictLevel::High);
    CHECK(classify_ratio(Ratio::of(Seconds(501), Seconds(1000))) == ConflictLevel::Medium);
    CHECK(classify_ratio(Ratio::of(Seconds(3), Seconds(4))) == ConflictLevel::Medium);
    CHECK(classify_ratio(Ratio::of(Seconds(751), Seconds(1000))) == ConflictLevel::Low);
    CHECK(classify_ratio(Ratio::of(Seconds(7), Seconds(7))) == ConflictLevel::Low);
    CHECK(classify_ratio(Ratio::of(Seconds(1001), Seconds(1000))) == ConflictLevel::NoConflict);

    auto r = Ratio::of(Seconds(120), Seconds(240));
    CHECK(r.num == 1);
    CHECK(r.den == 2);
}

TEST_CASE("fixed ratio table and the two-section fixture") {
    auto outcome = props::conflict_thresholds(DECKCRAFT_FIXTURES_DIR);
    CHECK_MESSAGE(outcome.passed, outcome.detail);
}

TEST_CASE("a short high section against a long conclusion is a high conflict") {
    auto report = compute_conflicts(load("keyresult_deck.json"));
    const auto* key = report.find("s-keyresult");
    REQUIRE(key != nullptr);
    CHECK(key->level == ConflictLevel::High);
    REQUIRE(key->pairs.size() == 1);
    CHECK(key->pairs[0].less_important_id == "s-conclusion");
    CHECK(key->pairs[0].ratio == Ratio{1, 2});
    // The less important partner is not marked.
    CHECK(report.find("s-conclusion")->level == ConflictLevel::NoConflict);
    CHECK(report.total_duration == Seconds(600));
    CHECK(report.sum_duration == Seconds(360));
}

TEST_CASE("None emphasis never takes part and equal emphasis never conflicts") {
    auto p = sections({{10, Emphasis::None}, {1000, Emphasis::High}, {10, Emphasis::Medium}, {999, Emphasis::Medium}});
    auto report = compute_conflicts(p);
    CHECK(report.find("s0")->level == ConflictLevel::NoConflict);
    CHECK(report.find("s1")->level == ConflictLevel::NoConflict);
    CHECK(report.find("s2")->level == ConflictLevel::NoConflict);
    CHECK(report.find("s3")->level == ConflictLevel::NoConflict);
}

TEST_CASE("the highest level over all less important partners wins") {
    auto p = sections({{100, Emphasis::High}, {140, Emphasis::Medium}, {210, Emphasis::Low}, {80, Emphasis::Low}});
    auto report = compute_conflicts(p);
    const auto* high = report.find("s0");
    CHECK(high->level == ConflictLevel::High);
    REQUIRE(high->pairs.size() == 2);
    CHECK(high->pairs[0].less_important_id == "s1");
    CHECK(high->pairs[0].level == ConflictLevel::Medium);
    CHECK(high->pairs[1].less_important_id == "s2");
    CHECK(high->pairs[1].level == ConflictLevel::High);
    CHECK(report.find("s1")->level == ConflictLevel::Medium);
    CHECK(report.find("s2")->level == ConflictLevel::NoConflict);
}

TEST_CASE("overflow uses cumulative ends and a section ending at the limit is fine") {
    auto p = load("overflow_deck.json");
    CHECK(compute_overflow(p) == std::vector<std::string>{"s-c"});
    auto tl = compute_timeline(p);
    REQUIRE(tl.size() == 3);
    CHECK(tl[1].start == Seconds(120));
    CHECK(tl[1].end == Seconds(300));
    CHECK(tl[2].end == Seconds(360));
    auto report = compute_conflicts(p);
    CHECK_FALSE(report.find("s-b")->overflow);
    CHECK(report.find("s-c")->overflow);

    auto empty = sections({});
    CHECK(compute_overflow(empty).empty());
    CHECK(compute_timeline(empty).empty());
}

TEST_CASE("conflict and overflow properties") {
    auto a = props::conflict_oracle(300, 5);
    CHECK_MESSAGE(a.passed, a.detail);
    auto b = props::overflow_oracle(300, 6);
    CHECK_MESSAGE(b.passed, b.detail);
}

TEST_CASE("report JSON shape") {
    auto j = to_json(compute_conflicts(load("keyresult_deck.json")));
    CHECK(j["total_duration_s"] == 600);
    CHECK(j["sum_duration_s"] == 360);
    REQUIRE(j["sections"].size() == 2);
    CHECK(j["sections"][0]["id"] == "s-keyresult");
    CHECK(j["sections"][0]["conflict_level"] == "high");
    CHECK(j["sections"][0]["pairs"][0]["other_id"] == "s-conclusion");
    CHECK(j["sections"][0]["pairs"][0]["ratio"] == 0.5);
    CHECK(j["sections"][1]["conflict_level"] == "none");
    CHECK(j["sections"][1]["pairs"].empty());
}
