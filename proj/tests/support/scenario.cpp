#include "scenario.hpp"

#include <set>

#include "deckcraft/repository.hpp"
#include "http_support.hpp"

namespace props {

using deckcraft::Json;
using testing_support::Api;
using testing_support::Reply;

namespace {

struct Failed {
    std::string what;
};

void expect(bool cond, const std::string& what) {
    if (!cond) throw Failed{what};
}

Reply expect_status(Reply r, int status, const std::string& what) {
    if (r.status != status)
        throw Failed{what + ": HTTP " + std::to_string(r.status) + " (wanted " + std::to_string(status) + ") " + r.raw};
    return r;
}

Json text_element(const std::string& content, double y = 0.3) {
    return Json{{"kind", "text"}, {"content", content}, {"bounds", {{"x", 0.1}, {"y", y}, {"w", 0.8}, {"h", 0.2}}}};
}

std::string add_section(Api& api, const std::string& pid, const std::string& title, const char* emphasis, int seconds) {
    auto r = expect_status(api.post("/presentations/" + pid + "/sections",
                                    Json{{"title", title}, {"emphasis", emphasis}, {"duration_s", seconds}}),
                           201, "add section " + title);
    return r.body["id"].get<std::string>();
}

std::string add_slide(Api& api, const std::string& sid, const std::string& title, const std::vector<std::string>& texts) {
    Json elements = Json::array();
    double y = 0.3;
    for (const auto& t : texts) {
        elements.push_back(text_element(t, y));
        y += 0.25;
    }
    auto r = expect_status(api.post("/sections/" + sid + "/slides", Json{{"title", title}, {"elements", elements}}),
                           201, "add slide " + title);
    return r.body["id"].get<std::string>();
}

} // namespace

const char* const kAliceAudience =
    "high school students, parents, and community members who are curious about multitasking but "
    "have a range of backgrounds in it";

Outcome alice_scenario(const std::filesystem::path& fixtures_dir) {
    testing_support::TempDir store;
    try {
        std::string lineage_intro_1, lineage_intro_2, alice_id, alice_entry;
        std::string edited_text = "Most of us think doing two things at once saves time. Does it?";
        {
            testing_support::LocalService service(store.path(), fixtures_dir / "lexicon.json");
            Api api(service.port());
            expect_status(api.get("/healthz"), 200, "health check");

            // An earlier talk to lab peers whose Introduction is worth reusing.
            auto prior = expect_status(
                api.post("/presentations", Json{{"title", "Multitasking and attention (lab talk)"},
                                                {"total_duration_s", 900},
                                                {"audience", {{"expertise_level", 5}, {"description", "psychology lab members"}}}}),
                201, "create prior talk");
            std::string prior_id = prior.body["presentation"]["id"];
            std::string prior_intro = add_section(api, prior_id, "Introduction", "none", 60);
            add_slide(api, prior_intro, "Why multitasking feels productive",
                      {"We all juggle phones, tabs and chats every day."});
            add_slide(api, prior_intro, "Roadmap", {"What multitasking is, why it feels productive, and what to do about it."});
            std::string prior_findings = add_section(api, prior_id, "Findings", "high", 420);
            add_slide(api, prior_findings, "The evidence", {"Heavy Media Multitaskers (HMMs) filter distractions less well."});
            auto intro_entry = expect_status(api.post("/repository/save", Json{{"granularity", "section"}, {"id", prior_intro}}),
                                             201, "save prior Introduction");
            std::string intro_entry_id = intro_entry.body["entry_id"];

            // Constraints first: ten minutes, a level-3 lay audience.
            auto created = expect_status(
                api.post("/presentations", Json{{"title", "Why multitasking feels productive"},
                                                {"total_duration_s", 600},
                                                {"audience", {{"expertise_level", 3}, {"description", kAliceAudience}}},
                                                {"topic", "Why multitasking feels productive"}}),
                201, "create presentation");
            alice_id = created.body["presentation"]["id"];
            expect(created.body["presentation"]["total_duration_s"] == 600, "total duration recorded");
            expect(created.body["presentation"]["audience"]["expertise_level"] == 3, "audience level recorded");
            expect(created.body["presentation"]["sections"].empty(), "new presentation has no sections");

            std::string defining = add_section(api, alice_id, "Defining multitasking", "low", 120);
            std::string illusion = add_section(api, alice_id, "The illusion of productivity", "high", 210);
            std::string implications = add_section(api, alice_id, "Daily implications", "medium", 150);
            std::string conclusion = add_section(api, alice_id, "Conclusion", "none", 60);

            // Find and reuse the earlier Introduction as the opening section.
            auto search = expect_status(api.get("/repository/search?q=introduction&granularity=section"), 200, "search");
            expect(!search.body["hits"].empty() && search.body["hits"][0]["entry_id"] == intro_entry_id,
                   "search ranks the saved Introduction first");
            auto imported = expect_status(
                api.post("/repository/import", Json{{"entry_id", intro_entry_id},
                                                    {"target", {{"presentation_id", alice_id}, {"position", 0}}}}),
                201, "import Introduction");
            const Json& intro = imported.body["value"];
            expect(intro["title"] == "Introduction" && intro["duration_s"] == 60 && intro["slides"].size() == 2,
                   "imported Introduction keeps its content");
            expect(intro["id"] != prior_intro, "imported section has a fresh id");
            expect(!intro["slides"][0]["lineage_ref"].is_null() && !intro["slides"][1]["lineage_ref"].is_null(),
                   "imported slides keep their lineage references");
            lineage_intro_1 = intro["slides"][0]["lineage_ref"]["lineage_id"];
            lineage_intro_2 = intro["slides"][1]["lineage_ref"]["lineage_id"];
            std::string reused_slide = intro["slides"][0]["id"];
            std::string reused_element = intro["slides"][0]["elements"][0]["id"];

            auto deck = expect_status(api.get("/presentations/" + alice_id), 200, "read presentation");
            const Json& sections = deck.body["presentation"]["sections"];
            std::vector<std::string> order;
            std::vector<long long> durations;
            std::vector<std::string> emphases;
            for (const auto& s : sections) {
                order.push_back(s["id"]);
                durations.push_back(s["duration_s"]);
                emphases.push_back(s["emphasis"]);
            }
            expect(order == std::vector<std::string>{intro["id"], defining, illusion, implications, conclusion},
                   "five sections in narrative order");
            expect(durations == std::vector<long long>{60, 120, 210, 150, 60}, "section durations");
            expect(emphases == std::vector<std::string>{"none", "low", "high", "medium", "none"}, "section emphases");

            auto conflicts = expect_status(api.get("/presentations/" + alice_id + "/conflicts"), 200, "conflicts");
            expect(conflicts.body["sum_duration_s"] == 600 && conflicts.body["total_duration_s"] == 600,
                   "sections fill exactly ten minutes");
            for (const auto& s : conflicts.body["sections"])
                expect(s["conflict_level"] == "none" && s["overflow"] == false, "no conflict and no overflow");

            // Draft a body slide and check it for jargon.
            std::string hmm_slide = add_slide(api, illusion, "Media multitasking",
                                              {"Heavy Media Multitaskers (HMMs) are worse at ignoring distractions."});
            auto check = expect_status(api.post("/slides/" + hmm_slide + "/jargon-check"), 200, "jargon check");
            const Json* hmm = nullptr;
            for (const auto& t : check.body["terms"])
                if (t["term"] == "Heavy Media Multitaskers (HMMs)") hmm = &t;
            expect(hmm != nullptr, "HMMs flagged for a level-3 audience");
            expect((*hmm)["alternatives"] == Json::array({"frequent media users", "people who multitask with media"}),
                   "the two suggested alternatives");
            auto span = deckcraft::codepoint_substr(check.body["text"].get<std::string>(), (*hmm)["start_index"],
                                                    (*hmm)["end_index"]);
            expect(span && *span == "Heavy Media Multitaskers (HMMs)", "flag span matches the slide text");

            // Adapt the reused slide, then keep both versions in the repository.
            auto current = expect_status(api.get("/presentations/" + alice_id), 200, "read before edit");
            auto stale = current.etag;
            expect_status(api.patch("/slides/" + reused_slide,
                                    Json{{"edit_elements", {{{"id", reused_element}, {"content", edited_text}}}}}, stale),
                          200, "edit reused slide");
            expect_status(api.patch("/slides/" + reused_slide, Json{{"title", "Stale"}}, stale), 409,
                          "stale revision rejected");
            auto diff = expect_status(api.get("/slides/" + reused_slide + "/diff"), 200, "diff");
            expect(diff.body["empty"] == false && diff.body["modified"].size() == 1 &&
                       diff.body["modified"][0]["changed_fields"] == Json::array({"content"}),
                   "diff shows one modified text element");
            auto synced = expect_status(api.post("/slides/" + reused_slide + "/sync", Json{{"decision", "keep_both"}}),
                                        200, "keep both");
            expect(synced.body["lineage_ref"]["lineage_id"] == lineage_intro_1 &&
                       synced.body["lineage_ref"]["version_index"] == 1,
                   "slide now points at the new version");
            auto after = expect_status(api.get("/slides/" + reused_slide + "/diff"), 200, "diff after sync");
            expect(after.body["empty"] == true, "no pending changes after sync");

            auto saved = expect_status(api.post("/repository/save", Json{{"granularity", "presentation"}, {"id", alice_id}}),
                                       201, "save presentation");
            alice_entry = saved.body["entry_id"];

            // Scripted expectation of the repository.
            auto entries = expect_status(api.get("/repository/entries"), 200, "list entries");
            expect(entries.body["entries"].size() == 2, "two entries: prior Introduction and the new talk");
            expect(entries.body["entries"][0]["entry_id"] == intro_entry_id &&
                       entries.body["entries"][0]["granularity"] == "section" &&
                       entries.body["entries"][1]["entry_id"] == alice_entry &&
                       entries.body["entries"][1]["granularity"] == "presentation",
                   "entries in save order");
            auto lineages = expect_status(api.get("/repository/lineages"), 200, "list lineages");
            std::map<std::string, int> lengths;
            for (const auto& l : lineages.body["lineages"]) lengths[l["lineage_id"]] = l["versions"];
            expect(lengths.size() == 3, "three lineages: two Introduction slides and the new HMM slide");
            expect(lengths[lineage_intro_1] == 2 && lengths[lineage_intro_2] == 1, "only the edited slide gained a version");
            auto l1 = expect_status(api.get("/repository/lineages/" + lineage_intro_1), 200, "read lineage");
            expect(l1.body["versions"][0]["slide"]["elements"][0]["content"] ==
                           "We all juggle phones, tabs and chats every day." &&
                       l1.body["versions"][1]["slide"]["elements"][0]["content"] == edited_text,
                   "original kept as version 0, adaptation as version 1");

            auto entry = expect_status(api.get("/repository/entries/" + alice_entry), 200, "read entry");
            const Json& payload = entry.body["payload"];
            expect(payload["sections"].size() == 5, "saved talk has five sections");
            expect(payload["sections"][0]["slides"][0]["lineage_ref"] ==
                       Json({{"lineage_id", lineage_intro_1}, {"version_index", 1}}),
                   "saved talk references the kept version");
            const Json& saved_hmm = payload["sections"][2]["slides"][0];
            expect(!saved_hmm["lineage_ref"].is_null() && saved_hmm["lineage_ref"]["version_index"] == 0 &&
                       lengths.count(saved_hmm["lineage_ref"]["lineage_id"].get<std::string>()),
                   "new slide registered as version 0 of its own lineage");
        }

        // The same state is on disk once the service has shut down.
        deckcraft::Repository reopened(std::make_unique<deckcraft::FileStore>(store.path()));
        expect(reopened.entries().size() == 2 && reopened.lineages().size() == 3, "state persisted");
        expect(reopened.lineage(lineage_intro_1)->size() == 2, "kept version persisted");
        expect(reopened.entry(alice_entry).has_value(), "saved talk persisted");
    } catch (const Failed& f) {
        return Outcome{false, f.what, 1};
    } catch (const std::exception& e) {
        return Outcome{false, e.what(), 1};
    }
    return Outcome{true, {}, 1};
}

} // namespace props
