#include "doctest.h"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "deckcraft/deck_json.hpp"
#include "http_support.hpp"

extern char** environ;

using namespace deckcraft;
using testing_support::Api;
using testing_support::TempDir;

namespace {

const std::filesystem::path kFixtures = DECKCRAFT_FIXTURES_DIR;

std::string fixture(const std::string& name) { return (kFixtures / name).string(); }

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// deckctl as a child process with stdout and stderr captured in files.
class Child {
public:
    Child(const TempDir& dir, std::vector<std::string> args) {
        static int serial = 0;
        const std::string tag = std::to_string(serial++);
        out_ = dir.path() / ("out" + tag);
        err_ = dir.path() / ("err" + tag);

        args.insert(args.begin(), DECKCTL_PATH);
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        argv.push_back(nullptr);

        // The service settings must come from the arguments alone.
        std::vector<std::string> env_strings;
        for (char** e = environ; *e; ++e) {
            std::string_view entry(*e);
            if (entry.rfind("STORE_DIR=", 0) == 0 || entry.rfind("BIND_ADDR=", 0) == 0 ||
                entry.rfind("JARGON_", 0) == 0)
                continue;
            env_strings.emplace_back(entry);
        }
        std::vector<char*> envp;
        for (auto& e : env_strings) envp.push_back(e.data());
        envp.push_back(nullptr);

        posix_spawn_file_actions_t actions;
        posix_spawn_file_actions_init(&actions);
        posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, out_.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, err_.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        int rc = posix_spawn(&pid_, argv[0], &actions, nullptr, argv.data(), envp.data());
        posix_spawn_file_actions_destroy(&actions);
        REQUIRE(rc == 0);
    }
    ~Child() {
        if (pid_ > 0) {
            kill(pid_, SIGKILL);
            waitpid(pid_, nullptr, 0);
        }
    }

    int wait() {
        int status = 0;
        waitpid(pid_, &status, 0);
        pid_ = -1;
        return WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    }
    void signal(int sig) { kill(pid_, sig); }

    std::string out() const { return slurp(out_); }
    std::string err() const { return slurp(err_); }

private:
    pid_t pid_ = -1;
    std::filesystem::path out_, err_;
};

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run deckctl(const TempDir& dir, std::vector<std::string> args) {
    Child child(dir, std::move(args));
    int code = child.wait();
    return Run{code, child.out(), child.err()};
}

} // namespace

TEST_CASE("validate reports violations and exit codes") {
    TempDir dir;
    auto ok = deckctl(dir, {"validate", fixture("keyresult_deck.json")});
    CHECK(ok.code == 0);
    CHECK(ok.out == "ok\n");

    auto invalid = deckctl(dir, {"validate", fixture("invalid_deck.json")});
    CHECK(invalid.code == 1);
    CHECK(invalid.out.find("/presentation/total_duration_s: ") == 0);
    CHECK(invalid.out.find("/presentation/sections/1/duration_s: ") != std::string::npos);

    auto malformed = deckctl(dir, {"validate", fixture("malformed.json")});
    CHECK(malformed.code == 2);
    CHECK(malformed.err.find("error: malformed_document: ") == 0);

    auto future = deckctl(dir, {"validate", fixture("future_schema.json")});
    CHECK(future.code == 2);
    CHECK(future.err.find("unsupported_schema_version") != std::string::npos);

    CHECK(deckctl(dir, {"validate", (dir.path() / "missing.json").string()}).code == 2);
    CHECK(deckctl(dir, {"validate"}).code != 0);
    CHECK(deckctl(dir, {"no-such-command"}).code != 0);
}

TEST_CASE("conflicts in human and JSON form") {
    TempDir dir;
    auto human = deckctl(dir, {"conflicts", fixture("keyresult_deck.json")});
    CHECK(human.code == 0);
    CHECK(human.out == "KeyResult [high] 0:00-2:00 HIGH (r=0.50 vs Conclusion)\n"
                       "Conclusion [low] 2:00-6:00 NONE\n"
                       "total 6:00 of 10:00\n");

    auto json = deckctl(dir, {"conflicts", "--format", "json", fixture("keyresult_deck.json")});
    CHECK(json.code == 0);
    auto expected = compute_conflicts(deserialize(slurp(fixture("keyresult_deck.json"))).presentation);
    CHECK(json.out == dump(to_json(expected)));
    auto parsed = Json::parse(json.out);
    CHECK(parsed["sections"][0]["pairs"][0]["other_id"] == "s-conclusion");
    CHECK(parsed["sections"][0]["pairs"][0]["ratio"] == 0.5);

    auto overflow = deckctl(dir, {"conflicts", fixture("overflow_deck.json")});
    CHECK(overflow.code == 0);
    CHECK(overflow.out.find("OVERFLOW") != std::string::npos);

    CHECK(deckctl(dir, {"conflicts", "--format", "xml", fixture("keyresult_deck.json")}).code != 0);
    CHECK(deckctl(dir, {"conflicts", fixture("invalid_deck.json")}).code == 1);
}

TEST_CASE("jargon with the mock lexicon") {
    TempDir dir;
    auto run = deckctl(dir, {"jargon", fixture("hmm_deck.json"), "--slide", "sl-hmm", "--mock-lexicon",
                             fixture("lexicon.json")});
    REQUIRE(run.code == 0);
    auto terms = Json::parse(run.out);
    REQUIRE(terms.size() == 1);
    CHECK(terms[0]["term"] == "Heavy Media Multitaskers (HMMs)");
    CHECK(terms[0]["start_index"] == 19);
    CHECK(terms[0]["end_index"] == 50);

    auto empty = deckctl(dir, {"jargon", fixture("hmm_deck.json"), "--slide", "sl-empty", "--mock-lexicon",
                               fixture("lexicon.json")});
    CHECK(empty.code == 1);
    CHECK(empty.err.find("empty_slide") != std::string::npos);

    auto dup = deckctl(dir, {"jargon", fixture("hmm_deck.json"), "--slide", "sl-hmm", "--mock-lexicon",
                             fixture("duplicate_lexicon.json")});
    CHECK(dup.code == 1);
    CHECK(dup.err.find("duplicate_lexicon_term") != std::string::npos);

    CHECK(deckctl(dir, {"jargon", fixture("hmm_deck.json"), "--slide", "ghost"}).code == 1);
    auto live = deckctl(dir, {"jargon", fixture("hmm_deck.json"), "--slide", "sl-hmm", "--live"});
    CHECK(live.code == 3);
}

TEST_CASE("repository save, search and import") {
    TempDir dir;
    const std::string store = (dir.path() / "store").string();
    auto saved = deckctl(dir, {"repo", "save", fixture("keyresult_deck.json"), "--store", store});
    REQUIRE(saved.code == 0);
    auto entry = Json::parse(saved.out);
    CHECK(entry["granularity"] == "presentation");
    CHECK(entry["source_presentation_id"] == "p-keyresult");

    auto slide = deckctl(dir, {"repo", "save", fixture("keyresult_deck.json"), "--store", store, "--granularity",
                               "slide", "--id", "sl-kr"});
    REQUIRE(slide.code == 0);
    CHECK_FALSE(Json::parse(slide.out)["payload"]["lineage_ref"].is_null());

    auto hits = deckctl(dir, {"repo", "search", "revenue", "--store", store, "--json"});
    REQUIRE(hits.code == 0);
    auto parsed = Json::parse(hits.out);
    CHECK(parsed.size() == 2);
    auto slide_hits = Json::parse(
        deckctl(dir, {"repo", "search", "revenue", "--store", store, "--granularity", "slide", "--json"}).out);
    // The file's slide carries no lineage, so each save starts a new one.
    REQUIRE(slide_hits.size() == 2);
    CHECK(slide_hits[0]["granularity"] == "slide");
    CHECK(slide_hits[0]["lineage_ref"]["lineage_id"] != slide_hits[1]["lineage_ref"]["lineage_id"]);
    auto plain = deckctl(dir, {"repo", "search", "revenue", "--store", store});
    CHECK(plain.out.find("\tslide\t") != std::string::npos);
    CHECK(deckctl(dir, {"repo", "search", "   ", "--store", store}).code == 1);

    auto imported = deckctl(dir, {"repo", "import", entry["entry_id"].get<std::string>(), "--store", store});
    REQUIRE(imported.code == 0);
    auto copy = deserialize(imported.out);
    CHECK(copy.presentation.id != "p-keyresult");
    CHECK(copy.presentation.sections.size() == 2);
    CHECK(deckctl(dir, {"repo", "import", "ghost", "--store", store}).code == 1);

    auto missing = deckctl(dir, {"repo", "save", fixture("keyresult_deck.json"), "--store", store, "--granularity",
                                 "section", "--id", "ghost"});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("unknown_section") != std::string::npos);
}

TEST_CASE("serve answers requests and stops on SIGTERM") {
    TempDir dir;
    Child server(dir, {"serve", "--store", (dir.path() / "store").string(), "--bind", "127.0.0.1:0"});
    int port = 0;
    for (int i = 0; i < 200 && port == 0; ++i) {
        auto out = server.out();
        auto at = out.find("listening on 127.0.0.1:");
        if (at != std::string::npos && out.find('\n', at) != std::string::npos)
            port = std::stoi(out.substr(at + std::string("listening on 127.0.0.1:").size()));
        else std::this_thread::sleep_for(std::chrono::milliseconds(25));
    }
    REQUIRE(port > 0);

    Api api(port);
    CHECK(api.get("/healthz").status == 200);
    auto created = api.post("/presentations", Json{{"title", "CLI"},
                                                   {"total_duration_s", 60},
                                                   {"audience", {{"expertise_level", 1}, {"description", "kids"}}}});
    CHECK(created.status == 201);

    server.signal(SIGTERM);
    CHECK(server.wait() == 0);
}

TEST_CASE("serve refuses bad configuration") {
    TempDir dir;
    const auto config = dir.path() / "config.json";
    std::ofstream(config) << "not json";
    auto bad = deckctl(dir, {"serve", "--config", config.string()});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("config_error") != std::string::npos);

    CHECK(deckctl(dir, {"serve", "--bind", "nowhere"}).code == 1);
    CHECK(deckctl(dir, {"serve", "--config", (dir.path() / "absent.json").string()}).code == 1);

    std::ofstream(config, std::ios::trunc) << R"({"jargon": {"concurrency": 0}})";
    CHECK(deckctl(dir, {"serve", "--config", config.string(), "--store", (dir.path() / "s").string(), "--bind",
                        "127.0.0.1:0"})
              .code == 1);
}
