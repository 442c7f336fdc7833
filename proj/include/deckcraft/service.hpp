#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "deckcraft/constraints.hpp"
#include "deckcraft/deck.hpp"
#include "deckcraft/jargon.hpp"
#include "deckcraft/llm_provider.hpp"
#include "deckcraft/repository.hpp"

namespace httplib {
class Server;
}

namespace deckcraft {

struct ServiceConfig {
    std::string bind_host = "127.0.0.1";
    int port = 8080; // 0 picks a free port
    std::filesystem::path store_dir = "store";
    std::optional<LiveProviderConfig> live;
    std::optional<std::filesystem::path> mock_lexicon;
    int jargon_concurrency = 4;

    /// JSON file: {"bind_addr": "host:port", "store_dir": "...",
    ///             "jargon": {"api_url", "api_key", "model", "mock_lexicon", "concurrency"}}
    static ServiceConfig from_file(const std::filesystem::path& path);
    /// BIND_ADDR, STORE_DIR and JARGON_* override file values.
    void apply_env();
};

/// Builds the jargon provider described by the config: the live chat model
/// when configured, otherwise the mock over the given or bundled lexicon.
std::shared_ptr<JargonProvider> make_provider(const ServiceConfig& config);

struct SlidePatch {
    std::optional<std::optional<std::string>> title; // engaged + nullopt clears it
    std::vector<std::pair<std::string, ElementEdit>> edits;
    std::vector<ElementSpec> add_elements;
    std::vector<std::string> remove_elements;
};

enum class HideOp { Term, All, Reset };

struct Versioned {
    Presentation presentation;
    std::uint64_t revision = 0;
};

struct JargonReport {
    std::string slide_id;
    std::string text;
    ExpandedAudienceContext audience;
    std::vector<JargonTerm> terms;
};

struct ImportResult {
    Granularity granularity = Granularity::Section;
    SavedValue value;
    std::optional<std::string> presentation_id; // set when the copy was placed in a workspace
    std::optional<std::uint64_t> revision;
};

/// Session workspaces plus the repository and jargon pipeline, independent of
/// any transport. Each presentation has a single writer at a time; the
/// repository serializes its own writes.
class AuthoringService {
public:
    AuthoringService(std::shared_ptr<Repository> repository, std::shared_ptr<JargonProvider> provider,
                     Minter& minter = default_minter());

    Versioned create_presentation(std::string title, Seconds total_duration, AudienceProfile audience,
                                  std::optional<std::string> topic = std::nullopt);
    Versioned presentation(const std::string& id) const;
    Versioned update_presentation(const std::string& id, const PresentationPatch& patch,
                                  std::optional<std::uint64_t> expected_revision = std::nullopt);

    Section add_section(const std::string& presentation_id, SectionSpec spec);
    Section update_section(const std::string& section_id, const SectionPatch& patch,
                           std::optional<std::uint64_t> expected_revision = std::nullopt);
    Versioned reorder_sections(const std::string& presentation_id, const std::vector<std::string>& order,
                               std::optional<std::uint64_t> expected_revision = std::nullopt);

    Slide add_slide(const std::string& section_id, std::optional<std::string> title,
                    std::vector<ElementSpec> elements, std::optional<std::size_t> position = std::nullopt);
    Slide update_slide(const std::string& slide_id, const SlidePatch& patch,
                       std::optional<std::uint64_t> expected_revision = std::nullopt);
    Versioned move_slide(const std::string& slide_id, const std::string& target_section_id,
                         std::size_t position);

    std::vector<TimelineEntry> timeline(const std::string& presentation_id) const;
    ConflictReport conflicts(const std::string& presentation_id) const;
    /// Reused slides whose content differs from their lineage version.
    std::vector<std::string> dirty_slides(const std::string& presentation_id) const;

    /// Saves the presentation, section or slide with this id. Slides that
    /// gained a lineage are rebound in the workspace.
    RepositoryEntry save(Granularity granularity, const std::string& id);
    std::vector<SearchHit> search(std::string_view query, std::optional<Granularity> granularity) const;
    /// Without a target presentation, presentation entries open a new
    /// workspace and other granularities are returned unattached.
    ImportResult import_entry(const std::string& entry_id,
                              std::optional<std::string> target_presentation_id = std::nullopt,
                              std::optional<std::size_t> position = std::nullopt);
    Slide reuse_slide(const std::string& lineage_id, int version_index, const std::string& section_id,
                      std::optional<std::size_t> position = std::nullopt);

    SlideDiff diff(const std::string& slide_id) const;
    Slide sync(const std::string& slide_id, const SyncDecision& decision);

    JargonReport check_jargon(const std::string& slide_id);
    HideState hide_jargon(const std::string& slide_id, HideOp op, std::string_view term = {});

    AssetPut put_asset(std::string_view bytes);
    std::optional<std::string> asset(const std::string& hash) const;

    Repository& repository() { return *repository_; }
    const Repository& repository() const { return *repository_; }

private:
    struct Workspace {
        mutable std::mutex mutex;
        Presentation presentation;
        std::uint64_t revision = 1;
        std::map<std::string, HideState> hidden; // by slide id
        std::optional<std::pair<AudienceProfile, ExpandedAudienceContext>> expanded;
        std::set<std::string> indexed_sections;
        std::set<std::string> indexed_slides;
    };

    std::shared_ptr<Workspace> workspace(const std::string& presentation_id) const;
    std::shared_ptr<Workspace> workspace_of_section(const std::string& section_id) const;
    std::shared_ptr<Workspace> workspace_of_slide(const std::string& slide_id) const;
    std::shared_ptr<Workspace> open_workspace(Presentation p);
    void reindex(Workspace& ws);
    void check_revision(const Workspace& ws, std::optional<std::uint64_t> expected) const;
    void check_assets(const std::vector<ElementSpec>& specs) const;

    std::shared_ptr<Repository> repository_;
    std::shared_ptr<JargonProvider> provider_;
    Minter& minter_;

    mutable std::shared_mutex registry_mutex_;
    std::map<std::string, std::shared_ptr<Workspace>> workspaces_;
    std::map<std::string, std::string> section_owner_;
    std::map<std::string, std::string> slide_owner_;
};

/// HTTP/JSON transport over an AuthoringService.
class HttpFrontend {
public:
    explicit HttpFrontend(AuthoringService& service);
    ~HttpFrontend();

    HttpFrontend(const HttpFrontend&) = delete;
    HttpFrontend& operator=(const HttpFrontend&) = delete;

    /// Binds the socket; returns the bound port. Throws Errc::config_error.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    void listen();
    void stop();
    bool running() const;

private:
    void install_routes();

    AuthoringService& service_;
    std::unique_ptr<httplib::Server> server_;
};

/// Everything `deckctl serve` runs: store, repository, provider, service and
/// HTTP frontend, wired from a config.
class ServiceHost {
public:
    explicit ServiceHost(const ServiceConfig& config, Minter& minter = default_minter());
    ~ServiceHost();

    int port() const { return port_; }
    AuthoringService& service() { return *service_; }

    void run();              // blocks
    void start_background(); // returns once the server accepts connections
    void stop();

private:
    std::shared_ptr<Repository> repository_;
    std::unique_ptr<AuthoringService> service_;
    std::unique_ptr<HttpFrontend> frontend_;
    std::thread thread_;
    int port_ = 0;
};

} // namespace deckcraft
