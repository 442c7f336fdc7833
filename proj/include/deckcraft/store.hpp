#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deckcraft/error.hpp"

namespace deckcraft {

std::string sha256_hex(std::string_view bytes);

struct StoreSnapshot {
    std::vector<Json> entries;
    std::vector<Json> lineages;
};

/// Persistence backend for the repository: JSON documents keyed by id plus a
/// content-addressed blob area for image assets.
class DocumentStore {
public:
    virtual ~DocumentStore() = default;

    virtual StoreSnapshot load() = 0;
    virtual void put_entry(const std::string& id, const Json& doc) = 0;
    virtual void put_lineage(const std::string& id, const Json& doc) = 0;
    /// Returns false when a blob with this hash already existed.
    virtual bool put_asset(const std::string& hash, std::string_view bytes) = 0;
    virtual std::optional<std::string> get_asset(const std::string& hash) const = 0;
    virtual std::vector<std::string> asset_hashes() const = 0;
};

class MemoryStore final : public DocumentStore {
public:
    StoreSnapshot load() override;
    void put_entry(const std::string& id, const Json& doc) override;
    void put_lineage(const std::string& id, const Json& doc) override;
    bool put_asset(const std::string& hash, std::string_view bytes) override;
    std::optional<std::string> get_asset(const std::string& hash) const override;
    std::vector<std::string> asset_hashes() const override;

private:
    std::map<std::string, Json> entries_;
    std::map<std::string, Json> lineages_;
    std::map<std::string, std::string> assets_;
};

inline constexpr int kStoreSchemaVersion = 1;

/// Directory layout:
///   index.json              manifest {schema_version, entries[], lineages[]}
///   entries/{entry_id}.json
///   lineages/{lineage_id}.json
///   assets/{sha256}
/// The directory is held under an exclusive advisory lock for the lifetime of
/// the object; a second opener gets Errc::store_locked.
class FileStore final : public DocumentStore {
public:
    explicit FileStore(std::filesystem::path root);
    ~FileStore() override;

    FileStore(const FileStore&) = delete;
    FileStore& operator=(const FileStore&) = delete;

    const std::filesystem::path& root() const { return root_; }

    StoreSnapshot load() override;
    void put_entry(const std::string& id, const Json& doc) override;
    void put_lineage(const std::string& id, const Json& doc) override;
    bool put_asset(const std::string& hash, std::string_view bytes) override;
    std::optional<std::string> get_asset(const std::string& hash) const override;
    std::vector<std::string> asset_hashes() const override;

private:
    void write_manifest();

    std::filesystem::path root_;
    int lock_fd_ = -1;
    std::vector<std::string> entry_ids_;
    std::vector<std::string> lineage_ids_;
};

} // namespace deckcraft
