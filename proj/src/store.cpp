#include "deckcraft/store.hpp"

#include <fcntl.h>
#include <openssl/evp.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace deckcraft {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error(Errc::storage_failure, "sha256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

// ---- MemoryStore ----------------------------------------------------------

StoreSnapshot MemoryStore::load() {
    StoreSnapshot snap;
    for (const auto& [id, doc] : entries_) snap.entries.push_back(doc);
    for (const auto& [id, doc] : lineages_) snap.lineages.push_back(doc);
    return snap;
}

void MemoryStore::put_entry(const std::string& id, const Json& doc) { entries_[id] = doc; }
void MemoryStore::put_lineage(const std::string& id, const Json& doc) { lineages_[id] = doc; }

bool MemoryStore::put_asset(const std::string& hash, std::string_view bytes) {
    return assets_.emplace(hash, std::string(bytes)).second;
}

std::optional<std::string> MemoryStore::get_asset(const std::string& hash) const {
    auto it = assets_.find(hash);
    if (it == assets_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> MemoryStore::asset_hashes() const {
    std::vector<std::string> out;
    for (const auto& [hash, bytes] : assets_) out.push_back(hash);
    return out;
}

// ---- FileStore ------------------------------------------------------------

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::storage_failure, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::storage_failure, "cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw Error(Errc::storage_failure, "short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw Error(Errc::storage_failure, "cannot rename into " + path.string() + ": " + ec.message());
}

Json parse_store_document(const fs::path& path) {
    try {
        return Json::parse(read_file(path));
    } catch (const Json::parse_error& e) {
        throw Error(Errc::config_error, "corrupt store document " + path.string() + ": " + e.what());
    }
}

bool valid_id(const std::string& id) {
    return !id.empty() && std::all_of(id.begin(), id.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '-' || c == '_';
    });
}

std::vector<std::string> id_list(const Json& manifest, const char* key, const fs::path& path) {
    auto it = manifest.find(key);
    if (it == manifest.end() || !it->is_array())
        throw Error(Errc::config_error, "store manifest " + path.string() + " lacks '" + key + "'");
    std::vector<std::string> out;
    for (const auto& v : *it) {
        if (!v.is_string() || !valid_id(v.get<std::string>()))
            throw Error(Errc::config_error, "store manifest " + path.string() + " has a bad id");
        out.push_back(v.get<std::string>());
    }
    return out;
}

} // namespace

FileStore::FileStore(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_ / "entries", ec);
    if (!ec) fs::create_directories(root_ / "lineages", ec);
    if (!ec) fs::create_directories(root_ / "assets", ec);
    if (ec) throw Error(Errc::config_error, "cannot create store at " + root_.string() + ": " + ec.message());

    fs::path lock_path = root_ / ".lock";
    lock_fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (lock_fd_ < 0) throw Error(Errc::config_error, "cannot open " + lock_path.string());
    if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
        ::close(lock_fd_);
        lock_fd_ = -1;
        throw Error(Errc::store_locked, "store " + root_.string() + " is in use by another process");
    }

    try {
        fs::path manifest_path = root_ / "index.json";
        if (!fs::exists(manifest_path)) {
            write_manifest();
            return;
        }
        Json manifest = parse_store_document(manifest_path);
        if (!manifest.is_object() || !manifest.contains("schema_version") ||
            !manifest["schema_version"].is_number_integer())
            throw Error(Errc::config_error, "store manifest " + manifest_path.string() + " is invalid");
        if (manifest["schema_version"].get<int>() != kStoreSchemaVersion)
            throw Error(Errc::config_error, "store manifest has unsupported schema_version");
        entry_ids_ = id_list(manifest, "entries", manifest_path);
        lineage_ids_ = id_list(manifest, "lineages", manifest_path);
    } catch (...) {
        ::close(lock_fd_);
        lock_fd_ = -1;
        throw;
    }
}

FileStore::~FileStore() {
    if (lock_fd_ >= 0) ::close(lock_fd_);
}

void FileStore::write_manifest() {
    Json manifest{{"schema_version", kStoreSchemaVersion},
                  {"entries", entry_ids_},
                  {"lineages", lineage_ids_}};
    write_file_atomic(root_ / "index.json", manifest.dump(2) + "\n");
}

StoreSnapshot FileStore::load() {
    StoreSnapshot snap;
    for (const auto& id : entry_ids_)
        snap.entries.push_back(parse_store_document(root_ / "entries" / (id + ".json")));
    for (const auto& id : lineage_ids_)
        snap.lineages.push_back(parse_store_document(root_ / "lineages" / (id + ".json")));
    return snap;
}

void FileStore::put_entry(const std::string& id, const Json& doc) {
    if (!valid_id(id)) throw Error(Errc::storage_failure, "invalid entry id '" + id + "'");
    write_file_atomic(root_ / "entries" / (id + ".json"), doc.dump(2) + "\n");
    if (std::find(entry_ids_.begin(), entry_ids_.end(), id) == entry_ids_.end()) {
        entry_ids_.push_back(id);
        write_manifest();
    }
}

void FileStore::put_lineage(const std::string& id, const Json& doc) {
    if (!valid_id(id)) throw Error(Errc::storage_failure, "invalid lineage id '" + id + "'");
    write_file_atomic(root_ / "lineages" / (id + ".json"), doc.dump(2) + "\n");
    if (std::find(lineage_ids_.begin(), lineage_ids_.end(), id) == lineage_ids_.end()) {
        lineage_ids_.push_back(id);
        write_manifest();
    }
}

bool FileStore::put_asset(const std::string& hash, std::string_view bytes) {
    fs::path path = root_ / "assets" / hash;
    if (fs::exists(path)) return false;
    write_file_atomic(path, bytes);
    return true;
}

std::optional<std::string> FileStore::get_asset(const std::string& hash) const {
    if (hash.size() != 64 || !std::all_of(hash.begin(), hash.end(), [](unsigned char c) {
            return std::isdigit(c) || (c >= 'a' && c <= 'f');
        }))
        return std::nullopt;
    fs::path path = root_ / "assets" / hash;
    if (!fs::exists(path)) return std::nullopt;
    return read_file(path);
}

std::vector<std::string> FileStore::asset_hashes() const {
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(root_ / "assets")) {
        auto name = e.path().filename().string();
        if (name.size() == 64) out.push_back(name);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace deckcraft
