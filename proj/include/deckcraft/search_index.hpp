#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "deckcraft/minter.hpp"

namespace deckcraft {

/// Lower-cased ASCII word tokens; bytes >= 0x80 count as word characters so
/// UTF-8 words stay whole. No stemming.
std::vector<std::string> tokenize(std::string_view text);

/// Inverted index over small per-user corpora. Each document has a title
/// field (weight 2) and a body field (weight 1). A query scores a document by
/// summing, for each distinct query token, 2 if it occurs in the title and 1
/// if it occurs in the body.
class SearchIndex {
public:
    struct Document {
        std::string key;
        int kind = 0; // caller-defined category used for filtering
        std::string title;
        std::vector<std::string> body; // one string per body field (e.g. a text box)
        Timestamp saved_at{};
    };

    struct Match {
        std::string key;
        int score = 0;
        std::string snippet;
        Timestamp saved_at{};
    };

    void put(Document doc);
    void erase(const std::string& key);
    void clear();
    std::size_t size() const { return docs_.size(); }

    /// Ranked by descending score, then most recent saved_at, then key.
    std::vector<Match> query(std::string_view text, std::optional<int> kind = std::nullopt) const;

private:
    struct Indexed {
        Document doc;
        std::set<std::string> title_tokens;
        std::set<std::string> body_tokens;
    };

    std::map<std::string, Indexed> docs_;
    std::unordered_map<std::string, std::set<std::string>> postings_;
};

} // namespace deckcraft
