#include "deckcraft/search_index.hpp"

#include <algorithm>

namespace deckcraft {

namespace {

bool word_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

constexpr std::size_t kSnippetLength = 120;

std::string clip(std::string_view text) {
    if (text.size() <= kSnippetLength) return std::string(text);
    std::size_t cut = kSnippetLength;
    // Do not split a UTF-8 sequence.
    while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
    return std::string(text.substr(0, cut)) + "...";
}

bool mentions_any(std::string_view text, const std::set<std::string>& tokens) {
    for (const auto& t : tokenize(text))
        if (tokens.count(t)) return true;
    return false;
}

} // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string current;
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (word_byte(c)) {
            current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : ch);
        } else if (!current.empty()) {
            out.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

void SearchIndex::put(Document doc) {
    erase(doc.key);
    Indexed idx;
    for (auto& t : tokenize(doc.title)) idx.title_tokens.insert(std::move(t));
    for (const auto& field : doc.body)
        for (auto& t : tokenize(field)) idx.body_tokens.insert(std::move(t));
    for (const auto& t : idx.title_tokens) postings_[t].insert(doc.key);
    for (const auto& t : idx.body_tokens) postings_[t].insert(doc.key);
    std::string key = doc.key;
    idx.doc = std::move(doc);
    docs_[key] = std::move(idx);
}

void SearchIndex::erase(const std::string& key) {
    auto it = docs_.find(key);
    if (it == docs_.end()) return;
    auto drop = [&](const std::set<std::string>& tokens) {
        for (const auto& t : tokens) {
            auto p = postings_.find(t);
            if (p == postings_.end()) continue;
            p->second.erase(key);
            if (p->second.empty()) postings_.erase(p);
        }
    };
    drop(it->second.title_tokens);
    drop(it->second.body_tokens);
    docs_.erase(it);
}

void SearchIndex::clear() {
    docs_.clear();
    postings_.clear();
}

std::vector<SearchIndex::Match> SearchIndex::query(std::string_view text,
                                                   std::optional<int> kind) const {
    auto raw = tokenize(text);
    std::set<std::string> tokens(raw.begin(), raw.end());

    std::set<std::string> candidates;
    for (const auto& t : tokens) {
        auto p = postings_.find(t);
        if (p != postings_.end()) candidates.insert(p->second.begin(), p->second.end());
    }

    std::vector<Match> out;
    for (const auto& key : candidates) {
        const Indexed& idx = docs_.at(key);
        if (kind && idx.doc.kind != *kind) continue;
        int score = 0;
        for (const auto& t : tokens) {
            if (idx.title_tokens.count(t)) score += 2;
            if (idx.body_tokens.count(t)) score += 1;
        }
        if (score == 0) continue;

        std::string snippet;
        if (mentions_any(idx.doc.title, tokens)) {
            snippet = clip(idx.doc.title);
        } else {
            for (const auto& field : idx.doc.body)
                if (mentions_any(field, tokens)) {
                    snippet = clip(field);
                    break;
                }
        }
        out.push_back(Match{key, score, std::move(snippet), idx.doc.saved_at});
    }
    std::sort(out.begin(), out.end(), [](const Match& a, const Match& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.saved_at != b.saved_at) return a.saved_at > b.saved_at;
        return a.key < b.key;
    });
    return out;
}

} // namespace deckcraft
