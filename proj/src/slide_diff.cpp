#include "deckcraft/slide_diff.hpp"

#include <unordered_map>

namespace deckcraft {

std::string_view to_string(ChangedField f) {
    switch (f) {
    case ChangedField::Content: return "content";
    case ChangedField::Bounds: return "bounds";
    case ChangedField::Kind: return "kind";
    }
    return "content";
}

SlideDiff diff_slides(const Slide& working, const Slide& base) {
    SlideDiff diff;
    diff.title_changed = working.title != base.title;

    std::unordered_map<std::string_view, const Element*> base_by_id;
    for (const auto& e : base.elements) base_by_id.emplace(e.id, &e);
    std::unordered_map<std::string_view, const Element*> working_by_id;
    for (const auto& e : working.elements) working_by_id.emplace(e.id, &e);

    std::vector<std::string_view> common_in_working;
    for (const auto& w : working.elements) {
        auto it = base_by_id.find(w.id);
        if (it == base_by_id.end()) {
            diff.added.push_back(w.id);
            continue;
        }
        common_in_working.push_back(w.id);
        const Element& b = *it->second;
        ModifiedElement m{w.id, {}};
        if (w.content != b.content) m.fields.push_back(ChangedField::Content);
        if (w.bounds != b.bounds) m.fields.push_back(ChangedField::Bounds);
        if (w.kind != b.kind) m.fields.push_back(ChangedField::Kind);
        if (!m.fields.empty()) diff.modified.push_back(std::move(m));
    }

    std::vector<std::string_view> common_in_base;
    for (const auto& b : base.elements) {
        if (working_by_id.count(b.id)) common_in_base.push_back(b.id);
        else diff.removed.push_back(b.id);
    }
    diff.order_changed = common_in_working != common_in_base;
    return diff;
}

Json to_json(const SlideDiff& diff) {
    Json modified = Json::array();
    for (const auto& m : diff.modified) {
        Json fields = Json::array();
        for (auto f : m.fields) fields.push_back(to_string(f));
        modified.push_back(Json{{"id", m.element_id}, {"changed_fields", std::move(fields)}});
    }
    return Json{{"added", diff.added},
                {"removed", diff.removed},
                {"modified", std::move(modified)},
                {"title_changed", diff.title_changed},
                {"order_changed", diff.order_changed},
                {"empty", diff.empty()}};
}

} // namespace deckcraft
