#include "deckcraft/deck.hpp"

#include <algorithm>
#include <cctype>

#include "deckcraft/error.hpp"

namespace deckcraft {

namespace {

bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

Section* find_section_mut(Presentation& p, std::string_view id) {
    for (auto& s : p.sections)
        if (s.id == id) return &s;
    return nullptr;
}

Section& require_section(Presentation& p, std::string_view id) {
    if (auto* s = find_section_mut(p, id)) return *s;
    throw Error(Errc::unknown_section, "unknown section '" + std::string(id) + "'");
}

} // namespace

std::string_view to_string(Emphasis e) {
    switch (e) {
    case Emphasis::None: return "none";
    case Emphasis::Low: return "low";
    case Emphasis::Medium: return "medium";
    case Emphasis::High: return "high";
    }
    return "none";
}

std::optional<Emphasis> parse_emphasis(std::string_view text) {
    if (text == "none") return Emphasis::None;
    if (text == "low") return Emphasis::Low;
    if (text == "medium") return Emphasis::Medium;
    if (text == "high") return Emphasis::High;
    return std::nullopt;
}

std::string_view to_string(ElementKind k) {
    return k == ElementKind::Text ? "text" : "image";
}

std::optional<ElementKind> parse_element_kind(std::string_view text) {
    if (text == "text") return ElementKind::Text;
    if (text == "image") return ElementKind::Image;
    return std::nullopt;
}

bool bounds_valid(const Bounds& b) {
    // Written so that NaN fails every comparison.
    bool in_range = b.x >= 0.0 && b.y >= 0.0 && b.w > 0.0 && b.h > 0.0 && b.x <= 1.0 &&
                    b.y <= 1.0 && b.w <= 1.0 && b.h <= 1.0;
    return in_range && b.x + b.w <= 1.0 && b.y + b.h <= 1.0;
}

void require_valid_duration(Seconds d) {
    if (d.count() <= 0)
        throw Error(Errc::invalid_duration,
                    "duration must be a positive number of seconds, got " +
                        std::to_string(d.count()));
}

void require_valid_audience(const AudienceProfile& audience) {
    if (audience.expertise_level < 1 || audience.expertise_level > 5)
        throw Error(Errc::invalid_audience, "expertise level must be in [1,5], got " +
                                                std::to_string(audience.expertise_level));
    if (blank(audience.description))
        throw Error(Errc::invalid_audience, "audience description must not be empty");
}

Presentation create_presentation(std::string title, Seconds total_duration,
                                 AudienceProfile audience, std::optional<std::string> topic,
                                 Minter& minter) {
    require_valid_duration(total_duration);
    require_valid_audience(audience);
    Presentation p;
    p.id = minter.next_id();
    p.title = std::move(title);
    p.total_duration = total_duration;
    p.audience = std::move(audience);
    p.created_at = minter.now();
    p.topic = std::move(topic);
    return p;
}

Presentation update_presentation(const Presentation& p, const PresentationPatch& patch) {
    if (patch.total_duration) require_valid_duration(*patch.total_duration);
    if (patch.audience) require_valid_audience(*patch.audience);
    Presentation out = p;
    if (patch.title) out.title = *patch.title;
    if (patch.total_duration) out.total_duration = *patch.total_duration;
    if (patch.audience) out.audience = *patch.audience;
    if (patch.topic) out.topic = *patch.topic;
    return out;
}

std::pair<Presentation, Section> add_section(const Presentation& p, SectionSpec spec,
                                             Minter& minter) {
    Section s;
    s.duration = spec.duration.value_or(kDefaultSectionDuration);
    require_valid_duration(s.duration);
    if (spec.position && *spec.position > p.sections.size())
        throw Error(Errc::position_out_of_range,
                    "section position " + std::to_string(*spec.position) + " exceeds count " +
                        std::to_string(p.sections.size()));
    s.id = minter.next_id();
    s.title = std::move(spec.title);
    s.emphasis = spec.emphasis.value_or(Emphasis::None);
    Presentation out = insert_section(p, s, spec.position);
    return {std::move(out), std::move(s)};
}

Presentation insert_section(const Presentation& p, Section section,
                            std::optional<std::size_t> position) {
    require_valid_duration(section.duration);
    std::size_t pos = position.value_or(p.sections.size());
    if (pos > p.sections.size())
        throw Error(Errc::position_out_of_range,
                    "section position " + std::to_string(pos) + " exceeds count " +
                        std::to_string(p.sections.size()));
    Presentation out = p;
    out.sections.insert(out.sections.begin() + static_cast<std::ptrdiff_t>(pos),
                        std::move(section));
    return out;
}

Presentation update_section(const Presentation& p, std::string_view section_id,
                            const SectionPatch& patch) {
    if (patch.duration) require_valid_duration(*patch.duration);
    Presentation out = p;
    Section& s = require_section(out, section_id);
    if (patch.title) s.title = *patch.title;
    if (patch.duration) s.duration = *patch.duration;
    if (patch.emphasis) s.emphasis = *patch.emphasis;
    return out;
}

Presentation remove_section(const Presentation& p, std::string_view section_id) {
    Presentation out = p;
    auto it = std::find_if(out.sections.begin(), out.sections.end(),
                           [&](const Section& s) { return s.id == section_id; });
    if (it == out.sections.end())
        throw Error(Errc::unknown_section, "unknown section '" + std::string(section_id) + "'");
    out.sections.erase(it);
    return out;
}

Presentation reorder_sections(const Presentation& p, const std::vector<std::string>& new_order) {
    std::vector<std::string> current;
    current.reserve(p.sections.size());
    for (const auto& s : p.sections) current.push_back(s.id);
    auto sorted_new = new_order;
    std::sort(current.begin(), current.end());
    std::sort(sorted_new.begin(), sorted_new.end());
    if (current != sorted_new)
        throw Error(Errc::not_a_permutation,
                    "new order must be a permutation of the existing section ids");

    Presentation out = p;
    out.sections.clear();
    for (const auto& id : new_order) out.sections.push_back(*find_section(p, id));
    return out;
}

Element make_element(ElementSpec spec, Minter& minter) {
    if (!bounds_valid(spec.bounds))
        throw Error(Errc::invalid_bounds, "element bounds must lie within the unit square");
    return Element{minter.next_id(), spec.kind, std::move(spec.content), spec.bounds};
}

Slide make_slide(std::optional<std::string> title, std::vector<ElementSpec> elements,
                 Minter& minter) {
    Slide s;
    s.id = minter.next_id();
    s.title = std::move(title);
    for (auto& e : elements) s.elements.push_back(make_element(std::move(e), minter));
    return s;
}

Presentation insert_slide(const Presentation& p, std::string_view section_id, Slide slide,
                          std::optional<std::size_t> position) {
    Presentation out = p;
    Section& target = require_section(out, section_id);
    std::size_t pos = position.value_or(target.slides.size());
    if (pos > target.slides.size())
        throw Error(Errc::position_out_of_range,
                    "slide position " + std::to_string(pos) + " exceeds count " +
                        std::to_string(target.slides.size()));
    target.slides.insert(target.slides.begin() + static_cast<std::ptrdiff_t>(pos),
                         std::move(slide));
    return out;
}

Presentation move_slide(const Presentation& p, std::string_view slide_id,
                        std::string_view target_section_id, std::size_t position) {
    if (!find_slide(p, slide_id))
        throw Error(Errc::unknown_slide, "unknown slide '" + std::string(slide_id) + "'");
    Presentation out = p;
    Section& target = require_section(out, target_section_id);
    if (position > target.slides.size())
        throw Error(Errc::position_out_of_range,
                    "slide position " + std::to_string(position) + " exceeds count " +
                        std::to_string(target.slides.size()));

    Slide moving;
    for (auto& sec : out.sections) {
        auto it = std::find_if(sec.slides.begin(), sec.slides.end(),
                               [&](const Slide& s) { return s.id == slide_id; });
        if (it != sec.slides.end()) {
            moving = std::move(*it);
            sec.slides.erase(it);
            break;
        }
    }
    // Positions are given against the pre-move order; moving to the end of the
    // same section lands one past the shortened list.
    position = std::min(position, target.slides.size());
    target.slides.insert(target.slides.begin() + static_cast<std::ptrdiff_t>(position),
                         std::move(moving));
    return out;
}

Presentation replace_slide(const Presentation& p, Slide slide) {
    Presentation out = p;
    for (auto& sec : out.sections)
        for (auto& s : sec.slides)
            if (s.id == slide.id) {
                s = std::move(slide);
                return out;
            }
    throw Error(Errc::unknown_slide, "unknown slide '" + slide.id + "'");
}

Presentation remove_slide(const Presentation& p, std::string_view slide_id) {
    Presentation out = p;
    for (auto& sec : out.sections) {
        auto it = std::find_if(sec.slides.begin(), sec.slides.end(),
                               [&](const Slide& s) { return s.id == slide_id; });
        if (it != sec.slides.end()) {
            sec.slides.erase(it);
            return out;
        }
    }
    throw Error(Errc::unknown_slide, "unknown slide '" + std::string(slide_id) + "'");
}

Slide edit_element(const Slide& slide, std::string_view element_id, const ElementEdit& edit) {
    if (edit.bounds && !bounds_valid(*edit.bounds))
        throw Error(Errc::invalid_bounds, "element bounds must lie within the unit square");
    Slide out = slide;
    auto it = std::find_if(out.elements.begin(), out.elements.end(),
                           [&](const Element& e) { return e.id == element_id; });
    if (it == out.elements.end())
        throw Error(Errc::unknown_element, "unknown element '" + std::string(element_id) + "'");
    if (edit.content) it->content = *edit.content;
    if (edit.bounds) it->bounds = *edit.bounds;
    return out;
}

Slide add_element(const Slide& slide, Element element) {
    if (!bounds_valid(element.bounds))
        throw Error(Errc::invalid_bounds, "element bounds must lie within the unit square");
    for (const auto& e : slide.elements)
        if (e.id == element.id)
            throw Error(Errc::invalid_deck, "duplicate element id '" + element.id + "'");
    Slide out = slide;
    out.elements.push_back(std::move(element));
    return out;
}

Slide remove_element(const Slide& slide, std::string_view element_id) {
    Slide out = slide;
    auto it = std::find_if(out.elements.begin(), out.elements.end(),
                           [&](const Element& e) { return e.id == element_id; });
    if (it == out.elements.end())
        throw Error(Errc::unknown_element, "unknown element '" + std::string(element_id) + "'");
    out.elements.erase(it);
    return out;
}

Slide set_slide_title(const Slide& slide, std::optional<std::string> title) {
    Slide out = slide;
    out.title = std::move(title);
    return out;
}

const Section* find_section(const Presentation& p, std::string_view section_id) {
    for (const auto& s : p.sections)
        if (s.id == section_id) return &s;
    return nullptr;
}

const Slide* find_slide(const Presentation& p, std::string_view slide_id) {
    for (const auto& sec : p.sections)
        for (const auto& s : sec.slides)
            if (s.id == slide_id) return &s;
    return nullptr;
}

const Section* section_of_slide(const Presentation& p, std::string_view slide_id) {
    for (const auto& sec : p.sections)
        for (const auto& s : sec.slides)
            if (s.id == slide_id) return &sec;
    return nullptr;
}

Seconds sum_of_durations(const Presentation& p) {
    Seconds total{0};
    for (const auto& s : p.sections) total += s.duration;
    return total;
}

Slide copy_with_fresh_ids(const Slide& slide, Minter& minter) {
    Slide out = slide;
    out.id = minter.next_id();
    for (auto& e : out.elements) e.id = derive_id(out.id, e.id);
    return out;
}

Section copy_with_fresh_ids(const Section& section, Minter& minter) {
    Section out = section;
    out.id = minter.next_id();
    for (auto& s : out.slides) s = copy_with_fresh_ids(s, minter);
    return out;
}

Presentation copy_with_fresh_ids(const Presentation& p, Minter& minter) {
    Presentation out = p;
    out.id = minter.next_id();
    out.created_at = minter.now();
    for (auto& s : out.sections) s = copy_with_fresh_ids(s, minter);
    return out;
}

} // namespace deckcraft
