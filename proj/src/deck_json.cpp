#include "deckcraft/deck_json.hpp"

#include <cstdint>
#include <set>

namespace deckcraft {

namespace {

[[noreturn]] void malformed(const std::string& pointer, const std::string& what) {
    throw Error(Errc::malformed_document, what + " at '" + pointer + "'",
                Json{{"pointer", pointer}});
}

const Json& member(const Json& j, const char* key, const std::string& pointer) {
    if (!j.is_object()) malformed(pointer, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) malformed(pointer + "/" + key, "missing key");
    return *it;
}

std::string string_at(const Json& j, const char* key, const std::string& pointer) {
    const Json& v = member(j, key, pointer);
    if (!v.is_string()) malformed(pointer + "/" + key, "expected a string");
    return v.get<std::string>();
}

std::optional<std::string> optional_string_at(const Json& j, const char* key,
                                              const std::string& pointer) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) malformed(pointer + "/" + key, "expected a string or null");
    return it->get<std::string>();
}

long long integer_at(const Json& j, const char* key, const std::string& pointer) {
    const Json& v = member(j, key, pointer);
    if (!v.is_number_integer()) malformed(pointer + "/" + key, "expected an integer");
    return v.get<long long>();
}

double number_at(const Json& j, const char* key, const std::string& pointer) {
    const Json& v = member(j, key, pointer);
    if (!v.is_number()) malformed(pointer + "/" + key, "expected a number");
    return v.get<double>();
}

const Json& array_at(const Json& j, const char* key, const std::string& pointer) {
    const Json& v = member(j, key, pointer);
    if (!v.is_array()) malformed(pointer + "/" + key, "expected an array");
    return v;
}

} // namespace

std::string dump(const Json& j) {
    return j.dump(2) + "\n";
}

Json to_json(const Bounds& b) {
    return Json{{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}};
}

Json to_json(const AudienceProfile& a) {
    return Json{{"expertise_level", a.expertise_level}, {"description", a.description}};
}

Json to_json(const Element& e) {
    return Json{{"id", e.id},
                {"kind", to_string(e.kind)},
                {"content", e.content},
                {"bounds", to_json(e.bounds)}};
}

Json to_json(const Slide& s) {
    Json j;
    j["id"] = s.id;
    j["title"] = s.title ? Json(*s.title) : Json(nullptr);
    if (s.lineage_ref)
        j["lineage_ref"] = Json{{"lineage_id", s.lineage_ref->lineage_id},
                                {"version_index", s.lineage_ref->version_index}};
    else
        j["lineage_ref"] = nullptr;
    j["elements"] = Json::array();
    for (const auto& e : s.elements) j["elements"].push_back(to_json(e));
    return j;
}

Json to_json(const Section& s) {
    Json j;
    j["id"] = s.id;
    j["title"] = s.title;
    j["duration_s"] = s.duration.count();
    j["emphasis"] = to_string(s.emphasis);
    j["slides"] = Json::array();
    for (const auto& sl : s.slides) j["slides"].push_back(to_json(sl));
    return j;
}

Json to_json(const Presentation& p) {
    Json j;
    j["id"] = p.id;
    j["title"] = p.title;
    j["total_duration_s"] = p.total_duration.count();
    j["audience"] = to_json(p.audience);
    j["created_at"] = format_timestamp(p.created_at);
    j["topic"] = p.topic ? Json(*p.topic) : Json(nullptr);
    j["sections"] = Json::array();
    for (const auto& s : p.sections) j["sections"].push_back(to_json(s));
    return j;
}

Json to_json(const Deck& d) {
    return Json{{"schema_version", d.schema_version}, {"presentation", to_json(d.presentation)}};
}

Bounds bounds_from_json(const Json& j, const std::string& pointer) {
    if (!j.is_object()) malformed(pointer, "expected an object");
    return Bounds{number_at(j, "x", pointer), number_at(j, "y", pointer),
                  number_at(j, "w", pointer), number_at(j, "h", pointer)};
}

AudienceProfile audience_from_json(const Json& j, const std::string& pointer) {
    if (!j.is_object()) malformed(pointer, "expected an object");
    long long level = integer_at(j, "expertise_level", pointer);
    if (level < INT32_MIN || level > INT32_MAX)
        malformed(pointer + "/expertise_level", "integer out of range");
    return AudienceProfile{static_cast<int>(level), string_at(j, "description", pointer)};
}

Element element_from_json(const Json& j, const std::string& pointer) {
    Element e;
    e.id = string_at(j, "id", pointer);
    auto kind = parse_element_kind(string_at(j, "kind", pointer));
    if (!kind) malformed(pointer + "/kind", "kind must be \"text\" or \"image\"");
    e.kind = *kind;
    e.content = string_at(j, "content", pointer);
    e.bounds = bounds_from_json(member(j, "bounds", pointer), pointer + "/bounds");
    return e;
}

Slide slide_from_json(const Json& j, const std::string& pointer) {
    Slide s;
    s.id = string_at(j, "id", pointer);
    s.title = optional_string_at(j, "title", pointer);
    auto ref = j.find("lineage_ref");
    if (ref != j.end() && !ref->is_null()) {
        std::string rp = pointer + "/lineage_ref";
        if (!ref->is_object()) malformed(rp, "expected an object or null");
        long long idx = integer_at(*ref, "version_index", rp);
        if (idx < 0 || idx > INT32_MAX) malformed(rp + "/version_index", "out of range");
        s.lineage_ref = LineageRef{string_at(*ref, "lineage_id", rp), static_cast<int>(idx)};
    }
    const Json& elems = array_at(j, "elements", pointer);
    for (std::size_t i = 0; i < elems.size(); ++i)
        s.elements.push_back(element_from_json(elems[i], pointer + "/elements/" + std::to_string(i)));
    return s;
}

Section section_from_json(const Json& j, const std::string& pointer) {
    Section s;
    s.id = string_at(j, "id", pointer);
    s.title = string_at(j, "title", pointer);
    s.duration = Seconds{integer_at(j, "duration_s", pointer)};
    auto emphasis = parse_emphasis(string_at(j, "emphasis", pointer));
    if (!emphasis)
        malformed(pointer + "/emphasis", "emphasis must be one of none, low, medium, high");
    s.emphasis = *emphasis;
    const Json& slides = array_at(j, "slides", pointer);
    for (std::size_t i = 0; i < slides.size(); ++i)
        s.slides.push_back(slide_from_json(slides[i], pointer + "/slides/" + std::to_string(i)));
    return s;
}

Presentation presentation_from_json(const Json& j, const std::string& pointer) {
    Presentation p;
    p.id = string_at(j, "id", pointer);
    p.title = string_at(j, "title", pointer);
    p.total_duration = Seconds{integer_at(j, "total_duration_s", pointer)};
    p.audience = audience_from_json(member(j, "audience", pointer), pointer + "/audience");
    if (auto created = optional_string_at(j, "created_at", pointer)) {
        auto ts = parse_timestamp(*created);
        if (!ts) malformed(pointer + "/created_at", "expected a UTC timestamp");
        p.created_at = *ts;
    }
    p.topic = optional_string_at(j, "topic", pointer);
    const Json& sections = array_at(j, "sections", pointer);
    for (std::size_t i = 0; i < sections.size(); ++i)
        p.sections.push_back(
            section_from_json(sections[i], pointer + "/sections/" + std::to_string(i)));
    return p;
}

std::vector<Violation> validate(const Presentation& p, const std::string& pointer) {
    std::vector<Violation> out;
    if (p.id.empty()) out.push_back({pointer + "/id", "presentation id must not be empty"});
    if (p.total_duration.count() <= 0)
        out.push_back({pointer + "/total_duration_s", "total duration must be positive"});
    if (p.audience.expertise_level < 1 || p.audience.expertise_level > 5)
        out.push_back({pointer + "/audience/expertise_level", "expertise level must be in [1,5]"});
    if (p.audience.description.find_first_not_of(" \t\r\n\f\v") == std::string::npos)
        out.push_back({pointer + "/audience/description", "audience description must not be empty"});

    std::set<std::string> section_ids;
    std::set<std::string> slide_ids;
    for (std::size_t i = 0; i < p.sections.size(); ++i) {
        const Section& s = p.sections[i];
        std::string sp = pointer + "/sections/" + std::to_string(i);
        if (s.id.empty()) out.push_back({sp + "/id", "section id must not be empty"});
        else if (!section_ids.insert(s.id).second)
            out.push_back({sp + "/id", "duplicate section id '" + s.id + "'"});
        if (s.duration.count() <= 0)
            out.push_back({sp + "/duration_s", "section duration must be positive"});
        for (std::size_t k = 0; k < s.slides.size(); ++k) {
            const Slide& sl = s.slides[k];
            std::string slp = sp + "/slides/" + std::to_string(k);
            if (sl.id.empty()) out.push_back({slp + "/id", "slide id must not be empty"});
            else if (!slide_ids.insert(sl.id).second)
                out.push_back({slp + "/id", "slide '" + sl.id + "' appears more than once"});
            if (sl.lineage_ref && sl.lineage_ref->lineage_id.empty())
                out.push_back({slp + "/lineage_ref/lineage_id", "lineage id must not be empty"});
            std::set<std::string> element_ids;
            for (std::size_t e = 0; e < sl.elements.size(); ++e) {
                const Element& el = sl.elements[e];
                std::string ep = slp + "/elements/" + std::to_string(e);
                if (el.id.empty()) out.push_back({ep + "/id", "element id must not be empty"});
                else if (!element_ids.insert(el.id).second)
                    out.push_back({ep + "/id", "duplicate element id '" + el.id + "'"});
                if (!bounds_valid(el.bounds))
                    out.push_back({ep + "/bounds", "bounds must lie within the unit square"});
                if (el.kind == ElementKind::Image && el.content.empty())
                    out.push_back({ep + "/content", "image element needs an asset reference"});
            }
        }
    }
    return out;
}

std::vector<Violation> validate(const Deck& deck) {
    return validate(deck.presentation, "/presentation");
}

Deck parse_deck(std::string_view bytes) {
    Json j;
    try {
        j = Json::parse(bytes.begin(), bytes.end());
    } catch (const Json::parse_error& e) {
        throw Error(Errc::malformed_document, std::string("not a JSON document: ") + e.what(),
                    Json{{"pointer", ""}});
    }
    if (!j.is_object()) malformed("", "expected a JSON object");
    long long version = integer_at(j, "schema_version", "");
    if (version != kDeckSchemaVersion)
        throw Error(Errc::unsupported_schema_version,
                    "unsupported schema_version " + std::to_string(version),
                    Json{{"pointer", "/schema_version"}});
    Deck d;
    d.schema_version = static_cast<int>(version);
    d.presentation = presentation_from_json(member(j, "presentation", ""), "/presentation");
    return d;
}

std::string serialize(const Deck& deck) {
    return dump(to_json(deck));
}

Deck deserialize(std::string_view bytes) {
    Deck d = parse_deck(bytes);
    auto violations = validate(d);
    if (!violations.empty()) {
        Json details = Json::array();
        for (const auto& v : violations)
            details.push_back(Json{{"pointer", v.pointer}, {"message", v.message}});
        throw Error(Errc::invalid_deck,
                    "deck violates " + std::to_string(violations.size()) + " invariant(s)",
                    Json{{"violations", details}});
    }
    return d;
}

} // namespace deckcraft
