#include "deckcraft/constraints.hpp"

#include <algorithm>
#include <numeric>

namespace deckcraft {

std::string_view to_string(ConflictLevel level) {
    switch (level) {
    case ConflictLevel::NoConflict: return "none";
    case ConflictLevel::Low: return "low";
    case ConflictLevel::Medium: return "medium";
    case ConflictLevel::High: return "high";
    }
    return "none";
}

Ratio Ratio::of(Seconds numerator, Seconds denominator) {
    std::int64_t n = numerator.count(), d = denominator.count();
    std::int64_t g = std::gcd(n, d);
    if (g == 0) g = 1;
    return Ratio{n / g, d / g};
}

ConflictLevel classify_ratio(Ratio r) {
    // Integer cross-multiplication keeps the 1/2, 3/4 and 1 boundaries exact.
    if (2 * r.num <= r.den) return ConflictLevel::High;
    if (4 * r.num <= 3 * r.den) return ConflictLevel::Medium;
    if (r.num <= r.den) return ConflictLevel::Low;
    return ConflictLevel::NoConflict;
}

const SectionConflict* ConflictReport::find(std::string_view section_id) const {
    for (const auto& s : sections)
        if (s.section_id == section_id) return &s;
    return nullptr;
}

std::vector<TimelineEntry> compute_timeline(const Presentation& p) {
    std::vector<TimelineEntry> out;
    out.reserve(p.sections.size());
    Seconds cursor{0};
    for (const auto& s : p.sections) {
        out.push_back(TimelineEntry{s.id, cursor, cursor + s.duration, s.duration});
        cursor += s.duration;
    }
    return out;
}

std::vector<std::string> compute_overflow(const Presentation& p) {
    std::vector<std::string> out;
    for (const auto& entry : compute_timeline(p))
        if (entry.end > p.total_duration) out.push_back(entry.section_id);
    return out;
}

ConflictReport compute_conflicts(const Presentation& p) {
    ConflictReport report;
    report.total_duration = p.total_duration;
    report.sum_duration = sum_of_durations(p);

    auto overflow = compute_overflow(p);
    for (const auto& a : p.sections) {
        SectionConflict sc;
        sc.section_id = a.id;
        sc.overflow = std::find(overflow.begin(), overflow.end(), a.id) != overflow.end();
        if (a.emphasis != Emphasis::None) {
            for (const auto& b : p.sections) {
                if (b.emphasis == Emphasis::None || a.emphasis <= b.emphasis) continue;
                Ratio r = Ratio::of(a.duration, b.duration);
                ConflictLevel level = classify_ratio(r);
                if (level == ConflictLevel::NoConflict) continue;
                sc.pairs.push_back(ConflictPair{a.id, b.id, r, level});
                sc.level = std::max(sc.level, level);
            }
        }
        report.sections.push_back(std::move(sc));
    }
    return report;
}

Json to_json(const ConflictReport& report) {
    Json sections = Json::array();
    for (const auto& s : report.sections) {
        Json pairs = Json::array();
        for (const auto& pair : s.pairs)
            pairs.push_back(Json{{"other_id", pair.less_important_id}, {"ratio", pair.ratio.value()}});
        sections.push_back(Json{{"id", s.section_id},
                                {"conflict_level", to_string(s.level)},
                                {"overflow", s.overflow},
                                {"pairs", std::move(pairs)}});
    }
    return Json{{"sections", std::move(sections)},
                {"total_duration_s", report.total_duration.count()},
                {"sum_duration_s", report.sum_duration.count()}};
}

} // namespace deckcraft
