#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deckcraft/deck.hpp"
#include "deckcraft/error.hpp"

namespace deckcraft {

/// Ordered NoConflict < Low < Medium < High; rendered blue, yellow, orange, red.
enum class ConflictLevel { NoConflict = 0, Low = 1, Medium = 2, High = 3 };

std::string_view to_string(ConflictLevel level);

struct TimelineEntry {
    std::string section_id;
    Seconds start{0};
    Seconds end{0};
    Seconds duration{0};

    bool operator==(const TimelineEntry&) const = default;
};

/// Exact duration ratio of the more important over the less important section,
/// kept in lowest terms.
struct Ratio {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Ratio of(Seconds numerator, Seconds denominator);
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Ratio&) const = default;
};

/// <= 1/2 High, <= 3/4 Medium, <= 1 Low, otherwise NoConflict.
ConflictLevel classify_ratio(Ratio r);

struct ConflictPair {
    std::string more_important_id;
    std::string less_important_id;
    Ratio ratio;
    ConflictLevel level = ConflictLevel::NoConflict;

    bool operator==(const ConflictPair&) const = default;
};

struct SectionConflict {
    std::string section_id;
    ConflictLevel level = ConflictLevel::NoConflict;
    bool overflow = false;
    /// Only pairs that actually conflict, with this section on the more
    /// important side, in section order of the partner.
    std::vector<ConflictPair> pairs;

    bool operator==(const SectionConflict&) const = default;
};

struct ConflictReport {
    std::vector<SectionConflict> sections; // presentation order
    Seconds total_duration{0};
    Seconds sum_duration{0};

    const SectionConflict* find(std::string_view section_id) const;
    bool operator==(const ConflictReport&) const = default;
};

std::vector<TimelineEntry> compute_timeline(const Presentation& p);

/// Sections whose cumulative end exceeds the presentation's time limit, in
/// timeline order. A section ending exactly at the limit does not overflow.
std::vector<std::string> compute_overflow(const Presentation& p);

ConflictReport compute_conflicts(const Presentation& p);

Json to_json(const ConflictReport& report);

} // namespace deckcraft
