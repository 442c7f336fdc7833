#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>

namespace deckcraft {

using Timestamp = std::chrono::sys_time<std::chrono::microseconds>;

/// "2026-10-16T09:30:00.000000Z"
std::string format_timestamp(Timestamp ts);
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Source of identifiers and wall-clock time for every engine operation that
/// creates something. The deterministic variant makes two executions of the
/// same operation sequence produce identical ids and timestamps.
class Minter {
public:
    Minter();

    /// Deterministic: seeded ids and a clock that advances by `step` per read.
    Minter(std::uint64_t seed, Timestamp start,
           std::chrono::microseconds step = std::chrono::seconds(1));

    /// UUID-v4 shaped random identifier.
    std::string next_id();
    Timestamp now();

private:
    std::mutex mutex_;
    std::mt19937_64 rng_;
    std::optional<Timestamp> fake_clock_;
    std::chrono::microseconds step_{0};
};

Minter& default_minter();

/// Name-based UUID-shaped id: the same (scope, name) always yields the same
/// id, and different scopes yield unrelated ids.
std::string derive_id(std::string_view scope, std::string_view name);

} // namespace deckcraft
