#include "deckcraft/minter.hpp"

#include <cstdio>
#include <ctime>

#include <openssl/evp.h>

namespace deckcraft {

std::string format_timestamp(Timestamp ts) {
    using namespace std::chrono;
    auto secs = floor<seconds>(ts);
    auto micros = duration_cast<microseconds>(ts - secs).count();
    std::time_t t = system_clock::to_time_t(secs);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%06lldZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                  static_cast<long long>(micros));
    return buf;
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    // Fixed layout only: YYYY-MM-DDTHH:MM:SS.ffffffZ
    if (text.size() != 27 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
        text[13] != ':' || text[16] != ':' || text[19] != '.' || text[26] != 'Z')
        return std::nullopt;
    auto num = [&](std::size_t pos, std::size_t len) -> long long {
        long long v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            char c = text[i];
            if (c < '0' || c > '9') return -1;
            v = v * 10 + (c - '0');
        }
        return v;
    };
    long long year = num(0, 4), mon = num(5, 2), day = num(8, 2), hour = num(11, 2),
              min = num(14, 2), sec = num(17, 2), micro = num(20, 6);
    if (year < 0 || mon < 1 || mon > 12 || day < 1 || day > 31 || hour < 0 || hour > 23 ||
        min < 0 || min > 59 || sec < 0 || sec > 60 || micro < 0)
        return std::nullopt;
    using namespace std::chrono;
    year_month_day ymd{std::chrono::year(static_cast<int>(year)),
                       std::chrono::month(static_cast<unsigned>(mon)),
                       std::chrono::day(static_cast<unsigned>(day))};
    if (!ymd.ok()) return std::nullopt;
    return Timestamp{sys_days(ymd)} + hours(hour) + minutes(min) + seconds(sec) +
           microseconds(micro);
}

Minter::Minter() : rng_(std::random_device{}()) {
    // random_device yields 32 bits; mix in a second draw for the high word.
    rng_.seed((static_cast<std::uint64_t>(std::random_device{}()) << 32) ^ rng_());
}

Minter::Minter(std::uint64_t seed, Timestamp start, std::chrono::microseconds step)
    : rng_(seed), fake_clock_(start), step_(step) {}

namespace {

std::string format_uuid(std::uint64_t hi, std::uint64_t lo, unsigned version) {
    hi = (hi & 0xffffffffffff0fffULL) | (static_cast<std::uint64_t>(version) << 12);
    lo = (lo & 0x3fffffffffffffffULL) | 0x8000000000000000ULL;
    char buf[37];
    std::snprintf(buf, sizeof buf, "%08llx-%04llx-%04llx-%04llx-%012llx",
                  static_cast<unsigned long long>(hi >> 32),
                  static_cast<unsigned long long>((hi >> 16) & 0xffff),
                  static_cast<unsigned long long>(hi & 0xffff),
                  static_cast<unsigned long long>(lo >> 48),
                  static_cast<unsigned long long>(lo & 0xffffffffffffULL));
    return buf;
}

} // namespace

std::string Minter::next_id() {
    std::uint64_t hi, lo;
    {
        std::lock_guard lock(mutex_);
        hi = rng_();
        lo = rng_();
    }
    return format_uuid(hi, lo, 4);
}

std::string derive_id(std::string_view scope, std::string_view name) {
    std::string input;
    input.reserve(scope.size() + name.size() + 1);
    input.append(scope).push_back('\0');
    input.append(name);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(input.data(), input.size(), digest, &len, EVP_sha256(), nullptr);
    std::uint64_t hi = 0, lo = 0;
    for (int i = 0; i < 8; ++i) {
        hi = (hi << 8) | digest[i];
        lo = (lo << 8) | digest[8 + i];
    }
    return format_uuid(hi, lo, 5);
}

Timestamp Minter::now() {
    std::lock_guard lock(mutex_);
    if (fake_clock_) {
        auto t = *fake_clock_;
        *fake_clock_ += step_;
        return t;
    }
    return std::chrono::time_point_cast<std::chrono::microseconds>(
        std::chrono::system_clock::now());
}

Minter& default_minter() {
    static Minter minter;
    return minter;
}

} // namespace deckcraft
