#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace langpulse {

/// Raised for contract violations the caller can act on (unknown table,
/// empty series, bad configuration). Per-row data problems never throw.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The grouping key behind every metric: canonical language and calendar year.
struct LangYear {
    std::string language;
    int year = 0;

    auto operator<=>(const LangYear&) const = default;
    bool operator==(const LangYear&) const = default;
};

struct LangYearHash {
    std::size_t operator()(const LangYear& k) const noexcept
    {
        std::size_t h = std::hash<std::string>{}(k.language);
        return h ^ (static_cast<std::size_t>(k.year) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    }
};

inline std::uint64_t mix64(std::uint64_t x) noexcept
{
    // splitmix64 finalizer
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

} // namespace langpulse
