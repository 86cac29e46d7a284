#pragma once

#include "langpulse/common.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

namespace langpulse {

/// Per-key counters produced by any pre-aggregation stage.
/// Merging is key-wise addition, so it is associative and commutative.
template <typename Key, typename Hash = std::hash<Key>, typename Value = std::int64_t>
class PartialCounts {
public:
    using key_type = Key;
    using value_type = Value;
    using map_type = std::unordered_map<Key, Value, Hash>;

    void add(const Key& key, Value v = 1) { cells_[key] += v; }

    void merge(const PartialCounts& other)
    {
        for (const auto& [k, v] : other.cells_)
            cells_[k] += v;
    }

    Value get(const Key& key) const
    {
        auto it = cells_.find(key);
        return it == cells_.end() ? Value{} : it->second;
    }

    bool contains(const Key& key) const { return cells_.contains(key); }
    std::size_t size() const { return cells_.size(); }
    bool empty() const { return cells_.empty(); }

    Value total() const
    {
        Value sum{};
        for (const auto& [k, v] : cells_)
            sum += v;
        return sum;
    }

    /// Cells in ascending key order.
    std::vector<std::pair<Key, Value>> sorted() const
    {
        std::vector<std::pair<Key, Value>> out(cells_.begin(), cells_.end());
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        return out;
    }

    auto begin() const { return cells_.begin(); }
    auto end() const { return cells_.end(); }

    bool operator==(const PartialCounts& other) const { return cells_ == other.cells_; }

private:
    map_type cells_;
};

using LangYearCounts = PartialCounts<LangYear, LangYearHash>;

} // namespace langpulse
