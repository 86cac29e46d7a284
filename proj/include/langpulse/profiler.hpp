#pragma once

#include "langpulse/schema.hpp"

#include <array>
#include <memory>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

namespace langpulse {

enum class DataKind { integer, string };
enum class Exactness { exact, approximate };

const char* to_string(DataKind kind);
const char* to_string(Exactness exactness);

/// Type, min, max and distinct count of one column. String columns report
/// their extremes as character lengths.
struct ColumnProfile {
    std::string column_name;
    DataKind data_kind = DataKind::integer;
    std::optional<std::int64_t> min_value;
    std::optional<std::int64_t> max_value;
    std::uint64_t distinct_count = 0;
    Exactness exactness = Exactness::exact;
    std::uint64_t null_count = 0;

    bool operator==(const ColumnProfile&) const = default;
};

struct TableProfile {
    std::string table_name;
    std::uint64_t row_count = 0;
    std::vector<ColumnProfile> columns;

    bool operator==(const TableProfile&) const = default;
};

/// HyperLogLog with 2^14 six-bit-range registers and Ertl's improved estimator.
class HyperLogLog {
public:
    static constexpr int precision = 14;
    static constexpr std::size_t register_count = std::size_t{1} << precision;

    void add_hash(std::uint64_t hash);
    void merge(const HyperLogLog& other);
    double estimate() const;

    bool operator==(const HyperLogLog&) const = default;

private:
    std::array<std::uint8_t, register_count> registers_{};
};

std::uint64_t hash_value(std::int64_t v);
std::uint64_t hash_value(std::string_view v);

/// Number of UTF-8 code points.
std::size_t character_length(std::string_view s);

/// Single-pass, mergeable column accumulator.
class ColumnProfiler {
public:
    ColumnProfiler(std::string column_name, DataKind kind, Exactness mode = Exactness::exact);

    void add(const TypedValue& value);
    void add(std::int64_t value);
    void add(std::string_view value);
    void add_null() { ++null_count_; }

    /// Throws Error if the two profilers disagree on column kind or mode.
    void merge(const ColumnProfiler& other);
    ColumnProfile profile() const;

private:
    void observe_extreme(std::int64_t v);

    std::string column_name_;
    DataKind kind_;
    Exactness mode_;
    std::optional<std::int64_t> min_;
    std::optional<std::int64_t> max_;
    std::uint64_t null_count_ = 0;
    std::unordered_set<std::int64_t> int_values_;
    std::unordered_set<std::string> string_values_;
    std::unique_ptr<HyperLogLog> sketch_;
};

/// Profiles a sequence of non-null values of one kind. Mixed kinds throw Error.
ColumnProfile profile_column(std::span<const TypedValue> values, Exactness mode = Exactness::exact,
                             std::string column_name = {});

class TableProfiler {
public:
    explicit TableProfiler(const TableDescriptor& descriptor, Exactness mode = Exactness::exact);

    void add(const CleanRecord& record);
    void merge(const TableProfiler& other);
    TableProfile profile() const;

private:
    std::string table_name_;
    std::uint64_t rows_ = 0;
    std::vector<ColumnProfiler> columns_;
};

TableProfile profile_table(const TableDescriptor& descriptor, std::span<const CleanRecord> records,
                           Exactness mode = Exactness::exact);

/// Aligned text table: Columns, Data Type, Min, Max, Distinct.
void write_profile_text(std::ostream& out, const TableProfile& profile);

nlohmann::ordered_json to_json(const TableProfile& profile);
TableProfile table_profile_from_json(const nlohmann::json& j);

} // namespace langpulse
