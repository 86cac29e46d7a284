#include "langpulse/profiler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <memory>

namespace langpulse {

const char* to_string(DataKind kind) { return kind == DataKind::integer ? "Integer" : "String"; }
const char* to_string(Exactness exactness) { return exactness == Exactness::exact ? "exact" : "approximate"; }

std::uint64_t hash_value(std::int64_t v) { return mix64(static_cast<std::uint64_t>(v) ^ 0x5bd1e9955bd1e995ULL); }

std::uint64_t hash_value(std::string_view v) { return mix64(std::hash<std::string_view>{}(v)); }

std::size_t character_length(std::string_view s)
{
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

void HyperLogLog::add_hash(std::uint64_t hash)
{
    constexpr int q = 64 - precision;
    auto index = hash >> q;
    auto rest = hash << precision;
    int rank = rest == 0 ? q + 1 : std::min(std::countl_zero(rest), q) + 1;
    auto& reg = registers_[index];
    if (rank > reg)
        reg = static_cast<std::uint8_t>(rank);
}

void HyperLogLog::merge(const HyperLogLog& other)
{
    for (std::size_t i = 0; i < register_count; ++i)
        registers_[i] = std::max(registers_[i], other.registers_[i]);
}

namespace {

double hll_sigma(double x)
{
    if (x == 1.0)
        return std::numeric_limits<double>::infinity();
    double y = 1.0, z = x;
    while (true) {
        x *= x;
        double prev = z;
        z += x * y;
        y += y;
        if (z == prev)
            return z;
    }
}

double hll_tau(double x)
{
    if (x == 0.0 || x == 1.0)
        return 0.0;
    double y = 1.0, z = 1.0 - x;
    while (true) {
        x = std::sqrt(x);
        double prev = z;
        y *= 0.5;
        z -= (1.0 - x) * (1.0 - x) * y;
        if (z == prev)
            return z / 3.0;
    }
}

} // namespace

double HyperLogLog::estimate() const
{
    constexpr int q = 64 - precision;
    std::array<std::uint64_t, q + 2> histogram{};
    for (auto r : registers_)
        ++histogram[r];
    const double m = static_cast<double>(register_count);
    double z = m * hll_tau(1.0 - static_cast<double>(histogram[q + 1]) / m);
    for (int k = q; k >= 1; --k)
        z = 0.5 * (z + static_cast<double>(histogram[k]));
    z += m * hll_sigma(static_cast<double>(histogram[0]) / m);
    constexpr double alpha_inf = 0.72134752044448170368; // 1 / (2 ln 2)
    return alpha_inf * m * m / z;
}

ColumnProfiler::ColumnProfiler(std::string column_name, DataKind kind, Exactness mode)
    : column_name_(std::move(column_name)), kind_(kind), mode_(mode)
{
    if (mode_ == Exactness::approximate)
        sketch_ = std::make_unique<HyperLogLog>();
}

void ColumnProfiler::observe_extreme(std::int64_t v)
{
    if (!min_ || v < *min_)
        min_ = v;
    if (!max_ || v > *max_)
        max_ = v;
}

void ColumnProfiler::add(std::int64_t value)
{
    if (kind_ != DataKind::integer)
        throw Error("column " + column_name_ + ": integer value in string column");
    observe_extreme(value);
    if (sketch_)
        sketch_->add_hash(hash_value(value));
    else
        int_values_.insert(value);
}

void ColumnProfiler::add(std::string_view value)
{
    if (kind_ != DataKind::string)
        throw Error("column " + column_name_ + ": string value in integer column");
    observe_extreme(static_cast<std::int64_t>(character_length(value)));
    if (sketch_)
        sketch_->add_hash(hash_value(value));
    else
        string_values_.emplace(value);
}

void ColumnProfiler::add(const TypedValue& value)
{
    if (const auto* n = std::get_if<std::int64_t>(&value))
        add(*n);
    else if (const auto* s = std::get_if<std::string>(&value))
        add(std::string_view(*s));
    else
        add_null();
}

void ColumnProfiler::merge(const ColumnProfiler& other)
{
    if (kind_ != other.kind_ || mode_ != other.mode_)
        throw Error("column " + column_name_ + ": cannot merge profiles of different kind or mode");
    if (other.min_)
        observe_extreme(*other.min_);
    if (other.max_)
        observe_extreme(*other.max_);
    null_count_ += other.null_count_;
    if (sketch_) {
        sketch_->merge(*other.sketch_);
    } else {
        int_values_.insert(other.int_values_.begin(), other.int_values_.end());
        string_values_.insert(other.string_values_.begin(), other.string_values_.end());
    }
}

ColumnProfile ColumnProfiler::profile() const
{
    ColumnProfile p;
    p.column_name = column_name_;
    p.data_kind = kind_;
    p.min_value = min_;
    p.max_value = max_;
    p.exactness = mode_;
    p.null_count = null_count_;
    if (sketch_) {
        p.distinct_count = min_ ? std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(sketch_->estimate())))
                                : 0;
    } else {
        p.distinct_count = kind_ == DataKind::integer ? int_values_.size() : string_values_.size();
    }
    return p;
}

ColumnProfile profile_column(std::span<const TypedValue> values, Exactness mode, std::string column_name)
{
    std::optional<DataKind> kind;
    for (const auto& v : values) {
        std::optional<DataKind> k;
        if (std::holds_alternative<std::int64_t>(v))
            k = DataKind::integer;
        else if (std::holds_alternative<std::string>(v))
            k = DataKind::string;
        if (!k)
            continue;
        if (kind && *kind != *k)
            throw Error("column " + column_name + ": mixed value kinds");
        kind = k;
    }
    ColumnProfiler profiler(std::move(column_name), kind.value_or(DataKind::integer), mode);
    for (const auto& v : values)
        profiler.add(v);
    return profiler.profile();
}

TableProfiler::TableProfiler(const TableDescriptor& descriptor, Exactness mode) : table_name_(descriptor.table_name)
{
    columns_.reserve(descriptor.arity());
    for (const auto& c : descriptor.columns)
        columns_.emplace_back(c.name, c.kind == ColumnKind::string ? DataKind::string : DataKind::integer, mode);
}

void TableProfiler::add(const CleanRecord& record)
{
    ++rows_;
    for (std::size_t i = 0; i < columns_.size(); ++i)
        columns_[i].add(record.typed_values[i]);
}

void TableProfiler::merge(const TableProfiler& other)
{
    if (other.table_name_ != table_name_ || other.columns_.size() != columns_.size())
        throw Error("cannot merge profiles of tables " + table_name_ + " and " + other.table_name_);
    rows_ += other.rows_;
    for (std::size_t i = 0; i < columns_.size(); ++i)
        columns_[i].merge(other.columns_[i]);
}

TableProfile TableProfiler::profile() const
{
    TableProfile p;
    p.table_name = table_name_;
    p.row_count = rows_;
    for (const auto& c : columns_)
        p.columns.push_back(c.profile());
    return p;
}

TableProfile profile_table(const TableDescriptor& descriptor, std::span<const CleanRecord> records, Exactness mode)
{
    TableProfiler profiler(descriptor, mode);
    for (const auto& r : records)
        profiler.add(r);
    return profiler.profile();
}

void write_profile_text(std::ostream& out, const TableProfile& profile)
{
    out << profile.table_name << ": " << profile.row_count << " rows\n";
    std::vector<std::array<std::string, 5>> rows;
    rows.push_back({"Columns", "Data Type", "Min", "Max", "Distinct"});
    for (const auto& c : profile.columns) {
        rows.push_back({c.column_name, to_string(c.data_kind), c.min_value ? std::to_string(*c.min_value) : "-",
                        c.max_value ? std::to_string(*c.max_value) : "-",
                        (c.exactness == Exactness::approximate ? "~" : "") + std::to_string(c.distinct_count)});
    }
    std::array<std::size_t, 5> width{};
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.size(); ++i)
            width[i] = std::max(width[i], r[i].size());
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i == 0)
                out << std::left << std::setw(static_cast<int>(width[i])) << r[i];
            else
                out << "  " << std::right << std::setw(static_cast<int>(width[i])) << r[i];
        }
        out << '\n';
    }
    out << std::left;
}

nlohmann::ordered_json to_json(const TableProfile& profile)
{
    nlohmann::ordered_json j;
    j["table"] = profile.table_name;
    j["row_count"] = profile.row_count;
    auto& columns = j["columns"] = nlohmann::ordered_json::array();
    for (const auto& c : profile.columns) {
        nlohmann::ordered_json col;
        col["column"] = c.column_name;
        col["data_type"] = to_string(c.data_kind);
        col["min"] = c.min_value ? nlohmann::ordered_json(*c.min_value) : nlohmann::ordered_json(nullptr);
        col["max"] = c.max_value ? nlohmann::ordered_json(*c.max_value) : nlohmann::ordered_json(nullptr);
        col["distinct"] = c.distinct_count;
        col["exactness"] = to_string(c.exactness);
        col["null_count"] = c.null_count;
        columns.push_back(std::move(col));
    }
    return j;
}

TableProfile table_profile_from_json(const nlohmann::json& j)
{
    TableProfile p;
    p.table_name = j.at("table").get<std::string>();
    p.row_count = j.at("row_count").get<std::uint64_t>();
    for (const auto& col : j.at("columns")) {
        ColumnProfile c;
        c.column_name = col.at("column").get<std::string>();
        c.data_kind = col.at("data_type").get<std::string>() == "String" ? DataKind::string : DataKind::integer;
        if (!col.at("min").is_null())
            c.min_value = col.at("min").get<std::int64_t>();
        if (!col.at("max").is_null())
            c.max_value = col.at("max").get<std::int64_t>();
        c.distinct_count = col.at("distinct").get<std::uint64_t>();
        c.exactness = col.at("exactness").get<std::string>() == "exact" ? Exactness::exact : Exactness::approximate;
        c.null_count = col.at("null_count").get<std::uint64_t>();
        p.columns.push_back(std::move(c));
    }
    return p;
}

} // namespace langpulse
