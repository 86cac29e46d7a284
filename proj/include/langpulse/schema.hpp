#pragma once

#include "langpulse/common.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace langpulse {

enum class ColumnKind { integer, string, timestamp };

const char* to_string(ColumnKind kind);

struct ColumnDescriptor {
    std::string name;
    ColumnKind kind = ColumnKind::integer;
    /// Rows with a null here are dropped during cleaning.
    bool required = false;
    /// Canonicalized through the alias map while cleaning.
    bool language = false;
    /// Source of the record's calendar year. Accepts a bare year or a timestamp.
    bool year = false;
};

struct TableDescriptor {
    std::string table_name;
    std::vector<ColumnDescriptor> columns;
    std::string source_pattern;

    std::size_t arity() const { return columns.size(); }
    std::optional<std::size_t> column_index(std::string_view name) const;
    std::optional<std::size_t> year_column() const;
};

/// Names of the seven dump tables, in pipeline order.
const std::vector<std::string>& table_names();

/// Descriptor for one of the six GitHub tables or `posts`.
/// Throws Error naming the table when it is unknown.
TableDescriptor describe_table(std::string_view table_name);

/// Side input linking answers to questions: answer_id, question_id, creation_time.
TableDescriptor answers_descriptor();

// Column positions, fixed by the descriptors above.
namespace col {
namespace projects { inline constexpr std::size_t id = 0, owner_id = 1, language = 2, year = 3; }
namespace commits { inline constexpr std::size_t id = 0, author_id = 1, committer_id = 2, project_id = 3, year = 4; }
namespace pull_requests {
inline constexpr std::size_t id = 0, head_repo_id = 1, base_repo_id = 2, head_commit_id = 3, base_commit_id = 4,
                             pull_request_id = 5;
}
namespace pull_request_history { inline constexpr std::size_t id = 0, pull_request_id = 1, action = 2, actor_id = 3, year = 4; }
namespace issues { inline constexpr std::size_t id = 0, repo_id = 1, issue_id = 2, year = 3; }
namespace issue_events { inline constexpr std::size_t event_id = 0, issue_id = 1, action = 2, year = 3; }
namespace posts {
inline constexpr std::size_t id = 0, owner_user_id = 1, post_type_id = 2, score = 3, tag = 4, creation_year = 5,
                             answer_count = 6;
}
namespace answers { inline constexpr std::size_t answer_id = 0, question_id = 1, creation_time = 2; }
} // namespace col

struct RawRecord {
    std::vector<std::optional<std::string>> values;
};

using TypedValue = std::variant<std::monostate, std::int64_t, std::string>;

struct CleanRecord {
    std::string table_name;
    std::vector<TypedValue> typed_values;
    /// Calendar year from the descriptor's year column; absent for tables without one.
    std::optional<int> year;
    /// Seconds since the Unix epoch (UTC) when the year column carried a full timestamp.
    std::optional<std::int64_t> timestamp;

    bool is_null(std::size_t i) const { return std::holds_alternative<std::monostate>(typed_values[i]); }
    std::int64_t integer(std::size_t i) const { return std::get<std::int64_t>(typed_values[i]); }
    std::optional<std::int64_t> maybe_integer(std::size_t i) const;
    const std::string& text(std::size_t i) const { return std::get<std::string>(typed_values[i]); }

    bool operator==(const CleanRecord&) const = default;
};

struct IngestStats {
    std::uint64_t rows_read = 0;
    std::uint64_t rows_emitted = 0;
    std::uint64_t rows_dropped_null_key = 0;
    std::uint64_t rows_dropped_bad_year = 0;
    std::uint64_t rows_dropped_malformed = 0;

    std::uint64_t rows_dropped() const { return rows_dropped_null_key + rows_dropped_bad_year + rows_dropped_malformed; }
    bool balanced() const { return rows_read == rows_emitted + rows_dropped(); }

    IngestStats& operator+=(const IngestStats& other);
    bool operator==(const IngestStats&) const = default;
};

/// Case-insensitive raw name -> canonical lowercase language.
class LanguageAliasMap {
public:
    LanguageAliasMap() = default;

    /// The built-in alias set (golang -> go, objective c -> objective-c, ...).
    static LanguageAliasMap defaults();
    /// Parses `raw=canonical` lines; `#` starts a comment. Throws Error on a bad line or alias cycle.
    static LanguageAliasMap parse(std::istream& in);
    static LanguageAliasMap load(const std::filesystem::path& path);

    /// Adds or replaces an alias. Throws Error if this would make canonicalization non-idempotent.
    void add(std::string_view raw, std::string_view canonical);
    std::string canonicalize(std::string_view name) const;

    std::size_t size() const { return entries_.size(); }
    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

/// Trimmed, ASCII-lowercased copy.
std::string normalize_name(std::string_view name);

struct CsvDialect {
    char delimiter = ',';
};

/// Splits one line into fields. Returns nullopt for unbalanced quoting.
/// Empty fields and the two-character `\N` marker become null.
std::optional<std::vector<std::optional<std::string>>> split_line(std::string_view line, CsvDialect dialect);

/// Pull-based reader over a delimiter-separated stream. Memory use is bounded by
/// the longest line, never by the number of rows.
class RecordStream {
public:
    RecordStream(const TableDescriptor& descriptor, std::istream& source, CsvDialect dialect = {});

    /// Next well-formed record; malformed lines are counted and skipped.
    std::optional<RawRecord> next();

    /// rows_read, rows_emitted and rows_dropped_malformed for what has been consumed so far.
    const IngestStats& stats() const { return stats_; }
    std::size_t buffer_capacity() const { return line_.capacity(); }

private:
    bool is_header(const std::vector<std::optional<std::string>>& fields) const;

    const TableDescriptor& descriptor_;
    std::istream& source_;
    CsvDialect dialect_;
    std::string line_;
    IngestStats stats_;
    bool first_line_ = true;
};

enum class DropReason { null_key, bad_year, malformed };

const char* to_string(DropReason reason);

struct YearRange {
    int min_year = 2005;
    int max_year = 2020;

    bool contains(int y) const { return y >= min_year && y <= max_year; }
};

struct ParsedTime {
    int year = 0;
    /// Present only when the text carried a date, not a bare year.
    std::optional<std::int64_t> epoch_seconds;
};

/// Accepts `YYYY`, `YYYY-MM-DD`, or `YYYY-MM-DD[T ]HH:MM[:SS[.fff]][Z|+HH:MM|-HH:MM]`.
/// Offsets are applied so the result is UTC.
std::optional<ParsedTime> parse_time(std::string_view text);

/// ISO-8601 UTC rendering, `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_timestamp(std::int64_t epoch_seconds);

using CleanResult = std::variant<CleanRecord, DropReason>;

CleanResult clean_record(const TableDescriptor& descriptor, const RawRecord& raw, const LanguageAliasMap& aliases,
                         YearRange years);

/// Inverse rendering of a clean record, used to check that cleaning is idempotent.
RawRecord to_raw(const TableDescriptor& descriptor, const CleanRecord& record);

/// Splits a `<a><b>` tag string (or a single bare tag), canonicalizes each tag and keeps
/// those in `allowed`, deduplicated in first-seen order.
std::vector<std::string> explode_post_tags(std::string_view raw_tag_field, const LanguageAliasMap& aliases,
                                           const std::set<std::string>& allowed);

struct IngestOptions {
    CsvDialect dialect;
    YearRange years;
};

using CleanSink = std::function<void(CleanRecord&&)>;

/// Streams and cleans one source, handing each surviving record to `sink`.
IngestStats ingest_stream(const TableDescriptor& descriptor, std::istream& source, const LanguageAliasMap& aliases,
                          const IngestOptions& options, const CleanSink& sink);

/// Files in `dir` matching the descriptor's source pattern, sorted by name.
std::vector<std::filesystem::path> table_sources(const TableDescriptor& descriptor, const std::filesystem::path& dir);

/// Ingests every file of a table. Throws Error naming the table when no file exists or one cannot be opened.
IngestStats ingest_table(const TableDescriptor& descriptor, const std::filesystem::path& dir,
                         const LanguageAliasMap& aliases, const IngestOptions& options, const CleanSink& sink);

bool glob_match(std::string_view pattern, std::string_view name);

} // namespace langpulse
