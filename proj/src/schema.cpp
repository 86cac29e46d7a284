#include "langpulse/schema.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <fstream>

namespace langpulse {

const char* to_string(ColumnKind kind)
{
    switch (kind) {
    case ColumnKind::integer: return "integer";
    case ColumnKind::string: return "string";
    case ColumnKind::timestamp: return "timestamp";
    }
    return "?";
}

const char* to_string(DropReason reason)
{
    switch (reason) {
    case DropReason::null_key: return "null_key";
    case DropReason::bad_year: return "bad_year";
    case DropReason::malformed: return "malformed";
    }
    return "?";
}

std::optional<std::size_t> TableDescriptor::column_index(std::string_view name) const
{
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].name == name)
            return i;
    return std::nullopt;
}

std::optional<std::size_t> TableDescriptor::year_column() const
{
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].year)
            return i;
    return std::nullopt;
}

std::optional<std::int64_t> CleanRecord::maybe_integer(std::size_t i) const
{
    if (const auto* v = std::get_if<std::int64_t>(&typed_values[i]))
        return *v;
    return std::nullopt;
}

IngestStats& IngestStats::operator+=(const IngestStats& other)
{
    rows_read += other.rows_read;
    rows_emitted += other.rows_emitted;
    rows_dropped_null_key += other.rows_dropped_null_key;
    rows_dropped_bad_year += other.rows_dropped_bad_year;
    rows_dropped_malformed += other.rows_dropped_malformed;
    return *this;
}

namespace {

ColumnDescriptor integer(std::string name, bool required = false)
{
    return {std::move(name), ColumnKind::integer, required, false, false};
}

ColumnDescriptor text(std::string name, bool required = false)
{
    return {std::move(name), ColumnKind::string, required, false, false};
}

ColumnDescriptor year_of(std::string name)
{
    return {std::move(name), ColumnKind::integer, true, false, true};
}

std::string pattern_for(std::string_view table) { return std::string(table) + "*.?sv"; }

} // namespace

const std::vector<std::string>& table_names()
{
    static const std::vector<std::string> names = {"projects", "commits",      "pull_requests", "pull_request_history",
                                                   "issues",   "issue_events", "posts"};
    return names;
}

TableDescriptor describe_table(std::string_view table_name)
{
    TableDescriptor d;
    d.table_name = std::string(table_name);
    d.source_pattern = pattern_for(table_name);
    if (table_name == "projects") {
        ColumnDescriptor language = text("language", true);
        language.language = true;
        d.columns = {integer("id", true), integer("owner_id"), language, year_of("year")};
    } else if (table_name == "commits") {
        d.columns = {integer("id"), integer("author_id"), integer("committer_id"), integer("project_id", true),
                     year_of("year")};
    } else if (table_name == "pull_requests") {
        d.columns = {integer("id", true),     integer("head_repo_id"),   integer("base_repo_id", true),
                     integer("head_commit_id"), integer("base_commit_id"), integer("pull_request_id")};
    } else if (table_name == "pull_request_history") {
        d.columns = {integer("id"), integer("pull_request_id", true), text("action", true), integer("actor_id"),
                     year_of("year")};
    } else if (table_name == "issues") {
        d.columns = {integer("id", true), integer("repo_id", true), integer("issue_id"), year_of("year")};
    } else if (table_name == "issue_events") {
        d.columns = {integer("event_id"), integer("issue_id", true), text("action", true), year_of("year")};
    } else if (table_name == "posts") {
        d.columns = {integer("_Id", true),    integer("_OwnerUserId", true), integer("_PostTypeId"),
                     integer("_Score", true), text("_Tag", true),            year_of("_CreationYear"),
                     integer("_AnswerCount", true)};
    } else {
        throw Error("unknown table: " + std::string(table_name));
    }
    return d;
}

TableDescriptor answers_descriptor()
{
    TableDescriptor d;
    d.table_name = "answers";
    d.source_pattern = pattern_for("answers");
    d.columns = {integer("answer_id", true), integer("question_id", true),
                 {"creation_time", ColumnKind::timestamp, true, false, true}};
    return d;
}

std::string normalize_name(std::string_view name)
{
    auto begin = name.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos)
        return {};
    auto end = name.find_last_not_of(" \t\r\n");
    std::string out(name.substr(begin, end - begin + 1));
    for (auto& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

LanguageAliasMap LanguageAliasMap::defaults()
{
    LanguageAliasMap m;
    static const std::pair<const char*, const char*> builtin[] = {
        {"golang", "go"},
        {"objective c", "objective-c"},
        {"objectivec", "objective-c"},
        {"obj-c", "objective-c"},
        {"c#", "c#"},
        {"csharp", "c#"},
        {"c-sharp", "c#"},
        {"cpp", "c++"},
        {"f#", "f#"},
        {"fsharp", "f#"},
        {"js", "javascript"},
        {"node.js", "javascript"},
        {"ts", "typescript"},
        {"vb.net", "visual basic"},
        {"vba", "visual basic"},
        {"shell", "shell"},
        {"bash", "shell"},
        {"viml", "vim script"},
        {"vimscript", "vim script"},
        {"emacs lisp", "emacs lisp"},
        {"elisp", "emacs lisp"},
        {"matlab", "matlab"},
        {"r", "r"},
        {"rlang", "r"},
        {"python3", "python"},
        {"python-3.x", "python"},
        {"python-2.7", "python"},
        {"java8", "java"},
        {"rustlang", "rust"},
    };
    for (const auto& [raw, canonical] : builtin)
        m.add(raw, canonical);
    return m;
}

LanguageAliasMap LanguageAliasMap::parse(std::istream& in)
{
    LanguageAliasMap m;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // '#' only starts a comment at the head of a line: c# and f# are names
        auto text = normalize_name(line);
        if (text.empty() || text.front() == '#')
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("alias file line " + std::to_string(line_no) + ": expected raw=canonical");
        std::string_view view(line);
        auto raw = normalize_name(view.substr(0, eq));
        auto canonical = normalize_name(view.substr(eq + 1));
        if (raw.empty() || canonical.empty())
            throw Error("alias file line " + std::to_string(line_no) + ": empty name");
        m.add(raw, canonical);
    }
    return m;
}

LanguageAliasMap LanguageAliasMap::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open alias file: " + path.string());
    return parse(in);
}

void LanguageAliasMap::add(std::string_view raw, std::string_view canonical)
{
    auto key = normalize_name(raw);
    auto target = normalize_name(canonical);
    // canonical names must be fixed points, and no existing target may be remapped
    if (auto it = entries_.find(target); it != entries_.end() && it->second != target)
        throw Error("alias target '" + target + "' is itself an alias of '" + it->second + "'");
    if (key != target) {
        for (const auto& [k, v] : entries_)
            if (v == key)
                throw Error("alias '" + key + "' is already the canonical name for '" + k + "'");
    }
    entries_[key] = target;
}

std::string LanguageAliasMap::canonicalize(std::string_view name) const
{
    auto key = normalize_name(name);
    if (auto it = entries_.find(key); it != entries_.end())
        return it->second;
    return key;
}

std::optional<std::vector<std::optional<std::string>>> split_line(std::string_view line, CsvDialect dialect)
{
    std::vector<std::optional<std::string>> fields;
    std::string field;
    bool quoted_field = false;
    std::size_t i = 0;
    const std::size_t n = line.size();

    auto finish = [&] {
        if (field.empty() || (!quoted_field && field == "\\N"))
            fields.emplace_back(std::nullopt);
        else
            fields.emplace_back(std::move(field));
        field.clear();
        quoted_field = false;
    };

    while (true) {
        if (i < n && line[i] == '"') {
            quoted_field = true;
            ++i;
            bool closed = false;
            while (i < n) {
                if (line[i] == '"') {
                    if (i + 1 < n && line[i + 1] == '"') {
                        field.push_back('"');
                        i += 2;
                        continue;
                    }
                    closed = true;
                    ++i;
                    break;
                }
                field.push_back(line[i++]);
            }
            if (!closed)
                return std::nullopt;
            if (i < n && line[i] != dialect.delimiter)
                return std::nullopt;
        } else {
            while (i < n && line[i] != dialect.delimiter) {
                if (line[i] == '"')
                    return std::nullopt;
                field.push_back(line[i++]);
            }
        }
        finish();
        if (i >= n)
            break;
        ++i; // delimiter
    }
    return fields;
}

RecordStream::RecordStream(const TableDescriptor& descriptor, std::istream& source, CsvDialect dialect)
    : descriptor_(descriptor), source_(source), dialect_(dialect)
{
    if (!source_)
        throw Error("unreadable source for table " + descriptor.table_name);
}

bool RecordStream::is_header(const std::vector<std::optional<std::string>>& fields) const
{
    if (fields.size() != descriptor_.arity())
        return false;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (!fields[i] || normalize_name(*fields[i]) != normalize_name(descriptor_.columns[i].name))
            return false;
    }
    return true;
}

std::optional<RawRecord> RecordStream::next()
{
    while (std::getline(source_, line_)) {
        if (!line_.empty() && line_.back() == '\r')
            line_.pop_back();
        if (line_.empty())
            continue;
        auto fields = split_line(line_, dialect_);
        if (first_line_) {
            first_line_ = false;
            if (fields && is_header(*fields))
                continue;
        }
        ++stats_.rows_read;
        if (!fields || fields->size() != descriptor_.arity()) {
            ++stats_.rows_dropped_malformed;
            continue;
        }
        ++stats_.rows_emitted;
        return RawRecord{std::move(*fields)};
    }
    if (source_.bad())
        throw Error("read error in table " + descriptor_.table_name);
    return std::nullopt;
}

namespace {

template <typename T>
std::optional<T> parse_number(std::string_view s)
{
    T value{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        return std::nullopt;
    return value;
}

std::optional<int> fixed_digits(std::string_view s, std::size_t pos, std::size_t count)
{
    if (pos + count > s.size())
        return std::nullopt;
    int value = 0;
    for (std::size_t i = pos; i < pos + count; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
            return std::nullopt;
        value = value * 10 + (s[i] - '0');
    }
    return value;
}

std::string_view trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

} // namespace

std::optional<ParsedTime> parse_time(std::string_view text)
{
    using namespace std::chrono;
    text = trim(text);
    if (text.size() == 4) {
        auto y = fixed_digits(text, 0, 4);
        if (!y)
            return std::nullopt;
        return ParsedTime{*y, std::nullopt};
    }
    auto y = fixed_digits(text, 0, 4);
    auto mo = fixed_digits(text, 5, 2);
    auto d = fixed_digits(text, 8, 2);
    if (!y || !mo || !d || text[4] != '-' || text[7] != '-')
        return std::nullopt;
    year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)}, day{static_cast<unsigned>(*d)}};
    if (!ymd.ok())
        return std::nullopt;
    std::int64_t seconds = sys_days{ymd}.time_since_epoch() / std::chrono::seconds{1};

    std::size_t pos = 10;
    if (pos < text.size()) {
        if (text[pos] != 'T' && text[pos] != ' ')
            return std::nullopt;
        auto hh = fixed_digits(text, pos + 1, 2);
        auto mm = fixed_digits(text, pos + 4, 2);
        if (!hh || !mm || text.size() < pos + 6 || text[pos + 3] != ':' || *hh > 23 || *mm > 59)
            return std::nullopt;
        int ss = 0;
        pos += 6;
        if (pos < text.size() && text[pos] == ':') {
            auto s = fixed_digits(text, pos + 1, 2);
            if (!s || *s > 60)
                return std::nullopt;
            ss = *s;
            pos += 3;
            if (pos < text.size() && text[pos] == '.') {
                ++pos;
                while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
                    ++pos;
            }
        }
        seconds += *hh * 3600 + *mm * 60 + ss;
        if (pos < text.size()) {
            if (text[pos] == 'Z' && pos + 1 == text.size()) {
                // UTC
            } else if ((text[pos] == '+' || text[pos] == '-') && text.size() == pos + 6 && text[pos + 3] == ':') {
                auto oh = fixed_digits(text, pos + 1, 2);
                auto om = fixed_digits(text, pos + 4, 2);
                if (!oh || !om)
                    return std::nullopt;
                int offset = *oh * 3600 + *om * 60;
                seconds -= text[pos] == '+' ? offset : -offset;
            } else {
                return std::nullopt;
            }
        }
    }
    auto utc_days = sys_days{days{static_cast<int>(seconds >= 0 ? seconds / 86400 : (seconds - 86399) / 86400)}};
    int utc_year = static_cast<int>(year_month_day{utc_days}.year());
    return ParsedTime{utc_year, seconds};
}

std::string format_timestamp(std::int64_t epoch_seconds)
{
    using namespace std::chrono;
    std::int64_t day_count = epoch_seconds >= 0 ? epoch_seconds / 86400 : (epoch_seconds - 86399) / 86400;
    std::int64_t rem = epoch_seconds - day_count * 86400;
    year_month_day ymd{sys_days{days{day_count}}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                  static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60));
    return buf;
}

CleanResult clean_record(const TableDescriptor& descriptor, const RawRecord& raw, const LanguageAliasMap& aliases,
                         YearRange years)
{
    if (raw.values.size() != descriptor.arity())
        return DropReason::malformed;

    CleanRecord out;
    out.table_name = descriptor.table_name;
    out.typed_values.reserve(descriptor.arity());

    bool missing_key = false;
    bool malformed = false;
    for (std::size_t i = 0; i < descriptor.arity(); ++i) {
        const auto& column = descriptor.columns[i];
        const auto& field = raw.values[i];
        std::optional<std::string> value = field;
        if (value && (value->empty() || *value == "\\N"))
            value.reset();
        if (value && column.kind != ColumnKind::string && trim(*value).empty())
            value.reset();
        if (!value) {
            missing_key |= column.required;
            out.typed_values.emplace_back(std::monostate{});
            continue;
        }

        if (column.year) {
            auto parsed = parse_time(*value);
            if (!parsed) {
                malformed = true;
                out.typed_values.emplace_back(std::monostate{});
                continue;
            }
            out.year = parsed->year;
            out.timestamp = parsed->epoch_seconds;
            if (column.kind == ColumnKind::timestamp && parsed->epoch_seconds)
                out.typed_values.emplace_back(*parsed->epoch_seconds);
            else
                out.typed_values.emplace_back(static_cast<std::int64_t>(parsed->year));
            continue;
        }

        switch (column.kind) {
        case ColumnKind::integer: {
            auto n = parse_number<std::int64_t>(trim(*value));
            if (!n) {
                malformed = true;
                out.typed_values.emplace_back(std::monostate{});
            } else {
                out.typed_values.emplace_back(*n);
            }
            break;
        }
        case ColumnKind::timestamp: {
            auto parsed = parse_time(*value);
            if (!parsed || !parsed->epoch_seconds) {
                malformed = true;
                out.typed_values.emplace_back(std::monostate{});
            } else {
                out.typed_values.emplace_back(*parsed->epoch_seconds);
            }
            break;
        }
        case ColumnKind::string:
            if (column.language) {
                auto canonical = aliases.canonicalize(*value);
                if (canonical.empty()) {
                    missing_key |= column.required;
                    out.typed_values.emplace_back(std::monostate{});
                } else {
                    out.typed_values.emplace_back(std::move(canonical));
                }
            } else {
                out.typed_values.emplace_back(*value);
            }
            break;
        }
    }

    if (malformed)
        return DropReason::malformed;
    if (missing_key)
        return DropReason::null_key;
    if (out.year && !years.contains(*out.year))
        return DropReason::bad_year;
    return out;
}

RawRecord to_raw(const TableDescriptor& descriptor, const CleanRecord& record)
{
    RawRecord raw;
    raw.values.reserve(descriptor.arity());
    for (std::size_t i = 0; i < descriptor.arity(); ++i) {
        const auto& v = record.typed_values[i];
        if (std::holds_alternative<std::monostate>(v)) {
            raw.values.emplace_back(std::nullopt);
        } else if (descriptor.columns[i].year && record.timestamp) {
            raw.values.emplace_back(format_timestamp(*record.timestamp));
        } else if (const auto* n = std::get_if<std::int64_t>(&v)) {
            if (descriptor.columns[i].kind == ColumnKind::timestamp)
                raw.values.emplace_back(format_timestamp(*n));
            else
                raw.values.emplace_back(std::to_string(*n));
        } else {
            raw.values.emplace_back(std::get<std::string>(v));
        }
    }
    return raw;
}

std::vector<std::string> explode_post_tags(std::string_view raw_tag_field, const LanguageAliasMap& aliases,
                                           const std::set<std::string>& allowed)
{
    std::vector<std::string> tags;
    auto accept = [&](std::string_view tag) {
        auto canonical = aliases.canonicalize(tag);
        if (canonical.empty() || !allowed.contains(canonical))
            return;
        if (std::find(tags.begin(), tags.end(), canonical) == tags.end())
            tags.push_back(std::move(canonical));
    };

    auto field = trim(raw_tag_field);
    if (field.find('<') == std::string_view::npos) {
        accept(field);
        return tags;
    }
    std::size_t pos = 0;
    while ((pos = field.find('<', pos)) != std::string_view::npos) {
        auto close = field.find('>', pos + 1);
        if (close == std::string_view::npos)
            break;
        accept(field.substr(pos + 1, close - pos - 1));
        pos = close + 1;
    }
    return tags;
}

IngestStats ingest_stream(const TableDescriptor& descriptor, std::istream& source, const LanguageAliasMap& aliases,
                          const IngestOptions& options, const CleanSink& sink)
{
    RecordStream stream(descriptor, source, options.dialect);
    IngestStats cleaning;
    while (auto raw = stream.next()) {
        auto result = clean_record(descriptor, *raw, aliases, options.years);
        if (auto* rec = std::get_if<CleanRecord>(&result)) {
            ++cleaning.rows_emitted;
            sink(std::move(*rec));
            continue;
        }
        switch (std::get<DropReason>(result)) {
        case DropReason::null_key: ++cleaning.rows_dropped_null_key; break;
        case DropReason::bad_year: ++cleaning.rows_dropped_bad_year; break;
        case DropReason::malformed: ++cleaning.rows_dropped_malformed; break;
        }
    }
    IngestStats stats = stream.stats();
    stats.rows_emitted = cleaning.rows_emitted;
    stats.rows_dropped_null_key += cleaning.rows_dropped_null_key;
    stats.rows_dropped_bad_year += cleaning.rows_dropped_bad_year;
    stats.rows_dropped_malformed += cleaning.rows_dropped_malformed;
    return stats;
}

bool glob_match(std::string_view pattern, std::string_view name)
{
    std::size_t p = 0, n = 0, star = std::string_view::npos, mark = 0;
    while (n < name.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
            ++p;
            ++n;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = n;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            n = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*')
        ++p;
    return p == pattern.size();
}

std::vector<std::filesystem::path> table_sources(const TableDescriptor& descriptor, const std::filesystem::path& dir)
{
    std::vector<std::filesystem::path> out;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && glob_match(descriptor.source_pattern, entry.path().filename().string()))
            out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

IngestStats ingest_table(const TableDescriptor& descriptor, const std::filesystem::path& dir,
                         const LanguageAliasMap& aliases, const IngestOptions& options, const CleanSink& sink)
{
    auto sources = table_sources(descriptor, dir);
    if (sources.empty())
        throw Error("missing input for table " + descriptor.table_name + " in " + dir.string());
    IngestStats total;
    for (const auto& path : sources) {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw Error("cannot open " + path.string() + " for table " + descriptor.table_name);
        total += ingest_stream(descriptor, in, aliases, options, sink);
    }
    return total;
}

} // namespace langpulse
