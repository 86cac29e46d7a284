#include "langpulse/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace langpulse {

std::string format_real(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s(buf);
    if (auto dot = s.find('.'); dot != std::string::npos) {
        while (s.back() == '0')
            s.pop_back();
        if (s.back() == '.')
            s.pop_back();
    }
    if (s == "-0")
        s = "0";
    return s;
}

std::string format_optional(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

double round_trip(double v) { return std::stod(format_real(v)); }

std::string composite_header()
{
    std::string h = "language,year";
    for (const auto& f : composite_fields()) {
        h += ',';
        h += f.name;
    }
    return h;
}

namespace {

std::string csv_field(std::string_view s)
{
    if (s.find_first_of(",\"\n") == std::string_view::npos)
        return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

using Fields = std::vector<std::optional<std::string>>;

/// Reads a CSV with an exact header; returns the data rows.
std::vector<Fields> read_rows(std::istream& in, std::string_view header, const char* what)
{
    std::string line;
    if (!std::getline(in, line))
        throw Error(std::string(what) + ": missing header");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != header)
        throw Error(std::string(what) + ": unexpected header '" + line + "'");
    auto columns = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
    std::vector<Fields> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        auto fields = split_line(line, {});
        if (!fields || fields->size() != columns)
            throw Error(std::string(what) + ": malformed line " + std::to_string(line_no));
        rows.push_back(std::move(*fields));
    }
    return rows;
}

std::int64_t to_int(const std::optional<std::string>& f, const char* what)
{
    std::int64_t v = 0;
    if (!f)
        throw Error(std::string(what) + ": missing integer");
    auto [ptr, ec] = std::from_chars(f->data(), f->data() + f->size(), v);
    if (ec != std::errc{} || ptr != f->data() + f->size())
        throw Error(std::string(what) + ": bad integer '" + *f + "'");
    return v;
}

std::optional<double> to_real(const std::optional<std::string>& f, const char* what)
{
    if (!f)
        return std::nullopt;
    try {
        std::size_t used = 0;
        double v = std::stod(*f, &used);
        if (used != f->size())
            throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw Error(std::string(what) + ": bad number '" + *f + "'");
    }
}

LangYear key_of(const Fields& f, const char* what)
{
    if (!f[0])
        throw Error(std::string(what) + ": missing language");
    return {*f[0], static_cast<int>(to_int(f[1], what))};
}

nlohmann::ordered_json real_json(const std::optional<double>& v)
{
    if (!v)
        return nullptr;
    return round_trip(*v);
}

std::optional<double> optional_real(const nlohmann::json& j)
{
    if (j.is_null())
        return std::nullopt;
    return j.get<double>();
}

} // namespace

void write_gh_csv(std::ostream& out, const std::vector<GhIntermediate>& rows)
{
    out << gh_header << '\n';
    for (const auto& r : rows)
        out << csv_field(r.key.language) << ',' << r.key.year << ',' << r.num_users << ',' << r.num_projects << ','
            << r.num_commits << ',' << r.num_pull_requests << ',' << r.num_pending_issues << '\n';
}

void write_so_csv(std::ostream& out, const std::vector<SoIntermediate>& rows)
{
    out << so_header << '\n';
    for (const auto& r : rows)
        out << csv_field(r.key.language) << ',' << r.key.year << ',' << r.num_users << ',' << r.num_questions << ','
            << r.num_answers << ',' << r.total_score << ',' << r.num_unanswered_questions << ','
            << format_optional(r.avg_response_time_hours) << '\n';
}

void write_composite_csv(std::ostream& out, const std::vector<CompositeScores>& rows)
{
    out << composite_header() << '\n';
    for (const auto& r : rows) {
        out << csv_field(r.key.language) << ',' << r.key.year;
        for (const auto& f : composite_fields())
            out << ',' << format_optional(r.*(f.member));
        out << '\n';
    }
}

void write_params_csv(std::ostream& out, const std::vector<NormalizationParams>& params)
{
    out << params_header << '\n';
    for (const auto& p : params)
        out << csv_field(p.metric_name) << ',' << format_real(p.observed_min) << ',' << format_real(p.observed_max)
            << '\n';
}

void write_top_languages_csv(std::ostream& out, const std::vector<RankedCount>& ranked)
{
    out << top_languages_header << '\n';
    for (std::size_t i = 0; i < ranked.size(); ++i)
        out << (i + 1) << ',' << csv_field(ranked[i].language) << ',' << ranked[i].num_projects << '\n';
}

namespace {
constexpr std::string_view profiles_header = "table,row_count,column,data_type,min,max,distinct,exactness,null_count";
}

void write_profiles_csv(std::ostream& out, const std::vector<TableProfile>& profiles)
{
    out << profiles_header << '\n';
    for (const auto& t : profiles) {
        for (const auto& c : t.columns) {
            out << t.table_name << ',' << t.row_count << ',' << csv_field(c.column_name) << ','
                << to_string(c.data_kind) << ',' << (c.min_value ? std::to_string(*c.min_value) : "") << ','
                << (c.max_value ? std::to_string(*c.max_value) : "") << ',' << c.distinct_count << ','
                << to_string(c.exactness) << ',' << c.null_count << '\n';
        }
    }
}

std::vector<GhIntermediate> read_gh_csv(std::istream& in)
{
    std::vector<GhIntermediate> out;
    for (const auto& f : read_rows(in, gh_header, "gh_intermediate.csv")) {
        const char* w = "gh_intermediate.csv";
        out.push_back({key_of(f, w), to_int(f[2], w), to_int(f[3], w), to_int(f[4], w), to_int(f[5], w),
                       to_int(f[6], w)});
    }
    return out;
}

std::vector<SoIntermediate> read_so_csv(std::istream& in)
{
    std::vector<SoIntermediate> out;
    for (const auto& f : read_rows(in, so_header, "so_intermediate.csv")) {
        const char* w = "so_intermediate.csv";
        out.push_back({key_of(f, w), to_int(f[2], w), to_int(f[3], w), to_int(f[4], w), to_int(f[5], w),
                       to_int(f[6], w), to_real(f[7], w)});
    }
    return out;
}

std::vector<CompositeScores> read_composite_csv(std::istream& in)
{
    std::vector<CompositeScores> out;
    const auto header = composite_header();
    for (const auto& f : read_rows(in, header, "composite scores")) {
        CompositeScores r;
        r.key = key_of(f, "composite scores");
        std::size_t i = 2;
        for (const auto& field : composite_fields())
            r.*(field.member) = to_real(f[i++], "composite scores");
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<NormalizationParams> read_params_csv(std::istream& in)
{
    std::vector<NormalizationParams> out;
    for (const auto& f : read_rows(in, params_header, "normalization_params.csv")) {
        auto lo = to_real(f[1], "normalization_params.csv");
        auto hi = to_real(f[2], "normalization_params.csv");
        if (!f[0] || !lo || !hi)
            throw Error("normalization_params.csv: incomplete row");
        out.push_back({*f[0], *lo, *hi});
    }
    return out;
}

std::vector<RankedCount> read_top_languages_csv(std::istream& in)
{
    std::vector<RankedCount> out;
    for (const auto& f : read_rows(in, top_languages_header, "top_languages.csv")) {
        if (!f[1])
            throw Error("top_languages.csv: missing language");
        out.push_back({*f[1], to_int(f[2], "top_languages.csv")});
    }
    return out;
}

std::vector<TableProfile> read_profiles_csv(std::istream& in)
{
    std::vector<TableProfile> out;
    const char* w = "profiles.csv";
    for (const auto& f : read_rows(in, profiles_header, w)) {
        if (!f[0] || !f[2] || !f[3] || !f[7])
            throw Error("profiles.csv: incomplete row");
        if (out.empty() || out.back().table_name != *f[0]) {
            out.push_back({*f[0], static_cast<std::uint64_t>(to_int(f[1], w)), {}});
        }
        ColumnProfile c;
        c.column_name = *f[2];
        c.data_kind = *f[3] == "String" ? DataKind::string : DataKind::integer;
        if (f[4])
            c.min_value = to_int(f[4], w);
        if (f[5])
            c.max_value = to_int(f[5], w);
        c.distinct_count = static_cast<std::uint64_t>(to_int(f[6], w));
        c.exactness = *f[7] == "exact" ? Exactness::exact : Exactness::approximate;
        c.null_count = static_cast<std::uint64_t>(to_int(f[8], w));
        out.back().columns.push_back(std::move(c));
    }
    return out;
}

nlohmann::ordered_json to_json(const GhIntermediate& r)
{
    return {{"language", r.key.language},       {"year", r.key.year},
            {"num_users", r.num_users},         {"num_projects", r.num_projects},
            {"num_commits", r.num_commits},     {"num_pull_requests", r.num_pull_requests},
            {"num_pending_issues", r.num_pending_issues}};
}

nlohmann::ordered_json to_json(const SoIntermediate& r)
{
    return {{"language", r.key.language},
            {"year", r.key.year},
            {"num_users", r.num_users},
            {"num_questions", r.num_questions},
            {"num_answers", r.num_answers},
            {"total_score", r.total_score},
            {"num_unanswered_questions", r.num_unanswered_questions},
            {"avg_response_time_hours", real_json(r.avg_response_time_hours)}};
}

nlohmann::ordered_json to_json(const CompositeScores& r)
{
    nlohmann::ordered_json j;
    j["language"] = r.key.language;
    j["year"] = r.key.year;
    for (const auto& f : composite_fields())
        j[f.name] = real_json(r.*(f.member));
    return j;
}

GhIntermediate gh_from_json(const nlohmann::json& j)
{
    return {{j.at("language").get<std::string>(), j.at("year").get<int>()},
            j.at("num_users").get<std::int64_t>(),
            j.at("num_projects").get<std::int64_t>(),
            j.at("num_commits").get<std::int64_t>(),
            j.at("num_pull_requests").get<std::int64_t>(),
            j.at("num_pending_issues").get<std::int64_t>()};
}

SoIntermediate so_from_json(const nlohmann::json& j)
{
    return {{j.at("language").get<std::string>(), j.at("year").get<int>()},
            j.at("num_users").get<std::int64_t>(),
            j.at("num_questions").get<std::int64_t>(),
            j.at("num_answers").get<std::int64_t>(),
            j.at("total_score").get<std::int64_t>(),
            j.at("num_unanswered_questions").get<std::int64_t>(),
            optional_real(j.at("avg_response_time_hours"))};
}

CompositeScores composite_from_json(const nlohmann::json& j)
{
    CompositeScores r;
    r.key = {j.at("language").get<std::string>(), j.at("year").get<int>()};
    for (const auto& f : composite_fields())
        r.*(f.member) = optional_real(j.at(f.name));
    return r;
}

nlohmann::ordered_json to_json(const Recommendation& rec)
{
    nlohmann::ordered_json j;
    j["status"] = rec.has_data ? "ok" : "no_data";
    auto& ranked = j["ranked"] = nlohmann::ordered_json::array();
    std::size_t rank = 0;
    for (const auto& r : rec.ranked) {
        nlohmann::ordered_json item;
        item["rank"] = ++rank;
        item["language"] = r.language;
        item["score"] = r.score;
        auto& breakdown = item["breakdown"] = nlohmann::ordered_json::array();
        for (const auto& c : r.breakdown) {
            breakdown.push_back({{"component", c.component},
                                 {"weight", c.weight},
                                 {"average", c.average ? nlohmann::ordered_json(*c.average) : nullptr},
                                 {"contribution", c.contribution}});
        }
        ranked.push_back(std::move(item));
    }
    return j;
}

void write_recommendation_text(std::ostream& out, const Recommendation& rec)
{
    if (!rec.has_data) {
        out << "no data: no language has any scored component\n";
        return;
    }
    std::size_t width = 8;
    for (const auto& r : rec.ranked)
        width = std::max(width, r.language.size());
    out << std::left << std::setw(5) << "rank" << std::setw(static_cast<int>(width) + 2) << "language"
        << std::setw(8) << "score" << "breakdown\n";
    std::size_t rank = 0;
    for (const auto& r : rec.ranked) {
        char score[32];
        std::snprintf(score, sizeof score, "%.4f", r.score);
        out << std::setw(5) << ++rank << std::setw(static_cast<int>(width) + 2) << r.language << std::setw(8) << score;
        bool first = true;
        for (const auto& c : r.breakdown) {
            out << (first ? "" : " ") << c.component << '=';
            if (c.average) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.4f", c.contribution);
                out << buf;
            } else {
                out << '-';
            }
            first = false;
        }
        out << '\n';
    }
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write " + path.string());
    out << content;
    if (!out)
        throw Error("write failed for " + path.string());
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace langpulse
