#pragma once

#include "langpulse/composite.hpp"
#include "langpulse/gh_metrics.hpp"
#include "langpulse/profiler.hpp"
#include "langpulse/so_metrics.hpp"
#include "langpulse/transform.hpp"

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace langpulse {

/// At most six decimals, trailing zeros trimmed; negative zero prints as 0.
std::string format_real(double v);
std::string format_optional(const std::optional<double>& v);

/// Value as it reads back from a formatted file.
double round_trip(double v);

struct RankedCount {
    std::string language;
    std::int64_t num_projects = 0;
    bool operator==(const RankedCount&) const = default;
};

inline constexpr std::string_view gh_header =
    "language,year,num_users,num_projects,num_commits,num_pull_requests,num_pending_issues";
inline constexpr std::string_view so_header =
    "language,year,num_users,num_questions,num_answers,total_score,num_unanswered_questions,avg_response_time_hours";
inline constexpr std::string_view params_header = "metric,observed_min,observed_max";
inline constexpr std::string_view top_languages_header = "rank,language,num_projects";
std::string composite_header();

void write_gh_csv(std::ostream& out, const std::vector<GhIntermediate>& rows);
void write_so_csv(std::ostream& out, const std::vector<SoIntermediate>& rows);
void write_composite_csv(std::ostream& out, const std::vector<CompositeScores>& rows);
void write_params_csv(std::ostream& out, const std::vector<NormalizationParams>& params);
void write_top_languages_csv(std::ostream& out, const std::vector<RankedCount>& ranked);
void write_profiles_csv(std::ostream& out, const std::vector<TableProfile>& profiles);

// Readers throw Error on a header mismatch or an unparsable row.
std::vector<GhIntermediate> read_gh_csv(std::istream& in);
std::vector<SoIntermediate> read_so_csv(std::istream& in);
std::vector<CompositeScores> read_composite_csv(std::istream& in);
std::vector<NormalizationParams> read_params_csv(std::istream& in);
std::vector<RankedCount> read_top_languages_csv(std::istream& in);
std::vector<TableProfile> read_profiles_csv(std::istream& in);

nlohmann::ordered_json to_json(const GhIntermediate& row);
nlohmann::ordered_json to_json(const SoIntermediate& row);
nlohmann::ordered_json to_json(const CompositeScores& row);
GhIntermediate gh_from_json(const nlohmann::json& j);
SoIntermediate so_from_json(const nlohmann::json& j);
CompositeScores composite_from_json(const nlohmann::json& j);

nlohmann::ordered_json to_json(const Recommendation& rec);
/// Fixed-width text: rank, language, score (4 decimals), then per-component contributions.
void write_recommendation_text(std::ostream& out, const Recommendation& rec);

void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

} // namespace langpulse
