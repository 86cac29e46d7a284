#pragma once

#include "langpulse/gh_metrics.hpp"
#include "langpulse/so_metrics.hpp"
#include "langpulse/transform.hpp"

#include <array>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace langpulse {

struct CompositeScores {
    LangYear key;
    std::optional<double> gh_popularity, gh_availability, gh_demand, gh_community;
    std::optional<double> so_popularity, so_availability, so_demand, so_community;
    std::optional<double> popularity, availability, demand, community;
    std::optional<double> demand_shortage;

    bool operator==(const CompositeScores&) const = default;
};

/// The thirteen score fields in export order, paired with their column names.
struct CompositeField {
    const char* name;
    std::optional<double> CompositeScores::*member;
};
const std::array<CompositeField, 13>& composite_fields();

struct WeightConfig {
    double w = 0.5;
};

/// Normalized (and oriented) component series, keyed by component name.
using ComponentSet = std::map<std::string, MetricSeries>;

struct ComponentBuild {
    ComponentSet normalized;
    std::vector<NormalizationParams> params;
};

/// Raw GitHub components: counts and ratios. Ratios with a zero denominator are missing.
ComponentSet gh_raw_components(const std::vector<GhIntermediate>& rows);
ComponentSet so_raw_components(const std::vector<SoIntermediate>& rows);

/// Min-max normalizes every non-empty component, then orients lower-better ones.
/// Parameter names carry `prefix` (e.g. "gh.").
ComponentBuild normalize_components(const ComponentSet& raw, const std::string& prefix);

struct CompositeSet {
    MetricSeries popularity, availability, demand, community;
};

/// Cell-wise arithmetic mean over the present inputs.
MetricSeries mean_of_present(const std::string& name, const std::vector<const MetricSeries*>& inputs);

CompositeSet gh_composites(const ComponentSet& normalized);
CompositeSet so_composites(const ComponentSet& normalized);

/// w * gh + (1 - w) * so where both cells are present.
MetricSeries combine(const MetricSeries& gh, const MetricSeries& so, WeightConfig cfg);

/// demand - availability where both cells are present.
MetricSeries demand_shortage(const MetricSeries& demand, const MetricSeries& availability);

struct CompositeBuild {
    std::vector<CompositeScores> level;
    std::vector<CompositeScores> differenced;
    std::vector<NormalizationParams> params;
};

/// intermediates -> ratios -> normalize -> orient -> compose -> combine;
/// the differenced table is the first difference of every level field.
CompositeBuild build_composites(const std::vector<GhIntermediate>& gh, const std::vector<SoIntermediate>& so,
                                WeightConfig cfg);

// -- recommendation --------------------------------------------------------

enum class Goal { learn, build };

const char* to_string(Goal goal);
std::optional<Goal> parse_goal(std::string_view text);
/// short -> 1, medium -> 3, long -> 5.
std::optional<int> parse_horizon(std::string_view text);

struct RecommendationQuery {
    Goal goal = Goal::learn;
    int horizon_years = 1;
    std::optional<std::set<std::string>> category_filter;
    std::size_t top_n = 10;
};

/// component name -> weight, per goal. Component names are the combined
/// fields: popularity, availability, demand, community, demand_shortage.
class WeightProfile {
public:
    static WeightProfile defaults();
    /// Lines of `goal=component:weight,component:weight`. Throws Error on
    /// unknown goals or components, or weights not summing to 1.
    static WeightProfile parse(std::istream& in);
    static WeightProfile load(const std::string& path);

    const std::map<std::string, double>& weights(Goal goal) const;
    void set(Goal goal, std::map<std::string, double> weights);

private:
    std::map<Goal, std::map<std::string, double>> profiles_;
};

struct ComponentContribution {
    std::string component;
    double weight = 0.0;
    std::optional<double> average;
    /// weight * average / present weight mass; zero when the component is missing.
    double contribution = 0.0;
};

struct RankedLanguage {
    std::string language;
    double score = 0.0;
    std::vector<ComponentContribution> breakdown;
};

struct Recommendation {
    /// False when no language had any present component.
    bool has_data = false;
    std::vector<RankedLanguage> ranked;
};

Recommendation rank_recommendations(const std::vector<CompositeScores>& scores, const RecommendationQuery& query,
                                    const WeightProfile& profile);

/// category name -> languages, from `category=lang1,lang2` lines.
using CategoryMap = std::map<std::string, std::set<std::string>>;
CategoryMap load_category_map(const std::string& path, const LanguageAliasMap& aliases);

} // namespace langpulse
