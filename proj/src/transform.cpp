#include "langpulse/transform.hpp"

#include <algorithm>
#include <map>

namespace langpulse {

std::vector<std::string> top_k_languages(const LangYearCounts& project_counts, std::size_t k)
{
    if (k == 0)
        throw Error("top_k_languages: k must be at least 1");
    std::map<std::string, std::int64_t> totals;
    for (const auto& [key, n] : project_counts)
        totals[key.language] += n;

    std::vector<std::pair<std::string, std::int64_t>> ranked(totals.begin(), totals.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second)
            return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < ranked.size() && i < k; ++i)
        out.push_back(ranked[i].first);
    return out;
}

MetricSeries first_difference(const MetricSeries& series)
{
    if (series.mode != SeriesMode::level)
        throw Error("first_difference: series " + series.metric_name + " is already differenced");
    MetricSeries out = series;
    out.mode = SeriesMode::differenced;
    out.cells.clear();
    const std::pair<const LangYear, double>* prev = nullptr;
    for (const auto& cell : series.cells) {
        if (prev && prev->first.language == cell.first.language && prev->first.year + 1 == cell.first.year)
            out.cells.emplace(cell.first, cell.second - prev->second);
        prev = &cell;
    }
    return out;
}

std::pair<MetricSeries, NormalizationParams> min_max_normalize(const MetricSeries& series)
{
    if (series.scale != Scale::raw)
        throw Error("min_max_normalize: series " + series.metric_name + " is already normalized");
    if (series.cells.empty())
        throw Error("min_max_normalize: series " + series.metric_name + " is empty");

    auto [lo, hi] = std::minmax_element(series.cells.begin(), series.cells.end(),
                                        [](const auto& a, const auto& b) { return a.second < b.second; });
    NormalizationParams params{series.metric_name, lo->second, hi->second};
    const double range = params.observed_max - params.observed_min;

    MetricSeries out = series;
    out.scale = Scale::normalized;
    for (auto& [key, v] : out.cells) {
        if (range > 0.0)
            v = std::clamp((v - params.observed_min) / range, 0.0, 1.0);
        else
            v = 0.5;
    }
    return {std::move(out), std::move(params)};
}

MetricSeries orient(const MetricSeries& series)
{
    if (series.scale != Scale::normalized)
        throw Error("orient: series " + series.metric_name + " must be normalized first");
    MetricSeries out = series;
    if (series.orientation == Orientation::lower_better) {
        out.orientation = Orientation::higher_better;
        for (auto& [key, v] : out.cells)
            v = 1.0 - v;
    }
    return out;
}

} // namespace langpulse
