#pragma once

#include "langpulse/counts.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace langpulse {

enum class Orientation { higher_better, lower_better };
enum class SeriesMode { level, differenced };
enum class Scale { raw, normalized };

/// One named metric over sparse (language, year) cells. Absent cells are missing, not zero.
struct MetricSeries {
    std::string metric_name;
    Orientation orientation = Orientation::higher_better;
    SeriesMode mode = SeriesMode::level;
    Scale scale = Scale::raw;
    std::map<LangYear, double> cells;

    bool operator==(const MetricSeries&) const = default;
};

struct NormalizationParams {
    std::string metric_name;
    double observed_min = 0.0;
    double observed_max = 0.0;

    bool operator==(const NormalizationParams&) const = default;
};

/// Languages ranked by total count over all years, descending, ties by name.
std::vector<std::string> top_k_languages(const LangYearCounts& project_counts, std::size_t k);

/// Year-over-year change per language, only where both years are observed.
/// Throws Error unless the series is in level mode.
MetricSeries first_difference(const MetricSeries& series);

/// Pools every cell of the series; a constant series maps to 0.5.
/// Throws Error for an empty or already normalized series.
std::pair<MetricSeries, NormalizationParams> min_max_normalize(const MetricSeries& series);

/// Flips a normalized lower-better series to higher-better (v -> 1 - v).
MetricSeries orient(const MetricSeries& series);

} // namespace langpulse
