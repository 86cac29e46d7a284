#pragma once

#include "langpulse/pipeline.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <json.hpp>

namespace httplib {
class Server;
}

namespace langpulse {

struct ApiResponse {
    int status = 200;
    nlohmann::ordered_json body;
};

/// Builds a query from the request vocabulary shared by the CLI and the API.
/// Throws Error for an unknown goal, horizon or category, or top_n < 1.
RecommendationQuery make_query(std::string_view goal, std::string_view horizon, const std::optional<std::string>& category,
                               long long top_n, const CategoryMap& categories);

/// The single recommendation code path behind `recommend` and POST /api/recommend.
Recommendation recommend(const MetricStore& store, const RecommendationQuery& query, const WeightProfile& profile,
                         SeriesMode mode = SeriesMode::level);

/// HTTP facade over an immutable store snapshot. Handlers take the snapshot
/// once per request, so a concurrent reload is never observed half-way.
class Service {
public:
    Service(std::shared_ptr<const MetricStore> store, WeightProfile profile, CategoryMap categories = {},
            std::optional<std::filesystem::path> store_dir = std::nullopt);

    std::shared_ptr<const MetricStore> snapshot() const;
    void swap(std::shared_ptr<const MetricStore> next);
    /// Reloads from the store directory. Throws Error when the service was built without one.
    void reload();

    ApiResponse languages() const;
    ApiResponse metrics(const std::map<std::string, std::string>& params) const;
    ApiResponse profile(const std::string& table) const;
    ApiResponse recommend(const std::string& body) const;
    ApiResponse health() const;
    ApiResponse categories() const;

    /// Registers every endpoint on `server`.
    void mount(httplib::Server& server);

private:
    mutable std::mutex mutex_;
    std::shared_ptr<const MetricStore> store_;
    WeightProfile profile_;
    CategoryMap categories_;
    std::optional<std::filesystem::path> store_dir_;
};

ApiResponse error_response(int status, const std::string& message);

} // namespace langpulse
