#include "langpulse/service.hpp"

#include <httplib.h>

namespace langpulse {

RecommendationQuery make_query(std::string_view goal, std::string_view horizon, const std::optional<std::string>& category,
                               long long top_n, const CategoryMap& categories)
{
    RecommendationQuery q;
    auto g = parse_goal(goal);
    if (!g)
        throw Error("unknown goal '" + std::string(goal) + "' (expected learn or build)");
    q.goal = *g;
    auto h = parse_horizon(horizon);
    if (!h)
        throw Error("unknown horizon '" + std::string(horizon) + "' (expected short, medium or long)");
    q.horizon_years = *h;
    if (top_n < 1)
        throw Error("top_n must be at least 1");
    q.top_n = static_cast<std::size_t>(top_n);
    if (category && !category->empty()) {
        auto it = categories.find(normalize_name(*category));
        if (it == categories.end())
            throw Error("unknown category '" + *category + "'");
        q.category_filter = it->second;
    }
    return q;
}

Recommendation recommend(const MetricStore& store, const RecommendationQuery& query, const WeightProfile& profile,
                         SeriesMode mode)
{
    return rank_recommendations(store.scores(mode), query, profile);
}

ApiResponse error_response(int status, const std::string& message)
{
    return {status, {{"error", message}, {"status", status}}};
}

Service::Service(std::shared_ptr<const MetricStore> store, WeightProfile profile, CategoryMap categories,
                 std::optional<std::filesystem::path> store_dir)
    : store_(std::move(store)), profile_(std::move(profile)), categories_(std::move(categories)),
      store_dir_(std::move(store_dir))
{
}

std::shared_ptr<const MetricStore> Service::snapshot() const
{
    std::lock_guard lock(mutex_);
    return store_;
}

void Service::swap(std::shared_ptr<const MetricStore> next)
{
    std::lock_guard lock(mutex_);
    store_ = std::move(next);
}

void Service::reload()
{
    if (!store_dir_)
        throw Error("service has no store directory to reload from");
    swap(std::make_shared<const MetricStore>(load_store(*store_dir_)));
}

ApiResponse Service::languages() const
{
    auto store = snapshot();
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    std::size_t rank = 0;
    for (const auto& l : store->top_languages)
        list.push_back({{"rank", ++rank}, {"language", l.language}, {"num_projects", l.num_projects}});
    return {200, {{"languages", list}}};
}

namespace {

std::optional<std::optional<double> CompositeScores::*> score_field(const std::string& metric, const std::string& source)
{
    std::string name;
    if (metric == "demand_shortage") {
        if (source != "combined")
            return std::nullopt;
        name = metric;
    } else if (metric == "popularity" || metric == "availability" || metric == "demand" || metric == "community") {
        name = source == "combined" ? metric : source + "_" + metric;
    } else {
        return std::nullopt;
    }
    for (const auto& f : composite_fields())
        if (name == f.name)
            return f.member;
    return std::nullopt;
}

} // namespace

ApiResponse Service::metrics(const std::map<std::string, std::string>& params) const
{
    auto get = [&](const std::string& k, const std::string& fallback) {
        auto it = params.find(k);
        return it == params.end() || it->second.empty() ? fallback : it->second;
    };
    auto language = normalize_name(get("language", ""));
    auto metric = get("metric", "");
    auto source = get("source", "combined");
    auto mode = get("mode", "level");
    if (language.empty())
        return error_response(400, "missing parameter: language");
    if (source != "gh" && source != "so" && source != "combined")
        return error_response(400, "source must be gh, so or combined");
    if (mode != "level" && mode != "diff")
        return error_response(400, "mode must be level or diff");
    auto field = score_field(metric, source);
    if (!field)
        return error_response(400, "unknown metric '" + metric + "' for source " + source);

    auto store = snapshot();
    nlohmann::ordered_json series = nlohmann::ordered_json::array();
    for (const auto& row : store->scores(mode == "level" ? SeriesMode::level : SeriesMode::differenced)) {
        if (row.key.language != language)
            continue;
        if (const auto& v = row.*(*field))
            series.push_back({{"year", row.key.year}, {"value", *v}});
    }
    return {200,
            {{"language", language}, {"metric", metric}, {"source", source}, {"mode", mode}, {"series", series}}};
}

ApiResponse Service::profile(const std::string& table) const
{
    auto store = snapshot();
    if (const auto* p = store->profile(table))
        return {200, to_json(*p)};
    return error_response(404, "no profile for table '" + table + "'");
}

ApiResponse Service::recommend(const std::string& body) const
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception&) {
        return error_response(400, "request body is not valid JSON");
    }
    if (!j.is_object())
        return error_response(400, "request body must be an object");
    try {
        auto goal = j.value("goal", std::string());
        auto horizon = j.value("horizon", std::string("short"));
        std::optional<std::string> category;
        if (j.contains("category") && !j["category"].is_null())
            category = j["category"].get<std::string>();
        long long top_n = j.value("top_n", 10LL);
        auto mode_text = j.value("mode", std::string("level"));
        if (mode_text != "level" && mode_text != "diff")
            return error_response(400, "mode must be level or diff");
        auto query = make_query(goal, horizon, category, top_n, categories_);
        auto store = snapshot();
        auto rec = langpulse::recommend(*store, query, profile_,
                                        mode_text == "level" ? SeriesMode::level : SeriesMode::differenced);
        return {200, to_json(rec)};
    } catch (const nlohmann::json::exception& e) {
        return error_response(400, std::string("bad field type: ") + e.what());
    } catch (const Error& e) {
        return error_response(400, e.what());
    }
}

ApiResponse Service::health() const
{
    auto store = snapshot();
    return {200,
            {{"status", "ok"},
             {"digest", store->provenance.digest},
             {"languages", store->top_languages.size()},
             {"composite_rows", store->composites.size()}}};
}

ApiResponse Service::categories() const
{
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [name, langs] : categories_)
        j[name] = langs;
    return {200, {{"categories", j}}};
}

void Service::mount(httplib::Server& server)
{
    auto reply = [](httplib::Response& res, const ApiResponse& api) {
        res.status = api.status;
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_content(api.body.dump(), "application/json");
    };
    server.Get("/api/languages", [this, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, languages());
    });
    server.Get("/api/metrics", [this, reply](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> params;
        for (const auto& [k, v] : req.params)
            params.emplace(k, v);
        reply(res, metrics(params));
    });
    server.Get(R"(/api/profile/([A-Za-z_]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, profile(req.matches[1]));
    });
    server.Post("/api/recommend", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, recommend(req.body));
    });
    server.Get("/api/health", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, health()); });
    server.Get("/api/categories", [this, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, categories());
    });
    server.Post("/api/reload", [this, reply](const httplib::Request&, httplib::Response& res) {
        try {
            reload();
            reply(res, health());
        } catch (const std::exception& e) {
            reply(res, error_response(500, e.what()));
        }
    });
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.status = 204;
    });
    server.set_error_handler([reply](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty())
            reply(res, error_response(res.status, "not found"));
    });
}

} // namespace langpulse
