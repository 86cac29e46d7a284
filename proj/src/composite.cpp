#include "langpulse/composite.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace langpulse {

const std::array<CompositeField, 13>& composite_fields()
{
    static const std::array<CompositeField, 13> fields = {{
        {"gh_popularity", &CompositeScores::gh_popularity},
        {"gh_availability", &CompositeScores::gh_availability},
        {"gh_demand", &CompositeScores::gh_demand},
        {"gh_community", &CompositeScores::gh_community},
        {"so_popularity", &CompositeScores::so_popularity},
        {"so_availability", &CompositeScores::so_availability},
        {"so_demand", &CompositeScores::so_demand},
        {"so_community", &CompositeScores::so_community},
        {"popularity", &CompositeScores::popularity},
        {"availability", &CompositeScores::availability},
        {"demand", &CompositeScores::demand},
        {"community", &CompositeScores::community},
        {"demand_shortage", &CompositeScores::demand_shortage},
    }};
    return fields;
}

namespace {

MetricSeries named(std::string name, Orientation orientation = Orientation::higher_better)
{
    MetricSeries s;
    s.metric_name = std::move(name);
    s.orientation = orientation;
    return s;
}

void put_ratio(MetricSeries& s, const LangYear& key, std::int64_t num, std::int64_t den)
{
    if (den > 0)
        s.cells.emplace(key, static_cast<double>(num) / static_cast<double>(den));
}

} // namespace

ComponentSet gh_raw_components(const std::vector<GhIntermediate>& rows)
{
    auto projects = named("num_projects");
    auto users = named("num_users");
    auto prs_per_project = named("pull_requests_per_project");
    auto commits_per_project = named("commits_per_project");
    auto pending_per_project = named("pending_issues_per_project");
    auto projects_per_user = named("projects_per_user");
    auto commits_per_user = named("commits_per_user");
    for (const auto& r : rows) {
        projects.cells.emplace(r.key, static_cast<double>(r.num_projects));
        users.cells.emplace(r.key, static_cast<double>(r.num_users));
        put_ratio(prs_per_project, r.key, r.num_pull_requests, r.num_projects);
        put_ratio(commits_per_project, r.key, r.num_commits, r.num_projects);
        put_ratio(pending_per_project, r.key, r.num_pending_issues, r.num_projects);
        put_ratio(projects_per_user, r.key, r.num_projects, r.num_users);
        put_ratio(commits_per_user, r.key, r.num_commits, r.num_users);
    }
    ComponentSet out;
    for (auto* s : {&projects, &users, &prs_per_project, &commits_per_project, &pending_per_project,
                    &projects_per_user, &commits_per_user})
        out.emplace(s->metric_name, std::move(*s));
    return out;
}

ComponentSet so_raw_components(const std::vector<SoIntermediate>& rows)
{
    auto questions = named("num_questions");
    auto users = named("num_users");
    auto answers_per_question = named("answers_per_question");
    auto unanswered_per_question = named("unanswered_per_question");
    auto response = named("avg_response_time", Orientation::lower_better);
    auto score_per_answer = named("score_per_answer");
    auto answers_per_user = named("answers_per_user");
    auto questions_per_user = named("questions_per_user");
    for (const auto& r : rows) {
        questions.cells.emplace(r.key, static_cast<double>(r.num_questions));
        users.cells.emplace(r.key, static_cast<double>(r.num_users));
        put_ratio(answers_per_question, r.key, r.num_answers, r.num_questions);
        put_ratio(unanswered_per_question, r.key, r.num_unanswered_questions, r.num_questions);
        if (r.avg_response_time_hours)
            response.cells.emplace(r.key, *r.avg_response_time_hours);
        put_ratio(score_per_answer, r.key, r.total_score, r.num_answers);
        put_ratio(answers_per_user, r.key, r.num_answers, r.num_users);
        put_ratio(questions_per_user, r.key, r.num_questions, r.num_users);
    }
    ComponentSet out;
    for (auto* s : {&questions, &users, &answers_per_question, &unanswered_per_question, &response, &score_per_answer,
                    &answers_per_user, &questions_per_user})
        out.emplace(s->metric_name, std::move(*s));
    return out;
}

ComponentBuild normalize_components(const ComponentSet& raw, const std::string& prefix)
{
    ComponentBuild out;
    for (const auto& [name, series] : raw) {
        if (series.cells.empty()) {
            auto empty = series;
            empty.scale = Scale::normalized;
            empty.orientation = Orientation::higher_better;
            out.normalized.emplace(name, std::move(empty));
            continue;
        }
        auto [normalized, params] = min_max_normalize(series);
        params.metric_name = prefix + name;
        out.params.push_back(std::move(params));
        out.normalized.emplace(name, orient(normalized));
    }
    return out;
}

MetricSeries mean_of_present(const std::string& name, const std::vector<const MetricSeries*>& inputs)
{
    MetricSeries out = named(name);
    out.scale = Scale::normalized;
    std::map<LangYear, std::pair<double, int>> sums;
    for (const auto* s : inputs) {
        for (const auto& [key, v] : s->cells) {
            auto& acc = sums[key];
            acc.first += v;
            ++acc.second;
        }
    }
    for (const auto& [key, acc] : sums)
        out.cells.emplace(key, acc.first / acc.second);
    return out;
}

namespace {

const MetricSeries& component(const ComponentSet& set, const std::string& name)
{
    auto it = set.find(name);
    if (it == set.end())
        throw Error("missing component series " + name);
    return it->second;
}

} // namespace

CompositeSet gh_composites(const ComponentSet& n)
{
    return {
        mean_of_present("gh_popularity", {&component(n, "num_projects"), &component(n, "num_users")}),
        mean_of_present("gh_availability",
                        {&component(n, "pull_requests_per_project"), &component(n, "commits_per_project")}),
        mean_of_present("gh_demand", {&component(n, "pending_issues_per_project")}),
        mean_of_present("gh_community", {&component(n, "commits_per_project"), &component(n, "projects_per_user"),
                                         &component(n, "commits_per_user")}),
    };
}

CompositeSet so_composites(const ComponentSet& n)
{
    return {
        mean_of_present("so_popularity", {&component(n, "num_questions"), &component(n, "num_users")}),
        mean_of_present("so_availability", {&component(n, "answers_per_question")}),
        mean_of_present("so_demand", {&component(n, "unanswered_per_question")}),
        mean_of_present("so_community", {&component(n, "avg_response_time"), &component(n, "score_per_answer"),
                                         &component(n, "answers_per_user"), &component(n, "questions_per_user")}),
    };
}

MetricSeries combine(const MetricSeries& gh, const MetricSeries& so, WeightConfig cfg)
{
    if (!(cfg.w >= 0.0 && cfg.w <= 1.0))
        throw Error("combine: weight must lie in [0, 1]");
    MetricSeries out = named(gh.metric_name);
    out.scale = Scale::normalized;
    for (const auto& [key, g] : gh.cells) {
        auto it = so.cells.find(key);
        if (it == so.cells.end())
            continue;
        // endpoint weights reproduce the source series exactly
        double v = cfg.w == 1.0 ? g : cfg.w == 0.0 ? it->second : cfg.w * g + (1.0 - cfg.w) * it->second;
        out.cells.emplace(key, v);
    }
    return out;
}

MetricSeries demand_shortage(const MetricSeries& demand, const MetricSeries& availability)
{
    MetricSeries out = named("demand_shortage");
    out.scale = Scale::normalized;
    for (const auto& [key, d] : demand.cells) {
        auto it = availability.cells.find(key);
        if (it != availability.cells.end())
            out.cells.emplace(key, d - it->second);
    }
    return out;
}

namespace {

std::vector<CompositeScores> to_rows(const std::map<std::string, const MetricSeries*>& by_field,
                                     const std::set<LangYear>& keys)
{
    std::vector<CompositeScores> rows;
    for (const auto& key : keys) {
        CompositeScores row;
        row.key = key;
        bool any = false;
        for (const auto& f : composite_fields()) {
            const auto* s = by_field.at(f.name);
            if (auto it = s->cells.find(key); it != s->cells.end()) {
                row.*(f.member) = it->second;
                any = true;
            }
        }
        if (any)
            rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

CompositeBuild build_composites(const std::vector<GhIntermediate>& gh, const std::vector<SoIntermediate>& so,
                                WeightConfig cfg)
{
    auto gh_build = normalize_components(gh_raw_components(gh), "gh.");
    auto so_build = normalize_components(so_raw_components(so), "so.");
    auto g = gh_composites(gh_build.normalized);
    auto s = so_composites(so_build.normalized);

    auto popularity = combine(g.popularity, s.popularity, cfg);
    auto availability = combine(g.availability, s.availability, cfg);
    auto demand = combine(g.demand, s.demand, cfg);
    auto community = combine(g.community, s.community, cfg);
    popularity.metric_name = "popularity";
    availability.metric_name = "availability";
    demand.metric_name = "demand";
    community.metric_name = "community";
    auto shortage = demand_shortage(demand, availability);

    std::map<std::string, const MetricSeries*> level = {
        {"gh_popularity", &g.popularity}, {"gh_availability", &g.availability}, {"gh_demand", &g.demand},
        {"gh_community", &g.community},   {"so_popularity", &s.popularity},     {"so_availability", &s.availability},
        {"so_demand", &s.demand},         {"so_community", &s.community},       {"popularity", &popularity},
        {"availability", &availability},  {"demand", &demand},                  {"community", &community},
        {"demand_shortage", &shortage},
    };

    std::set<LangYear> keys;
    for (const auto& r : gh)
        keys.insert(r.key);
    for (const auto& r : so)
        keys.insert(r.key);

    CompositeBuild out;
    out.level = to_rows(level, keys);

    std::map<std::string, MetricSeries> diffs;
    std::set<LangYear> diff_keys;
    for (const auto& [name, series] : level) {
        auto d = first_difference(*series);
        for (const auto& [k, v] : d.cells)
            diff_keys.insert(k);
        diffs.emplace(name, std::move(d));
    }
    std::map<std::string, const MetricSeries*> diff_ptrs;
    for (const auto& [name, series] : diffs)
        diff_ptrs.emplace(name, &series);
    out.differenced = to_rows(diff_ptrs, diff_keys);

    out.params = std::move(gh_build.params);
    out.params.insert(out.params.end(), so_build.params.begin(), so_build.params.end());
    return out;
}

// -- recommendation --------------------------------------------------------

const char* to_string(Goal goal) { return goal == Goal::learn ? "learn" : "build"; }

std::optional<Goal> parse_goal(std::string_view text)
{
    if (text == "learn")
        return Goal::learn;
    if (text == "build")
        return Goal::build;
    return std::nullopt;
}

std::optional<int> parse_horizon(std::string_view text)
{
    if (text == "short")
        return 1;
    if (text == "medium")
        return 3;
    if (text == "long")
        return 5;
    return std::nullopt;
}

namespace {

bool is_recommendation_component(const std::string& name)
{
    return name == "popularity" || name == "availability" || name == "demand" || name == "community" ||
           name == "demand_shortage";
}

void validate_weights(Goal goal, const std::map<std::string, double>& weights)
{
    double sum = 0.0;
    for (const auto& [name, w] : weights) {
        if (!is_recommendation_component(name))
            throw Error(std::string("profile ") + to_string(goal) + ": unknown component '" + name + "'");
        if (!(w >= 0.0))
            throw Error(std::string("profile ") + to_string(goal) + ": negative weight for " + name);
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw Error(std::string("profile ") + to_string(goal) + ": weights must sum to 1");
}

} // namespace

WeightProfile WeightProfile::defaults()
{
    WeightProfile p;
    p.set(Goal::learn, {{"demand_shortage", 0.4}, {"community", 0.3}, {"popularity", 0.3}});
    p.set(Goal::build, {{"availability", 0.4}, {"community", 0.4}, {"popularity", 0.2}});
    return p;
}

void WeightProfile::set(Goal goal, std::map<std::string, double> weights)
{
    validate_weights(goal, weights);
    profiles_[goal] = std::move(weights);
}

const std::map<std::string, double>& WeightProfile::weights(Goal goal) const
{
    auto it = profiles_.find(goal);
    if (it == profiles_.end())
        throw Error(std::string("no weight profile for goal ") + to_string(goal));
    return it->second;
}

WeightProfile WeightProfile::parse(std::istream& in)
{
    WeightProfile p = defaults();
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        auto text = normalize_name(line);
        if (text.empty())
            continue;
        auto eq = text.find('=');
        if (eq == std::string::npos)
            throw Error("profile line '" + text + "': expected goal=component:weight,...");
        auto goal = parse_goal(normalize_name(text.substr(0, eq)));
        if (!goal)
            throw Error("profile line '" + text + "': unknown goal");
        std::map<std::string, double> weights;
        std::stringstream items(text.substr(eq + 1));
        std::string item;
        while (std::getline(items, item, ',')) {
            auto colon = item.find(':');
            if (colon == std::string::npos)
                throw Error("profile entry '" + item + "': expected component:weight");
            auto name = normalize_name(item.substr(0, colon));
            try {
                std::size_t used = 0;
                auto value = normalize_name(item.substr(colon + 1));
                double w = std::stod(value, &used);
                if (used != value.size())
                    throw std::invalid_argument("trailing text");
                weights[name] = w;
            } catch (const std::exception&) {
                throw Error("profile entry '" + item + "': bad weight");
            }
        }
        p.set(*goal, std::move(weights));
    }
    return p;
}

WeightProfile WeightProfile::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open profile file: " + path);
    return parse(in);
}

Recommendation rank_recommendations(const std::vector<CompositeScores>& scores, const RecommendationQuery& query,
                                    const WeightProfile& profile)
{
    if (query.top_n < 1)
        throw Error("top_n must be at least 1");
    if (query.horizon_years < 1)
        throw Error("horizon must be at least one year");
    const auto& weights = profile.weights(query.goal);

    // language -> component -> year -> value; std::map keeps years ascending
    std::map<std::string, std::map<std::string, std::map<int, double>>> cells;
    for (const auto& row : scores) {
        if (query.category_filter && !query.category_filter->contains(row.key.language))
            continue;
        for (const auto& f : composite_fields()) {
            if (!weights.contains(f.name))
                continue;
            if (const auto& v = row.*(f.member))
                cells[row.key.language][f.name][row.key.year] = *v;
        }
    }

    Recommendation out;
    for (const auto& [language, components] : cells) {
        RankedLanguage ranked;
        ranked.language = language;
        double mass = 0.0, total = 0.0;
        for (const auto& [name, w] : weights) {
            ComponentContribution c{name, w, std::nullopt, 0.0};
            if (auto it = components.find(name); it != components.end() && !it->second.empty()) {
                double sum = 0.0;
                int n = 0;
                for (auto y = it->second.rbegin(); y != it->second.rend() && n < query.horizon_years; ++y, ++n)
                    sum += y->second;
                c.average = sum / n;
                mass += w;
                total += w * *c.average;
            }
            ranked.breakdown.push_back(std::move(c));
        }
        if (mass <= 0.0)
            continue;
        ranked.score = total / mass;
        for (auto& c : ranked.breakdown)
            if (c.average)
                c.contribution = c.weight * *c.average / mass;
        out.ranked.push_back(std::move(ranked));
    }

    std::sort(out.ranked.begin(), out.ranked.end(), [](const RankedLanguage& a, const RankedLanguage& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.language < b.language;
    });
    if (out.ranked.size() > query.top_n)
        out.ranked.resize(query.top_n);
    out.has_data = !out.ranked.empty();
    return out;
}

CategoryMap load_category_map(const std::string& path, const LanguageAliasMap& aliases)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open category file: " + path);
    CategoryMap map;
    std::string line;
    while (std::getline(in, line)) {
        auto text = normalize_name(line);
        if (text.empty() || text.front() == '#')
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("category line '" + line + "': expected category=lang1,lang2");
        auto name = normalize_name(line.substr(0, eq));
        std::stringstream langs(line.substr(eq + 1));
        std::string lang;
        auto& set = map[name];
        while (std::getline(langs, lang, ','))
            if (auto c = aliases.canonicalize(lang); !c.empty())
                set.insert(std::move(c));
    }
    return map;
}

} // namespace langpulse
