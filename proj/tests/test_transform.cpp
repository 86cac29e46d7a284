#include "langpulse/transform.hpp"

#include <doctest.h>

#include <random>

using namespace langpulse;

namespace {

MetricSeries series(std::vector<std::pair<LangYear, double>> cells, Orientation o = Orientation::higher_better)
{
    MetricSeries s;
    s.metric_name = "m";
    s.orientation = o;
    for (auto& [k, v] : cells)
        s.cells[k] = v;
    return s;
}

std::vector<double> values(const MetricSeries& s)
{
    std::vector<double> out;
    for (const auto& [k, v] : s.cells)
        out.push_back(v);
    return out;
}

MetricSeries one_language(std::vector<double> v, int first_year = 2015)
{
    MetricSeries s;
    s.metric_name = "m";
    for (std::size_t i = 0; i < v.size(); ++i)
        s.cells[{"x", first_year + static_cast<int>(i)}] = v[i];
    return s;
}

} // namespace

TEST_CASE("top-k ranks by total projects with lexicographic ties")
{
    LangYearCounts c;
    c.add({"java", 2015}, 6);
    c.add({"java", 2016}, 4);
    c.add({"go", 2016}, 7);
    c.add({"lua", 2016}, 1);
    CHECK(top_k_languages(c, 2) == std::vector<std::string>{"java", "go"});
    CHECK(top_k_languages(c, 10) == std::vector<std::string>{"java", "go", "lua"});

    LangYearCounts tie;
    tie.add({"go", 2015}, 5);
    tie.add({"dart", 2015}, 5);
    CHECK(top_k_languages(tie, 1) == std::vector<std::string>{"dart"});
    CHECK(top_k_languages({}, 3).empty());
    CHECK_THROWS_AS(top_k_languages(c, 0), Error);
}

TEST_CASE("first difference examples")
{
    auto d = first_difference(one_language({3, 5, 4}));
    CHECK(d.mode == SeriesMode::differenced);
    CHECK(d.cells.size() == 2);
    CHECK(d.cells.at({"x", 2016}) == 2);
    CHECK(d.cells.at({"x", 2017}) == -1);

    for (double v : values(first_difference(one_language({7, 7, 7, 7}))))
        CHECK(v == 0.0);
    CHECK(first_difference(one_language({1})).cells.empty());

    auto gap = series({{{"x", 2015}, 1}, {{"x", 2017}, 4}, {{"x", 2018}, 6}});
    auto g = first_difference(gap);
    CHECK(g.cells.size() == 1);
    CHECK(g.cells.at({"x", 2018}) == 2);

    CHECK_THROWS_AS(first_difference(d), Error);
    auto lower = one_language({1, 2});
    lower.orientation = Orientation::lower_better;
    CHECK(first_difference(lower).orientation == Orientation::lower_better);
}

TEST_CASE("min-max normalization examples")
{
    auto [a, pa] = min_max_normalize(one_language({2, 4, 6}));
    CHECK(values(a) == std::vector<double>{0, 0.5, 1});
    CHECK(a.scale == Scale::normalized);
    CHECK(pa.observed_min == 2);
    CHECK(pa.observed_max == 6);

    auto [b, pb] = min_max_normalize(one_language({5, 5, 5}));
    CHECK(values(b) == std::vector<double>{0.5, 0.5, 0.5});

    auto [c, pc] = min_max_normalize(one_language({-146, 0, 24124}));
    auto v = values(c);
    CHECK(v[0] == 0.0);
    CHECK(v[1] == doctest::Approx(146.0 / (24124.0 + 146.0)).epsilon(1e-15));
    CHECK(v[1] == doctest::Approx(0.006016).epsilon(1e-4));
    CHECK(v[2] == 1.0);

    CHECK_THROWS_AS(min_max_normalize(MetricSeries{}), Error);
    CHECK_THROWS_AS(min_max_normalize(a), Error);
}

TEST_CASE("normalization pools languages and years")
{
    auto s = series({{{"a", 2015}, 10}, {{"a", 2016}, 20}, {{"b", 2015}, 0}, {{"b", 2016}, 40}});
    auto [n, p] = min_max_normalize(s);
    CHECK(n.cells.at({"a", 2015}) == 0.25);
    CHECK(n.cells.at({"b", 2016}) == 1.0);
    CHECK(p.observed_min == 0);
    CHECK(p.observed_max == 40);
}

TEST_CASE("orientation flips lower-better series")
{
    auto s = one_language({0, 0.4, 1});
    s.scale = Scale::normalized;
    s.orientation = Orientation::lower_better;
    auto o = orient(s);
    CHECK(o.orientation == Orientation::higher_better);
    CHECK(values(o) == std::vector<double>{1, 0.6, 0});

    auto h = s;
    h.orientation = Orientation::higher_better;
    CHECK(orient(h) == h);

    auto relabelled = o;
    relabelled.orientation = Orientation::lower_better;
    CHECK(values(orient(relabelled)) == values(s));

    CHECK_THROWS_AS(orient(one_language({1, 2})), Error);
}

TEST_CASE("normalized values stay in range and preserve rank")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int round = 0; round < 100; ++round) {
        MetricSeries s;
        for (int i = 0, n = 1 + static_cast<int>(rng() % 40); i < n; ++i)
            s.cells[{std::string(1, static_cast<char>('a' + rng() % 5)), 2005 + static_cast<int>(rng() % 16)}] = u(rng);
        auto [n, p] = min_max_normalize(s);
        CHECK(p.observed_min <= p.observed_max);
        for (const auto& [k, v] : n.cells) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            if (s.cells.size() > 1 && p.observed_min < p.observed_max) {
                if (s.cells.at(k) == p.observed_min)
                    CHECK(v == 0.0);
                if (s.cells.at(k) == p.observed_max)
                    CHECK(v == 1.0);
            }
        }
        for (const auto& [k1, v1] : s.cells)
            for (const auto& [k2, v2] : s.cells)
                if (v1 < v2)
                    CHECK(n.cells.at(k1) <= n.cells.at(k2));
    }
}

TEST_CASE("differencing inverts through cumulative sums")
{
    std::mt19937_64 rng(23);
    for (int round = 0; round < 50; ++round) {
        MetricSeries level;
        for (const char* lang : {"a", "b", "c"})
            for (int y = 2005 + static_cast<int>(rng() % 3), end = y + static_cast<int>(rng() % 10); y <= end; ++y)
                level.cells[{lang, y}] = static_cast<double>(static_cast<std::int64_t>(rng() % 2001) - 1000);
        auto diff = first_difference(level);
        MetricSeries rebuilt;
        for (const auto& [k, v] : level.cells) {
            auto prev = rebuilt.cells.find({k.language, k.year - 1});
            rebuilt.cells[k] = prev == rebuilt.cells.end() ? v : prev->second + diff.cells.at(k);
        }
        CHECK(rebuilt.cells == level.cells);
    }
}
