#pragma once

// Brute-force reference implementations used only by the tests. Everything here
// works with nested loops over plain vectors and shares no code with the library
// beyond the record types.

#include "langpulse/profiler.hpp"
#include "langpulse/schema.hpp"
#include "langpulse/so_metrics.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

using langpulse::CleanRecord;
using langpulse::LangYear;
using Counts = std::map<LangYear, std::int64_t>;

namespace col = langpulse::col;

template <typename Partial>
Counts to_map(const Partial& p)
{
    Counts out;
    for (const auto& [k, v] : p)
        out[k] = v;
    return out;
}

inline void bump(Counts& c, const LangYear& k, std::int64_t v = 1)
{
    c[k] += v;
}

inline std::string lower(std::string s)
{
    for (auto& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

/// Language and year of the first projects row carrying this id, by linear scan.
inline std::optional<LangYear> project_of(const std::vector<CleanRecord>& projects, std::int64_t id)
{
    for (const auto& p : projects)
        if (p.integer(col::projects::id) == id)
            return LangYear{p.text(col::projects::language), *p.year};
    return std::nullopt;
}

/// Rows whose id did not appear earlier in the list.
inline std::vector<CleanRecord> first_occurrences(const std::vector<CleanRecord>& rows, std::size_t id_column)
{
    std::vector<CleanRecord> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        bool seen = false;
        for (std::size_t j = 0; j < i; ++j)
            seen |= rows[j].integer(id_column) == rows[i].integer(id_column);
        if (!seen)
            out.push_back(rows[i]);
    }
    return out;
}

inline Counts new_projects(const std::vector<CleanRecord>& projects)
{
    Counts c;
    for (const auto& p : first_occurrences(projects, col::projects::id))
        bump(c, {p.text(col::projects::language), *p.year});
    return c;
}

inline Counts new_users(const std::vector<CleanRecord>& projects, const std::vector<CleanRecord>& commits)
{
    // every (user, language, year) event, then the minimum year per (user, language)
    std::vector<std::tuple<std::int64_t, std::string, int>> events;
    for (const auto& p : first_occurrences(projects, col::projects::id))
        if (!p.is_null(col::projects::owner_id))
            events.emplace_back(p.integer(col::projects::owner_id), p.text(col::projects::language), *p.year);
    for (const auto& c : commits) {
        if (c.is_null(col::commits::author_id))
            continue;
        if (auto proj = project_of(projects, c.integer(col::commits::project_id)))
            events.emplace_back(c.integer(col::commits::author_id), proj->language, *c.year);
    }
    Counts out;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& [u, l, y] = events[i];
        bool earliest = true;
        for (std::size_t j = 0; j < events.size(); ++j) {
            const auto& [u2, l2, y2] = events[j];
            if (u2 == u && l2 == l && (y2 < y || (y2 == y && j < i)))
                earliest = false;
        }
        if (earliest)
            bump(out, {l, y});
    }
    return out;
}

/// Direct join of every commit row against projects, then count.
inline Counts commits_joined(const std::vector<CleanRecord>& projects, const std::vector<CleanRecord>& commits,
                             std::int64_t* unmatched = nullptr)
{
    Counts out;
    for (const auto& c : commits) {
        if (auto proj = project_of(projects, c.integer(col::commits::project_id)))
            bump(out, {proj->language, *c.year});
        else if (unmatched)
            ++*unmatched;
    }
    return out;
}

inline Counts pull_requests(const std::vector<CleanRecord>& projects, const std::vector<CleanRecord>& prs,
                            const std::vector<CleanRecord>& history)
{
    Counts out;
    for (const auto& pr : first_occurrences(prs, col::pull_requests::id)) {
        auto id = pr.integer(col::pull_requests::id);
        std::optional<int> opened;
        for (const auto& h : history) {
            if (h.integer(col::pull_request_history::pull_request_id) != id)
                continue;
            if (lower(h.text(col::pull_request_history::action)) != "opened")
                continue;
            if (!opened || *h.year < *opened)
                opened = *h.year;
        }
        auto repo = project_of(projects, pr.integer(col::pull_requests::base_repo_id));
        if (opened && repo)
            bump(out, {repo->language, *opened});
    }
    return out;
}

/// Chronological key of an issue event: (year, timestamp, event id).
inline std::tuple<int, std::int64_t, std::int64_t> event_key(const CleanRecord& e)
{
    return {*e.year, e.timestamp.value_or(INT64_MIN), e.maybe_integer(col::issue_events::event_id).value_or(INT64_MIN)};
}

/// Pending iff no close event, or some reopen strictly after the latest close.
inline Counts pending_issues(const std::vector<CleanRecord>& projects, const std::vector<CleanRecord>& issues,
                             const std::vector<CleanRecord>& events, Counts* opened_out = nullptr)
{
    Counts out;
    for (const auto& issue : first_occurrences(issues, col::issues::id)) {
        auto repo = project_of(projects, issue.integer(col::issues::repo_id));
        if (!repo)
            continue;
        LangYear key{repo->language, *issue.year};
        if (opened_out)
            bump(*opened_out, key);
        std::optional<std::tuple<int, std::int64_t, std::int64_t>> last_close;
        for (const auto& e : events) {
            if (e.integer(col::issue_events::issue_id) != issue.integer(col::issues::id))
                continue;
            if (lower(e.text(col::issue_events::action)) == "closed" && (!last_close || event_key(e) > *last_close))
                last_close = event_key(e);
        }
        bool pending = !last_close;
        if (last_close) {
            for (const auto& e : events) {
                if (e.integer(col::issue_events::issue_id) == issue.integer(col::issues::id) &&
                    lower(e.text(col::issue_events::action)) == "reopened" && event_key(e) > *last_close)
                    pending = true;
            }
        }
        if (pending)
            bump(out, key);
    }
    return out;
}

// -- StackOverflow -----------------------------------------------------------

using langpulse::AnswerLink;
using langpulse::Question;

inline Counts questions(const std::vector<Question>& qs)
{
    Counts c;
    for (const auto& q : qs)
        for (const auto& l : q.languages)
            bump(c, {l, q.year});
    return c;
}

inline Counts so_users(const std::vector<Question>& qs)
{
    Counts c;
    for (std::size_t i = 0; i < qs.size(); ++i) {
        for (const auto& l : qs[i].languages) {
            bool earliest = true;
            for (std::size_t j = 0; j < qs.size(); ++j) {
                if (qs[j].owner_user_id != qs[i].owner_user_id)
                    continue;
                if (std::find(qs[j].languages.begin(), qs[j].languages.end(), l) == qs[j].languages.end())
                    continue;
                if (qs[j].year < qs[i].year || (qs[j].year == qs[i].year && j < i))
                    earliest = false;
            }
            if (earliest)
                bump(c, {l, qs[i].year});
        }
    }
    return c;
}

inline Counts answers(const std::vector<Question>& qs)
{
    Counts c;
    for (const auto& q : qs)
        for (const auto& l : q.languages)
            bump(c, {l, q.year}, q.answer_count);
    return c;
}

inline Counts scores(const std::vector<Question>& qs)
{
    Counts c;
    for (const auto& q : qs)
        for (const auto& l : q.languages)
            bump(c, {l, q.year}, q.score);
    return c;
}

inline Counts unanswered(const std::vector<Question>& qs)
{
    Counts c;
    for (const auto& q : qs)
        for (const auto& l : q.languages)
            bump(c, {l, q.year}, q.answer_count == 0 ? 1 : 0);
    return c;
}

inline std::map<LangYear, double> response_hours(const std::vector<Question>& qs, const std::vector<AnswerLink>& as)
{
    std::map<LangYear, std::pair<double, int>> acc;
    for (const auto& q : qs) {
        if (!q.created_at)
            continue;
        std::optional<std::int64_t> first;
        for (const auto& a : as)
            if (a.question_id == q.id && (!first || a.creation_time < *first))
                first = a.creation_time;
        if (!first)
            continue;
        double hours = *first > *q.created_at ? static_cast<double>(*first - *q.created_at) / 3600.0 : 0.0;
        for (const auto& l : q.languages) {
            acc[{l, q.year}].first += hours;
            acc[{l, q.year}].second += 1;
        }
    }
    std::map<LangYear, double> out;
    for (const auto& [k, v] : acc)
        out[k] = v.first / v.second;
    return out;
}

// -- profiles ----------------------------------------------------------------

struct BruteProfile {
    std::optional<std::int64_t> min, max;
    std::uint64_t distinct = 0;
};

/// Min/max (lengths for strings) and distinct count by pairwise comparison.
inline BruteProfile profile(const std::vector<langpulse::TypedValue>& values)
{
    BruteProfile p;
    std::vector<langpulse::TypedValue> seen;
    for (const auto& v : values) {
        if (std::holds_alternative<std::monostate>(v))
            continue;
        std::int64_t measure = 0;
        if (const auto* n = std::get_if<std::int64_t>(&v)) {
            measure = *n;
        } else {
            for (unsigned char c : std::get<std::string>(v))
                measure += (c & 0xC0) != 0x80;
        }
        if (!p.min || measure < *p.min)
            p.min = measure;
        if (!p.max || measure > *p.max)
            p.max = measure;
        bool dup = false;
        for (const auto& s : seen)
            dup |= s == v;
        if (!dup)
            seen.push_back(v);
    }
    p.distinct = seen.size();
    return p;
}

// -- random instances --------------------------------------------------------

struct Instance {
    std::vector<CleanRecord> projects, commits, pull_requests, history, issues, events;
    std::vector<Question> questions;
    std::vector<AnswerLink> answers;
};

inline CleanRecord record(std::string table, std::vector<langpulse::TypedValue> values, std::optional<int> year,
                          std::optional<std::int64_t> ts = std::nullopt)
{
    CleanRecord r;
    r.table_name = std::move(table);
    r.typed_values = std::move(values);
    r.year = year;
    r.timestamp = ts;
    return r;
}

/// A random cleaned instance of at most `max_rows` rows in total, with duplicate ids,
/// dangling foreign keys, null optional columns and mixed-case actions.
inline Instance random_instance(std::uint64_t seed, std::size_t max_rows = 1000)
{
    std::mt19937_64 rng(seed);
    auto uniform = [&](std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
    };
    const std::vector<std::string> langs = {"c", "c++", "go", "java", "javascript", "python", "rust"};
    const std::size_t budget = max_rows / 8;
    Instance in;
    using langpulse::TypedValue;
    const TypedValue null = std::monostate{};

    const std::int64_t n_projects = uniform(1, static_cast<std::int64_t>(budget));
    const std::int64_t n_users = uniform(1, 40);
    for (std::int64_t i = 0; i < n_projects; ++i) {
        std::int64_t id = uniform(1, n_projects + 3);
        TypedValue owner = uniform(0, 9) == 0 ? null : TypedValue(uniform(1, n_users));
        int year = static_cast<int>(uniform(2008, 2019));
        in.projects.push_back(record("projects",
                                     {id, owner, langs[static_cast<std::size_t>(uniform(0, langs.size() - 1))],
                                      static_cast<std::int64_t>(year)},
                                     year));
    }
    auto any_project = [&] { return uniform(1, n_projects + 6); };

    for (std::size_t i = 0, n = static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(budget * 3))); i < n; ++i) {
        int year = static_cast<int>(uniform(2008, 2019));
        TypedValue author = uniform(0, 9) == 0 ? null : TypedValue(uniform(1, n_users));
        in.commits.push_back(record("commits",
                                    {static_cast<std::int64_t>(i + 1), author, uniform(1, n_users), any_project(),
                                     static_cast<std::int64_t>(year)},
                                    year));
    }

    const std::vector<std::string> pr_actions = {"opened", "Opened", "closed", "merged", "reopened", "synchronize"};
    const std::int64_t n_prs = uniform(0, static_cast<std::int64_t>(budget));
    for (std::int64_t i = 0; i < n_prs; ++i) {
        std::int64_t id = 100 + uniform(0, n_prs + 2);
        in.pull_requests.push_back(
            record("pull_requests", {id, any_project(), any_project(), null, null, i}, std::nullopt));
    }
    for (std::size_t i = 0, n = static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(budget * 2))); i < n; ++i) {
        int year = static_cast<int>(uniform(2010, 2019));
        in.history.push_back(record("pull_request_history",
                                    {static_cast<std::int64_t>(i), 100 + uniform(0, n_prs + 4),
                                     pr_actions[static_cast<std::size_t>(uniform(0, pr_actions.size() - 1))],
                                     uniform(1, n_users), static_cast<std::int64_t>(year)},
                                    year));
    }

    const std::vector<std::string> issue_actions = {"closed", "CLOSED", "reopened", "Reopened", "referenced",
                                                    "subscribed", "mentioned"};
    const std::int64_t n_issues = uniform(0, static_cast<std::int64_t>(budget));
    for (std::int64_t i = 0; i < n_issues; ++i) {
        int year = static_cast<int>(uniform(2010, 2019));
        in.issues.push_back(record("issues", {1000 + uniform(0, n_issues + 2), any_project(), i,
                                              static_cast<std::int64_t>(year)},
                                   year));
    }
    for (std::size_t i = 0, n = static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(budget * 2))); i < n; ++i) {
        int year = static_cast<int>(uniform(2010, 2019));
        // small event ids force (year, event_id) ties between close and reopen
        TypedValue event_id = uniform(0, 5) == 0 ? null : TypedValue(uniform(1, 30));
        in.events.push_back(record("issue_events",
                                   {event_id, 1000 + uniform(0, n_issues + 4),
                                    issue_actions[static_cast<std::size_t>(uniform(0, issue_actions.size() - 1))],
                                    static_cast<std::int64_t>(year)},
                                   year));
    }

    const std::int64_t n_questions = uniform(0, static_cast<std::int64_t>(budget));
    for (std::int64_t i = 0; i < n_questions; ++i) {
        Question q;
        q.id = 5000 + i;
        q.owner_user_id = uniform(1, n_users);
        q.score = uniform(-5, 20);
        q.answer_count = uniform(0, 3) == 0 ? 0 : uniform(1, 6);
        q.year = static_cast<int>(uniform(2009, 2019));
        if (uniform(0, 4) != 0)
            q.created_at = (q.year - 1970) * 31556952LL + uniform(0, 86400 * 300);
        auto n_tags = uniform(1, 3);
        for (std::int64_t t = 0; t < n_tags; ++t) {
            auto l = langs[static_cast<std::size_t>(uniform(0, langs.size() - 1))];
            if (std::find(q.languages.begin(), q.languages.end(), l) == q.languages.end())
                q.languages.push_back(l);
        }
        in.questions.push_back(std::move(q));
    }
    for (std::size_t i = 0, n = static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(budget))); i < n; ++i) {
        AnswerLink a;
        a.answer_id = 90000 + static_cast<std::int64_t>(i);
        a.question_id = 5000 + uniform(0, n_questions + 2);
        std::int64_t base = 0;
        for (const auto& q : in.questions)
            if (q.id == a.question_id && q.created_at)
                base = *q.created_at;
        a.creation_time = base + uniform(-3600, 86400 * 10);
        in.answers.push_back(a);
    }
    return in;
}

/// Splits [0, n) into `parts` contiguous, possibly empty ranges at random cut points.
inline std::vector<std::pair<std::size_t, std::size_t>> random_partition(std::mt19937_64& rng, std::size_t n,
                                                                         std::size_t parts)
{
    std::vector<std::size_t> cuts;
    for (std::size_t i = 1; i < parts; ++i)
        cuts.push_back(std::uniform_int_distribution<std::size_t>(0, n)(rng));
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t prev = 0;
    for (auto c : cuts) {
        out.emplace_back(prev, c);
        prev = c;
    }
    out.emplace_back(prev, n);
    return out;
}

} // namespace oracle
