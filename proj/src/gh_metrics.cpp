#include "langpulse/gh_metrics.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <unordered_set>

namespace langpulse {

GhAccounting& GhAccounting::operator+=(const GhAccounting& other)
{
    duplicate_projects += other.duplicate_projects;
    unmatched_commits += other.unmatched_commits;
    pull_requests_without_open += other.pull_requests_without_open;
    pull_requests_unmatched_repo += other.pull_requests_unmatched_repo;
    unmatched_issues += other.unmatched_issues;
    return *this;
}

bool ProjectLanguageIndex::insert(std::int64_t project_id, std::string_view language, int year)
{
    if (entries_.contains(project_id)) {
        ++duplicates_;
        return false;
    }
    std::string name(language);
    auto [it, added] = language_ids_.try_emplace(name, static_cast<std::uint32_t>(languages_.size()));
    if (added)
        languages_.push_back(std::move(name));
    entries_.emplace(project_id, Entry{it->second, year});
    return true;
}

bool ProjectLanguageIndex::insert(const CleanRecord& project)
{
    return insert(project.integer(col::projects::id), project.text(col::projects::language), *project.year);
}

const ProjectLanguageIndex::Entry* ProjectLanguageIndex::find(std::int64_t project_id) const
{
    auto it = entries_.find(project_id);
    return it == entries_.end() ? nullptr : &it->second;
}

std::optional<LangYear> ProjectLanguageIndex::lookup(std::int64_t project_id) const
{
    if (const auto* e = find(project_id))
        return LangYear{languages_[e->language], e->year};
    return std::nullopt;
}

ProjectLanguageIndex build_project_index(std::span<const CleanRecord> projects)
{
    ProjectLanguageIndex index;
    for (const auto& p : projects)
        index.insert(p);
    return index;
}

LangYearCounts count_new_projects(std::span<const CleanRecord> projects)
{
    LangYearCounts counts;
    std::unordered_set<std::int64_t> seen;
    for (const auto& p : projects)
        if (seen.insert(p.integer(col::projects::id)).second)
            counts.add({p.text(col::projects::language), *p.year});
    return counts;
}

void NewUserTracker::add(std::int64_t user_id, const std::string& language, int year)
{
    auto [it, added] = first_year_.try_emplace(UserLanguage{user_id, language}, year);
    if (!added && year < it->second)
        it->second = year;
}

void NewUserTracker::add_project(const CleanRecord& project)
{
    if (auto owner = project.maybe_integer(col::projects::owner_id))
        add(*owner, project.text(col::projects::language), *project.year);
}

void NewUserTracker::add_commit(const CleanRecord& commit, const ProjectLanguageIndex& index)
{
    auto author = commit.maybe_integer(col::commits::author_id);
    if (!author)
        return;
    if (const auto* e = index.find(commit.integer(col::commits::project_id)))
        add(*author, index.language_name(e->language), *commit.year);
}

void NewUserTracker::merge(const NewUserTracker& other)
{
    for (const auto& [k, y] : other.first_year_)
        add(k.user, k.language, y);
}

LangYearCounts NewUserTracker::finish() const
{
    LangYearCounts counts;
    for (const auto& [k, y] : first_year_)
        counts.add({k.language, y});
    return counts;
}

LangYearCounts count_new_users(std::span<const CleanRecord> projects, std::span<const CleanRecord> commits,
                               const ProjectLanguageIndex& index)
{
    NewUserTracker tracker;
    std::unordered_set<std::int64_t> seen;
    for (const auto& p : projects)
        if (seen.insert(p.integer(col::projects::id)).second)
            tracker.add_project(p);
    for (const auto& c : commits)
        tracker.add_commit(c, index);
    return tracker.finish();
}

void CommitCounter::add(const CleanRecord& commit)
{
    by_project_.add({commit.integer(col::commits::project_id), *commit.year});
}

LangYearCounts CommitCounter::finish(const ProjectLanguageIndex& index, GhAccounting* accounting) const
{
    LangYearCounts counts;
    std::uint64_t unmatched = 0;
    for (const auto& [key, n] : by_project_) {
        if (const auto* e = index.find(key.project_id))
            counts.add({index.language_name(e->language), key.year}, n);
        else
            unmatched += static_cast<std::uint64_t>(n);
    }
    if (accounting)
        accounting->unmatched_commits += unmatched;
    return counts;
}

LangYearCounts count_commits(std::span<const CleanRecord> commits, const ProjectLanguageIndex& index,
                             GhAccounting* accounting)
{
    CommitCounter counter;
    for (const auto& c : commits)
        counter.add(c);
    return counter.finish(index, accounting);
}

bool action_is(std::string_view action, std::string_view expected)
{
    return action.size() == expected.size() &&
           std::equal(action.begin(), action.end(), expected.begin(), [](char a, char b) {
               return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
           });
}

void PullRequestCounter::add_history(const CleanRecord& event)
{
    if (!action_is(event.text(col::pull_request_history::action), "opened"))
        return;
    auto pr = event.integer(col::pull_request_history::pull_request_id);
    auto [it, added] = first_opened_.try_emplace(pr, *event.year);
    if (!added)
        it->second = std::min(it->second, *event.year);
}

void PullRequestCounter::add_pull_request(const CleanRecord& pull_request)
{
    auto id = pull_request.integer(col::pull_requests::id);
    if (base_repo_.try_emplace(id, pull_request.integer(col::pull_requests::base_repo_id)).second)
        order_.push_back(id);
}

void PullRequestCounter::merge(const PullRequestCounter& other)
{
    for (const auto& [pr, year] : other.first_opened_) {
        auto [it, added] = first_opened_.try_emplace(pr, year);
        if (!added)
            it->second = std::min(it->second, year);
    }
    for (auto id : other.order_) {
        if (base_repo_.try_emplace(id, other.base_repo_.at(id)).second)
            order_.push_back(id);
    }
}

LangYearCounts PullRequestCounter::finish(const ProjectLanguageIndex& index, GhAccounting* accounting) const
{
    LangYearCounts counts;
    GhAccounting local;
    for (const auto& [pr, repo] : base_repo_) {
        auto opened = first_opened_.find(pr);
        if (opened == first_opened_.end()) {
            ++local.pull_requests_without_open;
            continue;
        }
        const auto* e = index.find(repo);
        if (!e) {
            ++local.pull_requests_unmatched_repo;
            continue;
        }
        counts.add({index.language_name(e->language), opened->second});
    }
    if (accounting)
        *accounting += local;
    return counts;
}

LangYearCounts count_pull_requests(std::span<const CleanRecord> pull_requests, std::span<const CleanRecord> history,
                                   const ProjectLanguageIndex& index, GhAccounting* accounting)
{
    PullRequestCounter counter;
    for (const auto& h : history)
        counter.add_history(h);
    for (const auto& pr : pull_requests)
        counter.add_pull_request(pr);
    return counter.finish(index, accounting);
}

void PendingIssueCounter::add_issue(const CleanRecord& issue)
{
    auto id = issue.integer(col::issues::id);
    if (issues_.try_emplace(id, Issue{issue.integer(col::issues::repo_id), *issue.year}).second)
        order_.push_back(id);
}

void PendingIssueCounter::add_event(const CleanRecord& event)
{
    const auto& action = event.text(col::issue_events::action);
    bool closed = action_is(action, "closed");
    if (!closed && !action_is(action, "reopened"))
        return;
    LastAction candidate{*event.year, event.timestamp.value_or(std::numeric_limits<std::int64_t>::min()),
                         event.maybe_integer(col::issue_events::event_id).value_or(std::numeric_limits<std::int64_t>::min()),
                         closed};
    auto [it, added] = last_.try_emplace(event.integer(col::issue_events::issue_id), candidate);
    if (!added)
        it->second = std::max(it->second, candidate);
}

void PendingIssueCounter::merge(const PendingIssueCounter& other)
{
    for (auto id : other.order_) {
        if (issues_.try_emplace(id, other.issues_.at(id)).second)
            order_.push_back(id);
    }
    for (const auto& [id, action] : other.last_) {
        auto [it, added] = last_.try_emplace(id, action);
        if (!added)
            it->second = std::max(it->second, action);
    }
}

IssueCounts PendingIssueCounter::finish(const ProjectLanguageIndex& index, GhAccounting* accounting) const
{
    IssueCounts out;
    std::uint64_t unmatched = 0;
    for (const auto& [id, issue] : issues_) {
        const auto* e = index.find(issue.repo_id);
        if (!e) {
            ++unmatched;
            continue;
        }
        LangYear key{index.language_name(e->language), issue.year};
        out.opened.add(key);
        auto last = last_.find(id);
        if (last == last_.end() || !last->second.closed)
            out.pending.add(key);
    }
    if (accounting)
        accounting->unmatched_issues += unmatched;
    return out;
}

LangYearCounts count_pending_issues(std::span<const CleanRecord> issues, std::span<const CleanRecord> issue_events,
                                    const ProjectLanguageIndex& index, GhAccounting* accounting)
{
    PendingIssueCounter counter;
    for (const auto& i : issues)
        counter.add_issue(i);
    for (const auto& e : issue_events)
        counter.add_event(e);
    return counter.finish(index, accounting).pending;
}

std::vector<GhIntermediate> assemble_gh_intermediate(const GhPartials& partials, const std::set<std::string>* languages)
{
    std::map<LangYear, GhIntermediate> rows;
    auto fold = [&](const LangYearCounts& counts, std::int64_t GhIntermediate::*field) {
        for (const auto& [key, n] : counts) {
            if (languages && !languages->contains(key.language))
                continue;
            auto& row = rows[key];
            row.key = key;
            row.*field += n;
        }
    };
    fold(partials.users, &GhIntermediate::num_users);
    fold(partials.projects, &GhIntermediate::num_projects);
    fold(partials.commits, &GhIntermediate::num_commits);
    fold(partials.pull_requests, &GhIntermediate::num_pull_requests);
    fold(partials.pending_issues, &GhIntermediate::num_pending_issues);

    std::vector<GhIntermediate> out;
    out.reserve(rows.size());
    for (auto& [k, row] : rows)
        out.push_back(std::move(row));
    return out;
}

} // namespace langpulse
