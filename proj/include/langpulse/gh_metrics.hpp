#pragma once

#include "langpulse/counts.hpp"
#include "langpulse/schema.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace langpulse {

struct GhIntermediate {
    LangYear key;
    std::int64_t num_users = 0;
    std::int64_t num_projects = 0;
    std::int64_t num_commits = 0;
    std::int64_t num_pull_requests = 0;
    std::int64_t num_pending_issues = 0;

    bool operator==(const GhIntermediate&) const = default;
};

/// Rows excluded from the GitHub metrics, by cause.
struct GhAccounting {
    std::uint64_t duplicate_projects = 0;
    std::uint64_t unmatched_commits = 0;
    std::uint64_t pull_requests_without_open = 0;
    std::uint64_t pull_requests_unmatched_repo = 0;
    std::uint64_t unmatched_issues = 0;

    GhAccounting& operator+=(const GhAccounting& other);
    bool operator==(const GhAccounting&) const = default;
};

/// project id -> (language, creation year). Languages are interned; the
/// index is read-only once built and can be shared between threads.
class ProjectLanguageIndex {
public:
    struct Entry {
        std::uint32_t language = 0;
        int year = 0;
    };

    /// Returns false (and counts a duplicate) if the id is already present.
    bool insert(std::int64_t project_id, std::string_view language, int year);
    /// Inserts a cleaned projects row.
    bool insert(const CleanRecord& project);

    const Entry* find(std::int64_t project_id) const;
    const std::string& language_name(std::uint32_t id) const { return languages_[id]; }
    std::optional<LangYear> lookup(std::int64_t project_id) const;

    std::size_t size() const { return entries_.size(); }
    std::uint64_t duplicates() const { return duplicates_; }

private:
    std::unordered_map<std::int64_t, Entry> entries_;
    std::vector<std::string> languages_;
    std::unordered_map<std::string, std::uint32_t> language_ids_;
    std::uint64_t duplicates_ = 0;
};

ProjectLanguageIndex build_project_index(std::span<const CleanRecord> projects);

/// Later rows repeating a project id are ignored here and in count_new_users.
LangYearCounts count_new_projects(std::span<const CleanRecord> projects);

/// Tracks each (user, language) pair's earliest activity year across project
/// ownership and commit authorship.
class NewUserTracker {
public:
    void add_project(const CleanRecord& project);
    /// Commits to projects missing from the index are ignored.
    void add_commit(const CleanRecord& commit, const ProjectLanguageIndex& index);
    void add(std::int64_t user_id, const std::string& language, int year);
    void merge(const NewUserTracker& other);
    LangYearCounts finish() const;

private:
    struct UserLanguage {
        std::int64_t user = 0;
        std::string language;
        bool operator==(const UserLanguage&) const = default;
    };
    struct UserLanguageHash {
        std::size_t operator()(const UserLanguage& k) const noexcept
        {
            return mix64(static_cast<std::uint64_t>(k.user)) ^ std::hash<std::string>{}(k.language);
        }
    };
    std::unordered_map<UserLanguage, int, UserLanguageHash> first_year_;
};

LangYearCounts count_new_users(std::span<const CleanRecord> projects, std::span<const CleanRecord> commits,
                               const ProjectLanguageIndex& index);

struct ProjectYear {
    std::int64_t project_id = 0;
    int year = 0;
    auto operator<=>(const ProjectYear&) const = default;
};

struct ProjectYearHash {
    std::size_t operator()(const ProjectYear& k) const noexcept
    {
        return mix64(static_cast<std::uint64_t>(k.project_id) * 31 + static_cast<std::uint64_t>(k.year));
    }
};

/// Commits are first reduced by (project_id, year); only that much smaller
/// table is joined against the project index.
class CommitCounter {
public:
    void add(const CleanRecord& commit);
    void merge(const CommitCounter& other) { by_project_.merge(other.by_project_); }

    const PartialCounts<ProjectYear, ProjectYearHash>& by_project() const { return by_project_; }
    LangYearCounts finish(const ProjectLanguageIndex& index, GhAccounting* accounting = nullptr) const;

private:
    PartialCounts<ProjectYear, ProjectYearHash> by_project_;
};

LangYearCounts count_commits(std::span<const CleanRecord> commits, const ProjectLanguageIndex& index,
                             GhAccounting* accounting = nullptr);

/// Pull requests attributed to their base repo's language and the year of their earliest "opened" event.
class PullRequestCounter {
public:
    void add_history(const CleanRecord& event);
    void add_pull_request(const CleanRecord& pull_request);
    void merge(const PullRequestCounter& other);
    LangYearCounts finish(const ProjectLanguageIndex& index, GhAccounting* accounting = nullptr) const;

private:
    std::unordered_map<std::int64_t, int> first_opened_;
    std::unordered_map<std::int64_t, std::int64_t> base_repo_;
    std::vector<std::int64_t> order_;
};

LangYearCounts count_pull_requests(std::span<const CleanRecord> pull_requests, std::span<const CleanRecord> history,
                                   const ProjectLanguageIndex& index, GhAccounting* accounting = nullptr);

struct IssueCounts {
    LangYearCounts pending;
    LangYearCounts opened;
};

/// Issues whose chronologically last open/close action is not "closed".
/// Events are ordered by (year, timestamp, event_id); a close and a reopen with
/// identical keys resolve to closed.
class PendingIssueCounter {
public:
    void add_issue(const CleanRecord& issue);
    void add_event(const CleanRecord& event);
    void merge(const PendingIssueCounter& other);
    IssueCounts finish(const ProjectLanguageIndex& index, GhAccounting* accounting = nullptr) const;

private:
    struct Issue {
        std::int64_t repo_id = 0;
        int year = 0;
    };
    struct LastAction {
        int year = 0;
        std::int64_t timestamp = 0;
        std::int64_t event_id = 0;
        bool closed = false;
        auto operator<=>(const LastAction&) const = default;
    };
    std::unordered_map<std::int64_t, Issue> issues_;
    std::vector<std::int64_t> order_;
    std::unordered_map<std::int64_t, LastAction> last_;
};

LangYearCounts count_pending_issues(std::span<const CleanRecord> issues, std::span<const CleanRecord> issue_events,
                                    const ProjectLanguageIndex& index, GhAccounting* accounting = nullptr);

/// Case-insensitive exact match against "opened", "closed", "reopened".
bool action_is(std::string_view action, std::string_view expected);

struct GhPartials {
    LangYearCounts users;
    LangYearCounts projects;
    LangYearCounts commits;
    LangYearCounts pull_requests;
    LangYearCounts pending_issues;
};

/// One row per key seen in any partial, sorted by (language, year). Keys outside
/// `languages` are dropped when a filter is given.
std::vector<GhIntermediate> assemble_gh_intermediate(const GhPartials& partials,
                                                     const std::set<std::string>* languages = nullptr);

} // namespace langpulse
