#pragma once

#include "langpulse/counts.hpp"
#include "langpulse/schema.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace langpulse {

struct SoIntermediate {
    LangYear key;
    std::int64_t num_users = 0;
    std::int64_t num_questions = 0;
    std::int64_t num_answers = 0;
    std::int64_t total_score = 0;
    std::int64_t num_unanswered_questions = 0;
    std::optional<double> avg_response_time_hours;

    bool operator==(const SoIntermediate&) const = default;
};

/// A cleaned question with its tags exploded to canonical languages.
struct Question {
    std::int64_t id = 0;
    std::int64_t owner_user_id = 0;
    std::int64_t score = 0;
    std::int64_t answer_count = 0;
    int year = 0;
    /// Creation time in epoch seconds, when the source carried more than a year.
    std::optional<std::int64_t> created_at;
    std::vector<std::string> languages;
};

struct AnswerLink {
    std::int64_t answer_id = 0;
    std::int64_t question_id = 0;
    std::int64_t creation_time = 0;
};

/// Builds a Question from a cleaned posts row. Returns nullopt for non-question
/// posts and for questions with no tag in `allowed`.
std::optional<Question> to_question(const CleanRecord& post, const LanguageAliasMap& aliases,
                                    const std::set<std::string>& allowed);

AnswerLink to_answer_link(const CleanRecord& answer);

LangYearCounts count_questions(std::span<const Question> questions);
LangYearCounts count_new_so_users(std::span<const Question> questions);
LangYearCounts count_answers(std::span<const Question> questions);
LangYearCounts sum_scores(std::span<const Question> questions);
LangYearCounts count_unanswered(std::span<const Question> questions);

struct ResponseTimes {
    /// False when no question carried a full timestamp or no answer links were given.
    bool available = false;
    std::map<LangYear, double> mean_hours;
};

/// Earliest answer creation time per question id.
class FirstAnswerIndex {
public:
    void add(const AnswerLink& link);
    std::optional<std::int64_t> find(std::int64_t question_id) const;
    std::size_t size() const { return first_.size(); }

private:
    std::unordered_map<std::int64_t, std::int64_t> first_;
};

/// Running (sum, count) of response hours per key.
class ResponseTimeAccumulator {
public:
    void add(const Question& question, const FirstAnswerIndex& answers);
    void merge(const ResponseTimeAccumulator& other);
    ResponseTimes finish(bool have_answers) const;

private:
    struct Sum {
        double hours = 0.0;
        std::int64_t count = 0;
    };
    std::map<LangYear, Sum> sums_;
    bool saw_timestamp_ = false;
};

ResponseTimes avg_response_time(std::span<const Question> questions, std::span<const AnswerLink> answers);

/// The five count partials, accumulated in one pass.
class SoAccumulator {
public:
    void add(const Question& question);
    void merge(const SoAccumulator& other);

    LangYearCounts users() const;
    const LangYearCounts& questions() const { return questions_; }
    const LangYearCounts& answers() const { return answers_; }
    const LangYearCounts& scores() const { return scores_; }
    const LangYearCounts& unanswered() const { return unanswered_; }

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
    LangYearCounts questions_;
    LangYearCounts answers_;
    LangYearCounts scores_;
    LangYearCounts unanswered_;
};

struct SoPartials {
    LangYearCounts users;
    LangYearCounts questions;
    LangYearCounts answers;
    LangYearCounts scores;
    LangYearCounts unanswered;
    ResponseTimes response;
};

/// Union of keys across partials, sorted by (language, year). Missing counts
/// default to zero; a missing response time stays absent.
std::vector<SoIntermediate> assemble_so_intermediate(const SoPartials& partials);

} // namespace langpulse
