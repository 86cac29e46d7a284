#include "langpulse/so_metrics.hpp"

#include <algorithm>

namespace langpulse {

std::optional<Question> to_question(const CleanRecord& post, const LanguageAliasMap& aliases,
                                    const std::set<std::string>& allowed)
{
    if (auto type = post.maybe_integer(col::posts::post_type_id); type && *type != 1)
        return std::nullopt;
    Question q;
    q.languages = explode_post_tags(post.text(col::posts::tag), aliases, allowed);
    if (q.languages.empty())
        return std::nullopt;
    q.id = post.integer(col::posts::id);
    q.owner_user_id = post.integer(col::posts::owner_user_id);
    q.score = post.integer(col::posts::score);
    q.answer_count = post.integer(col::posts::answer_count);
    q.year = *post.year;
    q.created_at = post.timestamp;
    return q;
}

AnswerLink to_answer_link(const CleanRecord& answer)
{
    return {answer.integer(col::answers::answer_id), answer.integer(col::answers::question_id),
            answer.integer(col::answers::creation_time)};
}

void SoAccumulator::add(const Question& q)
{
    for (const auto& lang : q.languages) {
        LangYear key{lang, q.year};
        questions_.add(key);
        answers_.add(key, q.answer_count);
        scores_.add(key, q.score);
        unanswered_.add(key, q.answer_count == 0 ? 1 : 0);
        auto [it, added] = first_year_.try_emplace(UserLanguage{q.owner_user_id, lang}, q.year);
        if (!added)
            it->second = std::min(it->second, q.year);
    }
}

void SoAccumulator::merge(const SoAccumulator& other)
{
    questions_.merge(other.questions_);
    answers_.merge(other.answers_);
    scores_.merge(other.scores_);
    unanswered_.merge(other.unanswered_);
    for (const auto& [k, y] : other.first_year_) {
        auto [it, added] = first_year_.try_emplace(k, y);
        if (!added)
            it->second = std::min(it->second, y);
    }
}

LangYearCounts SoAccumulator::users() const
{
    LangYearCounts counts;
    for (const auto& [k, y] : first_year_)
        counts.add({k.language, y});
    return counts;
}

namespace {

SoAccumulator accumulate(std::span<const Question> questions)
{
    SoAccumulator acc;
    for (const auto& q : questions)
        acc.add(q);
    return acc;
}

} // namespace

LangYearCounts count_questions(std::span<const Question> questions) { return accumulate(questions).questions(); }
LangYearCounts count_new_so_users(std::span<const Question> questions) { return accumulate(questions).users(); }
LangYearCounts count_answers(std::span<const Question> questions) { return accumulate(questions).answers(); }
LangYearCounts sum_scores(std::span<const Question> questions) { return accumulate(questions).scores(); }
LangYearCounts count_unanswered(std::span<const Question> questions) { return accumulate(questions).unanswered(); }

void FirstAnswerIndex::add(const AnswerLink& link)
{
    auto [it, added] = first_.try_emplace(link.question_id, link.creation_time);
    if (!added)
        it->second = std::min(it->second, link.creation_time);
}

std::optional<std::int64_t> FirstAnswerIndex::find(std::int64_t question_id) const
{
    auto it = first_.find(question_id);
    if (it == first_.end())
        return std::nullopt;
    return it->second;
}

void ResponseTimeAccumulator::add(const Question& q, const FirstAnswerIndex& answers)
{
    if (!q.created_at)
        return;
    saw_timestamp_ = true;
    auto first = answers.find(q.id);
    if (!first)
        return;
    double hours = std::max<std::int64_t>(0, *first - *q.created_at) / 3600.0;
    for (const auto& lang : q.languages) {
        auto& s = sums_[LangYear{lang, q.year}];
        s.hours += hours;
        ++s.count;
    }
}

void ResponseTimeAccumulator::merge(const ResponseTimeAccumulator& other)
{
    saw_timestamp_ |= other.saw_timestamp_;
    for (const auto& [k, s] : other.sums_) {
        auto& mine = sums_[k];
        mine.hours += s.hours;
        mine.count += s.count;
    }
}

ResponseTimes ResponseTimeAccumulator::finish(bool have_answers) const
{
    ResponseTimes out;
    out.available = have_answers && saw_timestamp_;
    if (!out.available)
        return out;
    for (const auto& [k, s] : sums_)
        if (s.count > 0)
            out.mean_hours.emplace(k, s.hours / static_cast<double>(s.count));
    return out;
}

ResponseTimes avg_response_time(std::span<const Question> questions, std::span<const AnswerLink> answers)
{
    FirstAnswerIndex index;
    for (const auto& a : answers)
        index.add(a);
    ResponseTimeAccumulator acc;
    for (const auto& q : questions)
        acc.add(q, index);
    return acc.finish(!answers.empty());
}

std::vector<SoIntermediate> assemble_so_intermediate(const SoPartials& partials)
{
    std::map<LangYear, SoIntermediate> rows;
    auto fold = [&](const LangYearCounts& counts, std::int64_t SoIntermediate::*field) {
        for (const auto& [key, n] : counts) {
            auto& row = rows[key];
            row.key = key;
            row.*field += n;
        }
    };
    fold(partials.users, &SoIntermediate::num_users);
    fold(partials.questions, &SoIntermediate::num_questions);
    fold(partials.answers, &SoIntermediate::num_answers);
    fold(partials.scores, &SoIntermediate::total_score);
    fold(partials.unanswered, &SoIntermediate::num_unanswered_questions);
    if (partials.response.available) {
        for (const auto& [key, hours] : partials.response.mean_hours) {
            auto& row = rows[key];
            row.key = key;
            row.avg_response_time_hours = hours;
        }
    }
    std::vector<SoIntermediate> out;
    out.reserve(rows.size());
    for (auto& [k, row] : rows)
        out.push_back(std::move(row));
    return out;
}

} // namespace langpulse
