#include "langpulse/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <memory>
#include <sstream>

namespace langpulse {

void PipelineConfig::validate() const
{
    if (top_k < 1)
        throw Error("top_k must be at least 1");
    if (!(weight_w >= 0.0 && weight_w <= 1.0))
        throw Error("weight must lie in [0, 1]");
    if (year_range.min_year > year_range.max_year)
        throw Error("year range is inverted");
}

const TableProfile* MetricStore::profile(const std::string& table) const
{
    for (const auto& p : profiles)
        if (p.table_name == table)
            return &p;
    return nullptr;
}

namespace {

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free)
    {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
            throw Error("sha256 init failed");
    }
    void update(std::string_view bytes) { EVP_DigestUpdate(ctx_.get(), bytes.data(), bytes.size()); }
    std::string hex()
    {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_.get(), md, &len);
        static const char* digits = "0123456789abcdef";
        std::string out;
        for (unsigned i = 0; i < len; ++i) {
            out += digits[md[i] >> 4];
            out += digits[md[i] & 15];
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

std::string file_digest(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot read " + path.string());
    Sha256 h;
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        h.update(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())));
    }
    return h.hex();
}

const char* mode_name(SeriesMode mode) { return mode == SeriesMode::level ? "level" : "diff"; }

template <typename Writer, typename Rows>
void write_table(const std::filesystem::path& path, Writer writer, const Rows& rows)
{
    std::ostringstream ss;
    writer(ss, rows);
    write_file(path, ss.str());
}

struct Ingestor {
    const PipelineConfig& cfg;
    const LanguageAliasMap& aliases;
    MetricStore& store;
    std::map<std::string, std::string>& digests;
    std::vector<TableProfiler>& profilers;
    std::map<std::string, std::unique_ptr<std::ofstream>> clean_out;

    void run(const TableDescriptor& d, const std::function<void(const CleanRecord&)>& consume, bool profile = true)
    {
        TableProfiler* profiler = nullptr;
        if (profile) {
            profilers.emplace_back(d, cfg.exactness);
            profiler = &profilers.back();
        }
        std::ofstream* cleaned = nullptr;
        if (auto it = clean_out.find(d.table_name); it != clean_out.end())
            cleaned = it->second.get();
        for (const auto& path : table_sources(d, cfg.input_dir))
            digests[path.filename().string()] = file_digest(path);
        IngestOptions options{cfg.dialect, cfg.year_range};
        store.ingest[d.table_name] = ingest_table(d, cfg.input_dir, aliases, options, [&](CleanRecord&& rec) {
            if (profiler)
                profiler->add(rec);
            if (cleaned) {
                auto raw = to_raw(d, rec);
                bool first = true;
                for (const auto& v : raw.values) {
                    *cleaned << (first ? "" : ",");
                    if (v) {
                        if (v->find_first_of(",\"") != std::string::npos) {
                            *cleaned << '"';
                            for (char c : *v)
                                *cleaned << (c == '"' ? "\"\"" : std::string(1, c));
                            *cleaned << '"';
                        } else {
                            *cleaned << *v;
                        }
                    }
                    first = false;
                }
                *cleaned << '\n';
            }
            consume(rec);
        });
    }
};

nlohmann::ordered_json config_snapshot(const PipelineConfig& cfg, const std::string& alias_digest,
                                       const std::string& profile_digest)
{
    nlohmann::ordered_json j;
    j["top_k"] = cfg.top_k;
    j["weight"] = cfg.weight_w;
    j["min_year"] = cfg.year_range.min_year;
    j["max_year"] = cfg.year_range.max_year;
    j["mode"] = mode_name(cfg.mode);
    j["exactness"] = to_string(cfg.exactness);
    j["delimiter"] = std::string(1, cfg.dialect.delimiter);
    j["alias_file_sha256"] = alias_digest;
    j["profile_file_sha256"] = profile_digest;
    return j;
}

} // namespace

std::string sha256_hex(std::string_view bytes)
{
    Sha256 h;
    h.update(bytes);
    return h.hex();
}

MetricStore run_pipeline(const PipelineConfig& cfg, Stage last)
{
    cfg.validate();
    if (!std::filesystem::is_directory(cfg.input_dir))
        throw Error("input directory does not exist: " + cfg.input_dir.string());

    LanguageAliasMap aliases = LanguageAliasMap::defaults();
    std::string alias_digest, profile_digest;
    if (cfg.alias_file) {
        auto extra = LanguageAliasMap::load(*cfg.alias_file);
        for (const auto& [raw, canonical] : extra.entries())
            aliases.add(raw, canonical);
        alias_digest = file_digest(*cfg.alias_file);
    }
    if (cfg.profile_file) {
        WeightProfile::load(cfg.profile_file->string());
        profile_digest = file_digest(*cfg.profile_file);
    }

    // Every required table must exist before any work starts.
    for (const auto& name : table_names())
        if (table_sources(describe_table(name), cfg.input_dir).empty())
            throw Error("missing input for table " + name + " in " + cfg.input_dir.string());

    std::filesystem::create_directories(cfg.output_dir);
    MetricStore store;
    std::map<std::string, std::string> digests;
    std::vector<TableProfiler> profilers;
    profilers.reserve(table_names().size() + 1);
    Ingestor ingest{cfg, aliases, store, digests, profilers, {}};
    if (last == Stage::clean) {
        std::filesystem::create_directories(cfg.output_dir / "clean");
        for (const auto& name : table_names()) {
            auto out = std::make_unique<std::ofstream>(cfg.output_dir / "clean" / (name + ".csv"), std::ios::binary);
            const auto d = describe_table(name);
            for (std::size_t i = 0; i < d.columns.size(); ++i)
                *out << (i ? "," : "") << d.columns[i].name;
            *out << '\n';
            ingest.clean_out.emplace(name, std::move(out));
        }
    }

    // GitHub side. The project index is built once and then only read.
    ProjectLanguageIndex index;
    LangYearCounts project_counts;
    NewUserTracker users;
    CommitCounter commits;
    PullRequestCounter pull_requests;
    PendingIssueCounter issues;

    ingest.run(describe_table("projects"), [&](const CleanRecord& r) {
        if (index.insert(r)) {
            project_counts.add({r.text(col::projects::language), *r.year});
            users.add_project(r);
        }
    });
    store.accounting.duplicate_projects = index.duplicates();
    ingest.run(describe_table("commits"), [&](const CleanRecord& r) {
        commits.add(r);
        users.add_commit(r, index);
    });
    ingest.run(describe_table("pull_requests"), [&](const CleanRecord& r) { pull_requests.add_pull_request(r); });
    ingest.run(describe_table("pull_request_history"), [&](const CleanRecord& r) { pull_requests.add_history(r); });
    ingest.run(describe_table("issues"), [&](const CleanRecord& r) { issues.add_issue(r); });
    ingest.run(describe_table("issue_events"), [&](const CleanRecord& r) { issues.add_event(r); });

    auto top = top_k_languages(project_counts, cfg.top_k);
    std::set<std::string> allowed(top.begin(), top.end());
    {
        std::map<std::string, std::int64_t> totals;
        for (const auto& [k, n] : project_counts)
            totals[k.language] += n;
        for (const auto& lang : top)
            store.top_languages.push_back({lang, totals[lang]});
    }

    GhPartials gh;
    gh.users = users.finish();
    gh.projects = project_counts;
    gh.commits = commits.finish(index, &store.accounting);
    gh.pull_requests = pull_requests.finish(index, &store.accounting);
    gh.pending_issues = issues.finish(index, &store.accounting).pending;
    store.gh = assemble_gh_intermediate(gh, &allowed);

    // StackOverflow side.
    FirstAnswerIndex first_answers;
    bool have_answers = false;
    const auto answers = answers_descriptor();
    if (!table_sources(answers, cfg.input_dir).empty()) {
        ingest.run(
            answers,
            [&](const CleanRecord& r) {
                first_answers.add(to_answer_link(r));
                have_answers = true;
            },
            false);
    }
    SoAccumulator so_acc;
    ResponseTimeAccumulator response;
    ingest.run(describe_table("posts"), [&](const CleanRecord& r) {
        if (auto q = to_question(r, aliases, allowed)) {
            so_acc.add(*q);
            response.add(*q, first_answers);
        }
    });
    SoPartials so{so_acc.users(),      so_acc.questions(),  so_acc.answers(),
                  so_acc.scores(),     so_acc.unanswered(), response.finish(have_answers)};
    store.so = assemble_so_intermediate(so);

    auto composites = build_composites(store.gh, store.so, WeightConfig{cfg.weight_w});
    store.composites = composites.level;
    store.composites_diff = composites.differenced;
    store.params = composites.params;

    for (const auto& p : profilers)
        store.profiles.push_back(p.profile());

    // Artifacts.
    const auto& out = cfg.output_dir;
    for (auto& [name, stream] : ingest.clean_out)
        stream->close();
    {
        std::ostringstream text;
        write_drop_report_text(text, store);
        write_file(out / "drop_report.txt", text.str());
        write_file(out / "drop_report.json", drop_report_json(store).dump(2) + "\n");
    }
    if (last >= Stage::profile) {
        std::ostringstream text;
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (const auto& p : store.profiles) {
            write_profile_text(text, p);
            text << '\n';
            j.push_back(to_json(p));
        }
        write_file(out / "profiles.txt", text.str());
        write_file(out / "profiles.json", j.dump(2) + "\n");
    }
    if (last >= Stage::compute_gh) {
        write_table(out / "gh_intermediate.csv", write_gh_csv, store.gh);
        write_table(out / "top_languages.csv", write_top_languages_csv, store.top_languages);
    }
    if (last >= Stage::compute_so)
        write_table(out / "so_intermediate.csv", write_so_csv, store.so);
    if (last >= Stage::combine) {
        write_table(out / "composite_scores.csv", write_composite_csv, composites.level);
        write_table(out / "composite_scores_diff.csv", write_composite_csv, composites.differenced);
        write_table(out / "normalization_params.csv", write_params_csv, composites.params);
    }

    store.provenance.config = config_snapshot(cfg, alias_digest, profile_digest);
    store.provenance.input_digests = digests;
    {
        Sha256 h;
        h.update(store.provenance.config.dump());
        for (const auto& [name, d] : digests) {
            h.update(name);
            h.update(d);
        }
        store.provenance.digest = h.hex();
    }
    nlohmann::ordered_json manifest;
    manifest["digest"] = store.provenance.digest;
    manifest["config"] = store.provenance.config;
    manifest["inputs"] = store.provenance.input_digests;
    std::map<std::string, std::string> outputs;
    for (const auto& [rel, d] : directory_digests(out))
        if (rel != "manifest.json")
            outputs[rel] = d;
    manifest["outputs"] = outputs;
    write_file(out / "manifest.json", manifest.dump(2) + "\n");
    return store;
}

namespace {

template <typename Reader>
auto read_if_present(const std::filesystem::path& path, Reader reader) -> decltype(reader(std::declval<std::istream&>()))
{
    if (!std::filesystem::exists(path))
        return {};
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot read " + path.string());
    return reader(in);
}

IngestStats stats_from_json(const nlohmann::json& j)
{
    IngestStats s;
    s.rows_read = j.at("rows_read").get<std::uint64_t>();
    s.rows_emitted = j.at("rows_emitted").get<std::uint64_t>();
    s.rows_dropped_null_key = j.at("rows_dropped_null_key").get<std::uint64_t>();
    s.rows_dropped_bad_year = j.at("rows_dropped_bad_year").get<std::uint64_t>();
    s.rows_dropped_malformed = j.at("rows_dropped_malformed").get<std::uint64_t>();
    return s;
}

} // namespace

MetricStore load_store(const std::filesystem::path& dir)
{
    if (!std::filesystem::is_directory(dir))
        throw Error("store directory does not exist: " + dir.string());
    MetricStore store;
    store.gh = read_if_present(dir / "gh_intermediate.csv", read_gh_csv);
    store.so = read_if_present(dir / "so_intermediate.csv", read_so_csv);
    store.composites = read_if_present(dir / "composite_scores.csv", read_composite_csv);
    store.composites_diff = read_if_present(dir / "composite_scores_diff.csv", read_composite_csv);
    store.params = read_if_present(dir / "normalization_params.csv", read_params_csv);
    store.top_languages = read_if_present(dir / "top_languages.csv", read_top_languages_csv);
    if (std::filesystem::exists(dir / "profiles.json")) {
        for (const auto& p : nlohmann::json::parse(read_file(dir / "profiles.json")))
            store.profiles.push_back(table_profile_from_json(p));
    }
    if (std::filesystem::exists(dir / "drop_report.json")) {
        auto j = nlohmann::json::parse(read_file(dir / "drop_report.json"));
        for (const auto& [table, stats] : j.at("tables").items())
            store.ingest[table] = stats_from_json(stats);
        const auto& a = j.at("github_accounting");
        store.accounting.duplicate_projects = a.at("duplicate_projects").get<std::uint64_t>();
        store.accounting.unmatched_commits = a.at("unmatched_commits").get<std::uint64_t>();
        store.accounting.pull_requests_without_open = a.at("pull_requests_without_open").get<std::uint64_t>();
        store.accounting.pull_requests_unmatched_repo = a.at("pull_requests_unmatched_repo").get<std::uint64_t>();
        store.accounting.unmatched_issues = a.at("unmatched_issues").get<std::uint64_t>();
    }
    if (std::filesystem::exists(dir / "manifest.json")) {
        auto j = nlohmann::ordered_json::parse(read_file(dir / "manifest.json"));
        store.provenance.digest = j.at("digest").get<std::string>();
        store.provenance.config = j.at("config");
        store.provenance.input_digests = j.at("inputs").get<std::map<std::string, std::string>>();
    }
    return store;
}

std::optional<ExportTable> parse_export_table(std::string_view text)
{
    if (text == "profiles")
        return ExportTable::profiles;
    if (text == "gh")
        return ExportTable::gh;
    if (text == "so")
        return ExportTable::so;
    if (text == "composites")
        return ExportTable::composites;
    if (text == "all")
        return ExportTable::all;
    return std::nullopt;
}

std::optional<ExportFormat> parse_export_format(std::string_view text)
{
    if (text == "csv")
        return ExportFormat::csv;
    if (text == "jsonl")
        return ExportFormat::jsonl;
    return std::nullopt;
}

namespace {

template <typename Rows>
std::string jsonl(const Rows& rows)
{
    std::string out;
    for (const auto& r : rows) {
        out += to_json(r).dump();
        out += '\n';
    }
    return out;
}

template <typename Row, typename Parse>
std::vector<Row> read_jsonl(const std::filesystem::path& path, Parse parse)
{
    std::vector<Row> rows;
    if (!std::filesystem::exists(path))
        return rows;
    std::istringstream in(read_file(path));
    std::string line;
    while (std::getline(in, line))
        if (!line.empty())
            rows.push_back(parse(nlohmann::json::parse(line)));
    return rows;
}

} // namespace

void export_store(const MetricStore& store, ExportTable what, ExportFormat format, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw Error("cannot create export directory " + dir.string());
    auto wants = [&](ExportTable t) { return what == ExportTable::all || what == t; };
    const bool csv = format == ExportFormat::csv;
    if (wants(ExportTable::profiles)) {
        if (csv) {
            write_table(dir / "profiles.csv", write_profiles_csv, store.profiles);
        } else {
            std::string out;
            for (const auto& p : store.profiles)
                out += to_json(p).dump() + "\n";
            write_file(dir / "profiles.jsonl", out);
        }
    }
    if (wants(ExportTable::gh)) {
        if (csv)
            write_table(dir / "gh_intermediate.csv", write_gh_csv, store.gh);
        else
            write_file(dir / "gh_intermediate.jsonl", jsonl(store.gh));
    }
    if (wants(ExportTable::so)) {
        if (csv)
            write_table(dir / "so_intermediate.csv", write_so_csv, store.so);
        else
            write_file(dir / "so_intermediate.jsonl", jsonl(store.so));
    }
    if (wants(ExportTable::composites)) {
        if (csv) {
            write_table(dir / "composite_scores.csv", write_composite_csv, store.composites);
            write_table(dir / "composite_scores_diff.csv", write_composite_csv, store.composites_diff);
        } else {
            write_file(dir / "composite_scores.jsonl", jsonl(store.composites));
            write_file(dir / "composite_scores_diff.jsonl", jsonl(store.composites_diff));
        }
    }
}

MetricStore import_store(const std::filesystem::path& dir, ExportFormat format)
{
    MetricStore store;
    if (format == ExportFormat::csv) {
        store.profiles = read_if_present(dir / "profiles.csv", read_profiles_csv);
        store.gh = read_if_present(dir / "gh_intermediate.csv", read_gh_csv);
        store.so = read_if_present(dir / "so_intermediate.csv", read_so_csv);
        store.composites = read_if_present(dir / "composite_scores.csv", read_composite_csv);
        store.composites_diff = read_if_present(dir / "composite_scores_diff.csv", read_composite_csv);
        return store;
    }
    store.profiles = read_jsonl<TableProfile>(dir / "profiles.jsonl", table_profile_from_json);
    store.gh = read_jsonl<GhIntermediate>(dir / "gh_intermediate.jsonl", gh_from_json);
    store.so = read_jsonl<SoIntermediate>(dir / "so_intermediate.jsonl", so_from_json);
    store.composites = read_jsonl<CompositeScores>(dir / "composite_scores.jsonl", composite_from_json);
    store.composites_diff = read_jsonl<CompositeScores>(dir / "composite_scores_diff.jsonl", composite_from_json);
    return store;
}

void write_drop_report_text(std::ostream& out, const MetricStore& store)
{
    out << "table                  read   emitted  null_key  bad_year  malformed\n";
    for (const auto& [table, s] : store.ingest) {
        char line[160];
        std::snprintf(line, sizeof line, "%-20s %6llu %9llu %9llu %9llu %10llu\n", table.c_str(),
                      static_cast<unsigned long long>(s.rows_read), static_cast<unsigned long long>(s.rows_emitted),
                      static_cast<unsigned long long>(s.rows_dropped_null_key),
                      static_cast<unsigned long long>(s.rows_dropped_bad_year),
                      static_cast<unsigned long long>(s.rows_dropped_malformed));
        out << line;
    }
    const auto& a = store.accounting;
    out << "\nexcluded from github metrics\n"
        << "  duplicate project ids:          " << a.duplicate_projects << '\n'
        << "  commits to unknown projects:    " << a.unmatched_commits << '\n'
        << "  pull requests never opened:     " << a.pull_requests_without_open << '\n'
        << "  pull requests on unknown repos: " << a.pull_requests_unmatched_repo << '\n'
        << "  issues on unknown repos:        " << a.unmatched_issues << '\n';
}

nlohmann::ordered_json drop_report_json(const MetricStore& store)
{
    nlohmann::ordered_json j;
    auto& tables = j["tables"] = nlohmann::ordered_json::object();
    for (const auto& [table, s] : store.ingest) {
        tables[table] = {{"rows_read", s.rows_read},
                         {"rows_emitted", s.rows_emitted},
                         {"rows_dropped_null_key", s.rows_dropped_null_key},
                         {"rows_dropped_bad_year", s.rows_dropped_bad_year},
                         {"rows_dropped_malformed", s.rows_dropped_malformed}};
    }
    const auto& a = store.accounting;
    j["github_accounting"] = {{"duplicate_projects", a.duplicate_projects},
                              {"unmatched_commits", a.unmatched_commits},
                              {"pull_requests_without_open", a.pull_requests_without_open},
                              {"pull_requests_unmatched_repo", a.pull_requests_unmatched_repo},
                              {"unmatched_issues", a.unmatched_issues}};
    return j;
}

std::map<std::string, std::string> directory_digests(const std::filesystem::path& dir)
{
    std::map<std::string, std::string> out;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file())
            out[std::filesystem::relative(entry.path(), dir).generic_string()] = file_digest(entry.path());
    }
    return out;
}

} // namespace langpulse
