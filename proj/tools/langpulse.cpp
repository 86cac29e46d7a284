// langpulse: language community metrics and recommendations from GitHub and StackOverflow dumps.

#include "langpulse/pipeline.hpp"
#include "langpulse/service.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <fstream>
#include <iostream>

using namespace langpulse;

namespace {

struct PipelineFlags {
    std::string input_dir = ".";
    std::string output_dir = "out";
    std::size_t top_k = 50;
    double weight = 0.5;
    std::string mode = "level";
    int min_year = 2005;
    int max_year = 2020;
    std::string alias_file;
    std::string profile_file;
    std::string delimiter = "comma";
    bool approximate = false;

    PipelineConfig config() const
    {
        PipelineConfig cfg;
        cfg.input_dir = input_dir;
        cfg.output_dir = output_dir;
        cfg.top_k = top_k;
        cfg.weight_w = weight;
        cfg.mode = mode == "diff" ? SeriesMode::differenced : SeriesMode::level;
        cfg.year_range = {min_year, max_year};
        if (!alias_file.empty())
            cfg.alias_file = alias_file;
        if (!profile_file.empty())
            cfg.profile_file = profile_file;
        cfg.dialect.delimiter = delimiter == "tab" ? '\t' : ',';
        cfg.exactness = approximate ? Exactness::approximate : Exactness::exact;
        return cfg;
    }
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f)
{
    cmd->add_option("--input-dir", f.input_dir, "Directory holding the dump tables")->required();
    cmd->add_option("--output-dir", f.output_dir, "Directory for the metric store")->capture_default_str();
    cmd->add_option("--top-k", f.top_k, "Languages kept, ranked by GitHub project count")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--weight", f.weight, "GitHub weight w in w*GH + (1-w)*SO")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--mode", f.mode, "Series mode recorded in the store")
        ->capture_default_str()
        ->check(CLI::IsMember({"level", "diff"}));
    cmd->add_option("--min-year", f.min_year, "First valid year")->capture_default_str();
    cmd->add_option("--max-year", f.max_year, "Last valid year")->capture_default_str();
    cmd->add_option("--alias-file", f.alias_file, "Extra raw=canonical language aliases")->check(CLI::ExistingFile);
    cmd->add_option("--profile-file", f.profile_file, "Goal weight profiles")->check(CLI::ExistingFile);
    cmd->add_option("--delimiter", f.delimiter, "Input field delimiter")
        ->capture_default_str()
        ->check(CLI::IsMember({"comma", "tab"}));
    cmd->add_flag("--approximate", f.approximate, "Estimate distinct counts with a HyperLogLog sketch");
}

void print_summary(const MetricStore& store, std::ostream& out)
{
    write_drop_report_text(out, store);
    out << "\nlanguages kept: " << store.top_languages.size() << ", gh rows: " << store.gh.size()
        << ", so rows: " << store.so.size() << ", composite rows: " << store.composites.size()
        << "\ndigest: " << store.provenance.digest << '\n';
}

WeightProfile load_profile(const std::string& path)
{
    return path.empty() ? WeightProfile::defaults() : WeightProfile::load(path);
}

CategoryMap load_categories(const std::string& path)
{
    return path.empty() ? CategoryMap{} : load_category_map(path, LanguageAliasMap::defaults());
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"langpulse: programming language community metrics and recommendations"};
    app.require_subcommand(1);

    PipelineFlags flags;
    struct StageCommand {
        const char* name;
        const char* help;
        Stage stage;
    };
    const StageCommand stages[] = {
        {"clean", "Clean every table and write the drop report", Stage::clean},
        {"profile", "Profile every cleaned column", Stage::profile},
        {"compute-gh", "Compute the GitHub intermediate metrics", Stage::compute_gh},
        {"compute-so", "Compute the StackOverflow intermediate metrics", Stage::compute_so},
        {"combine", "Run the whole pipeline: composites and combined scores", Stage::combine},
    };
    std::map<CLI::App*, Stage> stage_of;
    for (const auto& s : stages) {
        auto* cmd = app.add_subcommand(s.name, s.help);
        add_pipeline_flags(cmd, flags);
        stage_of[cmd] = s.stage;
    }

    std::string store_dir = "out";
    std::string goal, horizon = "short", category, category_file, profile_file, json_out, mode = "level";
    long long top_n = 10;
    auto* rec = app.add_subcommand("recommend", "Rank languages for a goal and time horizon");
    rec->add_option("--output-dir", store_dir, "Metric store directory")->capture_default_str();
    rec->add_option("--goal", goal, "learn or build")->required()->check(CLI::IsMember({"learn", "build"}));
    rec->add_option("--horizon", horizon, "short, medium or long")
        ->capture_default_str()
        ->check(CLI::IsMember({"short", "medium", "long"}));
    rec->add_option("--top-n", top_n, "Number of languages")->capture_default_str()->check(CLI::PositiveNumber);
    rec->add_option("--category", category, "Category name from --category-file");
    rec->add_option("--category-file", category_file, "category=lang1,lang2 lines")->check(CLI::ExistingFile);
    rec->add_option("--profile-file", profile_file, "Goal weight profiles")->check(CLI::ExistingFile);
    rec->add_option("--mode", mode, "Score level or differenced composites")
        ->capture_default_str()
        ->check(CLI::IsMember({"level", "diff"}));
    rec->add_option("--json-out", json_out, "Also write the ranking as JSON");

    std::string what = "all", format = "csv", export_dir;
    auto* exp = app.add_subcommand("export", "Write store tables as CSV or JSON lines");
    exp->add_option("--output-dir", store_dir, "Metric store directory")->capture_default_str();
    exp->add_option("--what", what, "profiles, gh, so, composites or all")
        ->capture_default_str()
        ->check(CLI::IsMember({"profiles", "gh", "so", "composites", "all"}));
    exp->add_option("--format", format, "csv or jsonl")->capture_default_str()->check(CLI::IsMember({"csv", "jsonl"}));
    exp->add_option("--export-dir", export_dir, "Destination directory")->required();

    std::string bind = "127.0.0.1:8080";
    auto* srv = app.add_subcommand("serve", "Serve the HTTP API over a metric store");
    srv->add_option("--output-dir", store_dir, "Metric store directory")->capture_default_str();
    srv->add_option("--bind", bind, "host:port")->capture_default_str();
    srv->add_option("--category-file", category_file, "category=lang1,lang2 lines")->check(CLI::ExistingFile);
    srv->add_option("--profile-file", profile_file, "Goal weight profiles")->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        for (auto* cmd : app.get_subcommands()) {
            if (auto it = stage_of.find(cmd); it != stage_of.end()) {
                auto store = run_pipeline(flags.config(), it->second);
                print_summary(store, std::cout);
                return 0;
            }
        }

        if (rec->parsed()) {
            auto store = load_store(store_dir);
            auto query = make_query(goal, horizon, category.empty() ? std::nullopt : std::optional(category), top_n,
                                    load_categories(category_file));
            auto result = recommend(store, query, load_profile(profile_file),
                                    mode == "diff" ? SeriesMode::differenced : SeriesMode::level);
            write_recommendation_text(std::cout, result);
            if (!json_out.empty())
                write_file(json_out, to_json(result).dump(2) + "\n");
            return result.has_data ? 0 : 3;
        }

        if (exp->parsed()) {
            auto store = load_store(store_dir);
            export_store(store, *parse_export_table(what), *parse_export_format(format), export_dir);
            return 0;
        }

        if (srv->parsed()) {
            auto colon = bind.rfind(':');
            if (colon == std::string::npos)
                throw Error("--bind expects host:port");
            auto host = bind.substr(0, colon);
            int port = std::stoi(bind.substr(colon + 1));
            auto store = std::make_shared<const MetricStore>(load_store(store_dir));
            Service service(store, load_profile(profile_file), load_categories(category_file), store_dir);
            httplib::Server server;
            service.mount(server);
            if (!server.bind_to_port(host, port)) {
                std::cerr << "error: cannot bind " << bind << '\n';
                return 1;
            }
            std::cerr << "serving " << store_dir << " on http://" << bind << '\n';
            server.listen_after_bind();
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
