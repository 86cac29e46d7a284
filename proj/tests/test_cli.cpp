#include "langpulse/service.hpp"

#include "cli_run.hpp"
#include "golden.hpp"

#include <doctest.h>

using namespace langpulse;
namespace fs = std::filesystem;

namespace {

const fs::path& store_dir()
{
    static fs::path dir = [] {
        auto d = golden::scratch("cli");
        auto r = run_cli("combine --input-dir \"" + golden::input().string() + "\" --output-dir \"" + d.string() +
                         "\" --top-k 4");
        REQUIRE(r.status == 0);
        return d;
    }();
    return dir;
}

std::string store_arg()
{
    return " --output-dir \"" + store_dir().string() + "\"";
}

} // namespace

TEST_CASE("combine reports drops and writes the store")
{
    auto dir = golden::scratch("cli-combine");
    auto r = run_cli("combine --input-dir \"" + golden::input().string() + "\" --output-dir \"" + dir.string() +
                     "\" --top-k 4");
    CHECK(r.status == 0);
    CHECK(r.out.find("rows_read") == std::string::npos);
    CHECK(r.out.find("malformed") != std::string::npos);
    CHECK(r.out.find("digest: ") != std::string::npos);
    for (const char* name : golden::artifacts)
        CHECK(read_file(dir / name) == read_file(golden::expected(name)));
}

TEST_CASE("usage errors exit nonzero")
{
    CHECK(run_cli("recommend --goal play" + store_arg()).status != 0);
    CHECK(run_cli("recommend --goal learn --horizon soon" + store_arg()).status != 0);
    CHECK(run_cli("recommend --goal learn --top-n 0" + store_arg()).status != 0);
    CHECK(run_cli("recommend" + store_arg()).status != 0);
    CHECK(run_cli("combine --output-dir /tmp/x").status != 0);
    CHECK(run_cli("combine --input-dir /nonexistent/langpulse --output-dir /tmp/x").status != 0);
    CHECK(run_cli("combine --input-dir \"" + golden::input().string() + "\" --weight 2").status != 0);
    CHECK(run_cli("").status != 0);
}

TEST_CASE("an empty store says no data")
{
    auto empty = golden::scratch("cli-empty");
    auto r = run_cli("recommend --goal learn --output-dir \"" + empty.string() + "\"");
    CHECK(r.status == 3);
    CHECK(r.out.find("no data") != std::string::npos);
}

TEST_CASE("top-n beyond the language count returns every language")
{
    auto r = run_cli("recommend --goal learn --top-n 50" + store_arg());
    CHECK(r.status == 0);
    std::size_t lines = 0;
    for (char c : r.out)
        lines += c == '\n';
    CHECK(lines == 5);
    auto three = run_cli("recommend --goal build --top-n 3" + store_arg());
    CHECK(three.out.find("1    python") != std::string::npos);
    CHECK(three.out.find("4    ") == std::string::npos);
}

TEST_CASE("recommend output is byte-identical across runs and matches the API")
{
    auto json = golden::scratch("cli-json") / "rec.json";
    auto a = run_cli("recommend --goal learn --horizon medium --json-out \"" + json.string() + "\"" + store_arg());
    auto b = run_cli("recommend --goal learn --horizon medium" + store_arg());
    CHECK(a.status == 0);
    CHECK(a.out == b.out);

    auto store = std::make_shared<const MetricStore>(load_store(store_dir()));
    Service svc(store, WeightProfile::defaults());
    auto api = svc.recommend(R"({"goal":"learn","horizon":"medium"})");
    CHECK(nlohmann::json::parse(read_file(json)) == nlohmann::json::parse(api.body.dump()));
}

TEST_CASE("category filters come from a file")
{
    auto file = golden::scratch("cli-cat") / "categories.txt";
    write_file(file, "systems=Go,golang\n");
    auto r = run_cli("recommend --goal build --category systems --category-file \"" + file.string() + "\"" +
                     store_arg());
    CHECK(r.status == 0);
    CHECK(r.out.find("go") != std::string::npos);
    CHECK(r.out.find("python") == std::string::npos);
    CHECK(run_cli("recommend --goal build --category mobile --category-file \"" + file.string() + "\"" + store_arg())
              .status != 0);
}

TEST_CASE("export writes the selected tables")
{
    auto dir = golden::scratch("cli-export");
    CHECK(run_cli("export --what composites --format jsonl --export-dir \"" + dir.string() + "\"" + store_arg())
              .status == 0);
    CHECK(fs::exists(dir / "composite_scores.jsonl"));
    CHECK(fs::exists(dir / "composite_scores_diff.jsonl"));
    CHECK_FALSE(fs::exists(dir / "gh_intermediate.jsonl"));
    CHECK(run_cli("export --what answers --export-dir \"" + dir.string() + "\"" + store_arg()).status != 0);
}
