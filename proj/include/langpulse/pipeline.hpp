#pragma once

#include "langpulse/composite.hpp"
#include "langpulse/gh_metrics.hpp"
#include "langpulse/io.hpp"
#include "langpulse/profiler.hpp"
#include "langpulse/schema.hpp"
#include "langpulse/so_metrics.hpp"
#include "langpulse/transform.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace langpulse {

struct PipelineConfig {
    std::filesystem::path input_dir;
    std::filesystem::path output_dir;
    std::size_t top_k = 50;
    double weight_w = 0.5;
    YearRange year_range;
    SeriesMode mode = SeriesMode::level;
    std::optional<std::filesystem::path> alias_file;
    std::optional<std::filesystem::path> profile_file;
    Exactness exactness = Exactness::exact;
    CsvDialect dialect;

    /// Throws Error when top_k is zero, the weight leaves [0, 1] or the year range is inverted.
    void validate() const;
};

/// The last stage a run executes; each stage includes everything before it.
enum class Stage { clean, profile, compute_gh, compute_so, combine };

struct Provenance {
    /// Path-free configuration snapshot.
    nlohmann::ordered_json config;
    /// file name -> SHA-256 of the bytes read.
    std::map<std::string, std::string> input_digests;
    /// SHA-256 over the config snapshot and every input digest.
    std::string digest;
};

/// Immutable snapshot of a finished run.
struct MetricStore {
    std::vector<TableProfile> profiles;
    std::vector<GhIntermediate> gh;
    std::vector<SoIntermediate> so;
    std::vector<CompositeScores> composites;
    std::vector<CompositeScores> composites_diff;
    std::vector<NormalizationParams> params;
    std::vector<RankedCount> top_languages;
    std::map<std::string, IngestStats> ingest;
    GhAccounting accounting;
    Provenance provenance;

    const TableProfile* profile(const std::string& table) const;
    const std::vector<CompositeScores>& scores(SeriesMode mode) const
    {
        return mode == SeriesMode::level ? composites : composites_diff;
    }
};

std::string sha256_hex(std::string_view bytes);

/// Runs every stage up to `last`, writes the artifacts into cfg.output_dir and
/// returns the full-precision store. Files hold rounded reals; load_store reads those.
MetricStore run_pipeline(const PipelineConfig& cfg, Stage last = Stage::combine);

/// Reads whatever artifacts exist in a pipeline output directory.
MetricStore load_store(const std::filesystem::path& dir);

enum class ExportTable { profiles, gh, so, composites, all };
enum class ExportFormat { csv, jsonl };

std::optional<ExportTable> parse_export_table(std::string_view text);
std::optional<ExportFormat> parse_export_format(std::string_view text);

/// Writes the selected tables with fixed column order and sorting.
void export_store(const MetricStore& store, ExportTable what, ExportFormat format, const std::filesystem::path& dir);

/// Reads tables written by export_store back into a store.
MetricStore import_store(const std::filesystem::path& dir, ExportFormat format);

/// Per-table drop counters and GitHub join accounting.
void write_drop_report_text(std::ostream& out, const MetricStore& store);
nlohmann::ordered_json drop_report_json(const MetricStore& store);

/// Digest of every regular file under `dir`, keyed by relative path.
std::map<std::string, std::string> directory_digests(const std::filesystem::path& dir);

} // namespace langpulse
