#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tabaudit/battery.hpp"
#include "tabaudit/transcript_cache.hpp"

namespace tabaudit::audit {

inline constexpr int kReportSchemaVersion = 1;

std::string_view tool_version();

/// Test names in report order: knowledge, learning, memorization, then the
/// outcome measures.
const std::vector<std::string>& all_tests();
bool is_known_test(std::string_view name);

struct AdapterSpec {
    enum class Kind { Http, Simulator, Replay };
    Kind kind = Kind::Simulator;
    std::string target;  // base URL, simulator name or replay cache path
    std::optional<std::uint64_t> seed;  // simulator seed, "sim:NAME:SEED"

    /// "http:URL", "sim:NAME[:SEED]" or "replay:PATH"; throws ConfigError.
    static AdapterSpec parse(std::string_view text);
    [[nodiscard]] std::string to_string() const;
};

/// Flat key = value settings, as read from a config file or flags. Keys of
/// per-test sections are prefixed "test.NAME.".
using Settings = std::map<std::string, std::string>;

/// TOML subset: [section] headers, key = value with strings, numbers,
/// booleans and one-line arrays, and # comments. Arrays are stored joined
/// with newlines. Throws ConfigError with the offending line.
Settings parse_config_text(std::string_view text);
Settings load_config_file(const std::filesystem::path& path);

struct AuditConfig {
    std::vector<std::filesystem::path> datasets;
    std::optional<AdapterSpec> adapter;
    std::vector<std::string> tests;  // empty means all
    battery::TestConfig test;
    std::map<std::string, Settings> per_test;  // raw overrides applied on top of `test`
    std::filesystem::path out_dir = "tabaudit-out";
    llm::CacheMode cache = llm::CacheMode::Record;
    std::optional<std::filesystem::path> cache_file;  // defaults to out_dir/transcripts.jsonl
    std::optional<std::size_t> budget;                // distinct adapter requests per run
    std::optional<std::filesystem::path> pool;
    std::string model;  // model name sent to an http endpoint

    /// Throws ConfigError unless exactly one adapter and at least one
    /// dataset are set, tests are known and the test config is valid.
    void validate() const;
    [[nodiscard]] std::vector<std::string> selected_tests() const;
    [[nodiscard]] battery::TestConfig config_for(const std::string& test) const;
    [[nodiscard]] std::filesystem::path cache_path() const;
};

/// Later settings override earlier ones: apply the file first, then flags.
void apply_settings(AuditConfig& cfg, const Settings& settings);

struct DatasetFingerprint {
    std::size_t rows = 0;
    std::size_t features = 0;
    std::string sha256;  // of the canonical file text
};

DatasetFingerprint fingerprint(const TabularDataset& dataset);

struct DatasetReport {
    std::string name;
    std::string path;
    DatasetFingerprint fingerprint;
    std::string model;  // adapter identity used for this dataset
    std::vector<battery::TestResult> results;
    std::optional<battery::ProvenanceRecord> provenance;
    std::size_t queries = 0;  // distinct request digests
};

struct RunAccounting {
    std::string started_at;
    std::string finished_at;
    double wall_seconds = 0.0;
    std::size_t adapter_invocations = 0;  // requests that reached the model
    std::size_t cache_hits = 0;
    std::map<std::string, double> test_seconds;  // summed over datasets
};

struct AuditReport {
    std::string tool_version;
    int schema_version = kReportSchemaVersion;
    std::string adapter;
    std::string cache_mode;
    std::uint64_t seed = 0;
    std::vector<std::string> tests;
    std::vector<DatasetReport> datasets;
    std::size_t queries = 0;  // distinct request digests across the run
    RunAccounting run;

    [[nodiscard]] bool all_errored() const;
};

nlohmann::json to_json(const AuditReport& r);
AuditReport report_from_json(const nlohmann::json& j);
/// report.json content without the run section, for replay comparisons.
nlohmann::json deterministic_part(const AuditReport& r);

/// One row per dataset, one column per test; cells PASS / FAIL / AMBIG / N-A
/// / ERR, outcome measures show their headline; footnotes hold the headline
/// statistic of every cell.
std::string render_matrix(const AuditReport& report);
/// Full markdown report: the matrix followed by per-test statistics.
std::string render_report(const AuditReport& report);

/// Runs every selected test on every dataset; tests that fail are recorded
/// as errored and the run continues. Writes report.json and report.md into
/// the output directory.
AuditReport run_audit(const AuditConfig& config);

/// As run_audit on already-loaded data with a caller-provided adapter;
/// nothing is written.
DatasetReport audit_dataset(llm::ModelAdapter& adapter, const TabularDataset& dataset,
                            const prompt::FewShotPool& pool, const AuditConfig& config,
                            std::map<std::string, double>* test_seconds = nullptr);

/// Model adapter for one dataset as described by the config's adapter spec.
/// A replay adapter answers nothing itself; every request must hit the cache.
std::unique_ptr<llm::ModelAdapter> make_adapter(const AuditConfig& config,
                                                std::shared_ptr<const TabularDataset> dataset);

/// Zero-knowledge samples parsed into the dataset's columns, as CSV with a
/// header line; features a sample lacks are left empty.
std::string sample_csv(llm::ModelAdapter& adapter, const TabularDataset& dataset, const prompt::FewShotPool& pool,
                       std::size_t n, double temperature, const battery::TestConfig& cfg);

void write_report(const AuditReport& report, const std::filesystem::path& out_dir);

// --- cache tool -------------------------------------------------------------

struct ModelSummary {
    std::size_t transcripts = 0;
    std::string first_timestamp;
    std::string last_timestamp;
};

struct CacheSummary {
    std::size_t transcripts = 0;
    std::map<std::string, ModelSummary> models;
};

struct CacheMismatch {
    std::size_t line = 0;
    std::string reason;
};

/// Throws CorruptCache on the first bad line.
CacheSummary inspect_cache(const std::filesystem::path& path);
/// Checks every line; never throws for content problems.
std::vector<CacheMismatch> verify_cache(const std::filesystem::path& path);
/// Writes the union of the inputs to `out`, first occurrence of a digest
/// wins. Returns the number of transcripts written.
std::size_t merge_caches(const std::vector<std::filesystem::path>& inputs, const std::filesystem::path& out);

std::string render_summary(const CacheSummary& s);

}  // namespace tabaudit::audit
