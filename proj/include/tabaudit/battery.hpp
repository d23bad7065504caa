#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tabaudit/chat.hpp"
#include "tabaudit/dataset.hpp"
#include "tabaudit/prompt.hpp"
#include "tabaudit/stats.hpp"

namespace tabaudit::battery {

enum class Verdict { Evidence, AbsenceOfEvidence, Ambiguous, NotApplicable };

std::string_view to_string(Verdict v);
Verdict verdict_from_string(std::string_view text);

struct TestConfig {
    std::size_t trials = 250;
    double memorization_temperature = 0.0;
    double zk_temperature = 0.7;
    double distribution_temperature = 0.2;
    std::uint64_t seed = 0;
    std::size_t parallelism = 4;
    std::size_t window = prompt::kDefaultRowWindow;
    std::size_t feature_value_samples = 25;
    std::size_t distribution_samples = 100;
    std::size_t correlation_samples = 1000;
    std::size_t provenance_samples = 1000;
    std::size_t completion_shots = prompt::kFeatureCompletionShots;
    std::size_t prediction_shots = prompt::kPredictionShots;
    std::optional<std::string> prediction_target;  // defaults to the last feature
    prompt::PredictionPersona persona;

    /// Throws ConfigError on trials == 0, negative temperatures, etc.
    void validate() const;
};

struct TestResult {
    std::string name;
    std::size_t n_queries = 0;
    std::map<std::string, double> statistics;
    std::optional<Verdict> verdict;   // absent for outcome measures and errors
    std::optional<std::string> error; // set when the test could not complete
    std::string headline;             // short statistic for the matrix, e.g. "222/250"
    std::string rule;                 // decision rule the verdict came from
    std::vector<std::string> digests; // request digests, in query order
    nlohmann::json details = nlohmann::json::object();

    [[nodiscard]] bool errored() const noexcept { return error.has_value(); }
};

nlohmann::json to_json(const TestResult& r);
TestResult test_result_from_json(const nlohmann::json& j);

// --- shared plumbing --------------------------------------------------------

struct QueryBatch {
    std::vector<std::string> responses;
    std::vector<std::string> digests;
};

QueryBatch run_queries(llm::ModelAdapter& adapter, const std::vector<llm::ChatRequest>& requests,
                       const TestConfig& cfg);

/// Per-trial seed: hash of (cfg.seed, stream, index).
Rng trial_rng(const TestConfig& cfg, std::string_view stream, std::uint64_t index);

/// Zero-knowledge sample requests. Sample i at a given temperature always
/// carries the same nonce, so tests drawing samples at the same temperature
/// share them through the cache.
std::vector<llm::ChatRequest> zk_sample_requests(const TabularDataset& dataset, const prompt::FewShotPool& pool,
                                                 double temperature, std::size_t n, const TestConfig& cfg);

/// Canonical values keyed by feature position; missing features stay empty.
using ParsedSample = std::vector<std::optional<std::string>>;
ParsedSample parse_sample(const TabularDataset& dataset, std::string_view response);
std::size_t present_count(const ParsedSample& s);
/// At least half of the features were recovered.
bool parseable(const ParsedSample& s);

/// First non-empty line of a response, without trailing CR.
std::string first_line(std::string_view response);

// --- verdict rules (pure, exposed for property tests) -----------------------

Verdict feature_names_verdict(std::size_t matched, std::size_t expected, bool exact);
Verdict feature_values_verdict(double validity);
Verdict feature_distribution_verdict(double agreement);
Verdict conditional_distribution_verdict(double sign_agreement);
/// Each entry holds (p model > baseline, p baseline > model) for one feature.
Verdict conditional_completion_verdict(const std::vector<std::pair<double, double>>& p_values);
Verdict header_verdict(double best_lines);
Verdict row_completion_verdict(double exact_rate, double duplicate_baseline, double similarity_p);
Verdict feature_completion_verdict(double exact_rate);
Verdict first_token_verdict(double accuracy, double baseline, double binomial_p);

/// Header-test score of one response: 0.5 for finishing the cut line, plus
/// one per consecutive byte-exact following line.
double header_score(std::string_view response, std::string_view continuation);

/// Smallest prefix length whose most common value covers at most 90% of rows.
std::optional<std::size_t> first_token_length(const std::vector<std::string>& lines);

// --- tests --------------------------------------------------------------------

TestResult test_feature_names(llm::ModelAdapter& adapter, const TabularDataset& dataset,
                              const prompt::FewShotPool& pool, const TestConfig& cfg);
TestResult test_feature_values(llm::ModelAdapter& adapter, const TabularDataset& dataset,
                               const prompt::FewShotPool& pool, const TestConfig& cfg);
/// `feature_values` gates the test; when absent the gate is computed from
/// the test's own samples.
TestResult test_feature_distribution(llm::ModelAdapter& adapter, const TabularDataset& dataset,
                                     const prompt::FewShotPool& pool, const TestConfig& cfg,
                                     const TestResult* feature_values = nullptr);
TestResult test_conditional_distribution(llm::ModelAdapter& adapter, const TabularDataset& dataset,
                                         const prompt::FewShotPool& pool, const TestConfig& cfg);

struct FeatureMeanTest {
    std::string feature;
    double sample_mean = 0.0;
    double dataset_mean = 0.0;
    std::optional<stats::TTestResult> test;
    std::optional<std::string> error;
};

/// Welch two-sided test per numeric feature between sample and dataset values.
/// Throws InsufficientParseable with fewer than 30 parseable samples.
std::vector<FeatureMeanTest> test_sample_means(const TabularDataset& dataset, const std::vector<ParsedSample>& samples);

TestResult test_conditional_completion(llm::ModelAdapter& adapter, const TabularDataset& dataset,
                                       const prompt::FewShotPool& pool, const TestConfig& cfg);
TestResult test_header(llm::ModelAdapter& adapter, const TabularDataset& dataset, const prompt::FewShotPool& pool,
                       const TestConfig& cfg);
TestResult test_row_completion(llm::ModelAdapter& adapter, const TabularDataset& dataset,
                               const prompt::FewShotPool& pool, const TestConfig& cfg);
TestResult test_feature_completion(llm::ModelAdapter& adapter, const TabularDataset& dataset, const TestConfig& cfg);
TestResult test_first_token(llm::ModelAdapter& adapter, const TabularDataset& dataset, const prompt::FewShotPool& pool,
                            const TestConfig& cfg);
TestResult test_prediction(llm::ModelAdapter& adapter, const TabularDataset& dataset, std::size_t target,
                           const TestConfig& cfg);

struct ProvenanceRecord {
    std::optional<stats::ProvenanceStats> samples;
    double dataset_self_match = 0.0;  // mean best match of dataset rows among the other rows
    std::size_t reference_rows = 0;   // rows the self-match was averaged over
    std::size_t parseable_samples = 0;
    std::size_t n_queries = 0;
    std::vector<std::string> digests;
    std::optional<std::string> skipped;  // reason when not computed
};

nlohmann::json to_json(const ProvenanceRecord& r);
ProvenanceRecord provenance_from_json(const nlohmann::json& j);

ProvenanceRecord run_provenance(llm::ModelAdapter& adapter, const TabularDataset& dataset,
                                const prompt::FewShotPool& pool, const TestConfig& cfg);

/// Mean best match of rows against all other rows, over at most
/// `max_rows` rows chosen with `rng` (all rows when the dataset is smaller).
double self_match_statistic(const TabularDataset& dataset, std::size_t max_rows, Rng& rng,
                            std::size_t* rows_used = nullptr);

}  // namespace tabaudit::battery
