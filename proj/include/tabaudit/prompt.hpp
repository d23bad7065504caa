#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tabaudit/chat.hpp"
#include "tabaudit/dataset.hpp"

namespace tabaudit::prompt {

enum class PromptKind {
    FeatureNames,
    ZkSample,
    ConditionalCompletion,
    Header,
    RowCompletion,
    FeatureCompletion,
    Prediction,
};

std::string_view to_string(PromptKind kind);

/// System message for each prompt kind except prediction, which is templated.
const std::string& system_message(PromptKind kind);

enum class ExpectedKind { FeatureNames, FvCompletion, FvSample, CsvContinuation, SingleFeature, FirstToken, ClassLabel };

std::string_view to_string(ExpectedKind kind);

struct PromptBundle {
    PromptKind kind = PromptKind::FeatureNames;
    llm::ChatRequest request;
    ExpectedKind expected_kind = ExpectedKind::FeatureNames;
    std::optional<std::string> ground_truth;
};

// --- few-shot pool --------------------------------------------------------

struct PoolEntry {
    std::string name;
    std::vector<std::string> aliases;
    TabularDataset data;            // short excerpt of the file, header first
    std::string sample;             // one full Feature = Value observation
    std::string completion_given;   // leading Feature = Value pairs
    std::string completion_rest;    // the remaining pairs
    std::size_t header_row = 0;     // data row the header example is cut in
    std::size_t header_cut = 0;     // bytes of that row kept before the cut
};

/// Datasets used for zero-knowledge few-shot examples. When the audited
/// dataset is itself a pool member (by name, alias or identical header) that
/// member is replaced by the substitute, in place.
class FewShotPool {
public:
    FewShotPool(std::vector<PoolEntry> entries, PoolEntry substitute);

    static FewShotPool from_json(const nlohmann::json& j);
    static FewShotPool load(const std::filesystem::path& path);

    [[nodiscard]] const std::vector<PoolEntry>& entries() const noexcept { return entries_; }
    [[nodiscard]] const PoolEntry& substitute() const noexcept { return substitute_; }

    [[nodiscard]] bool matches(const PoolEntry& entry, const TabularDataset& audited) const;
    [[nodiscard]] std::vector<const PoolEntry*> examples_for(const TabularDataset& audited) const;

private:
    std::vector<PoolEntry> entries_;
    PoolEntry substitute_;
};

const FewShotPool& default_pool();
/// JSON text the default pool is built from.
const char* default_pool_json();

// --- builders ---------------------------------------------------------------

inline constexpr std::size_t kDefaultRowWindow = 15;
inline constexpr std::size_t kHeaderExampleLines = 10;
inline constexpr std::size_t kFeatureCompletionShots = 5;
inline constexpr std::size_t kPredictionShots = 20;
inline constexpr std::size_t kMaxPredictionClasses = 10;

PromptBundle build_feature_names(const TabularDataset& dataset, const FewShotPool& pool);

PromptBundle build_zk_sample(const TabularDataset& dataset, const FewShotPool& pool, double temperature);

/// Throws std::invalid_argument unless 1 <= prefix_len < feature count.
PromptBundle build_conditional_completion(const TabularDataset& dataset, std::size_t row, std::size_t prefix_len,
                                          const FewShotPool& pool, double temperature = 0.0);

PromptBundle build_header(const TabularDataset& dataset, const HeaderSplit& split, const FewShotPool& pool);

/// Throws RowOutOfRange unless start + window < row count.
PromptBundle build_row_completion(const TabularDataset& dataset, std::size_t start, std::size_t window,
                                  const FewShotPool& pool);

/// Few-shot pairs are other rows of the audited dataset.
PromptBundle build_feature_completion(const TabularDataset& dataset, std::size_t row, std::size_t target,
                                      std::span<const std::size_t> shot_rows);
PromptBundle build_feature_completion(const TabularDataset& dataset, std::size_t row, std::size_t target,
                                      const FewShotPool& pool, Rng& rng,
                                      std::size_t shots = kFeatureCompletionShots);

/// Rows drawn uniformly without replacement from [0, row count) minus `exclude`.
std::vector<std::size_t> draw_rows(std::size_t row_count, std::size_t n, std::size_t exclude, Rng& rng);

struct PredictionPersona {
    std::string persona = "You are a helpful statistician and data scientist.";
    std::string dataset_label;  // defaults to the dataset name
    std::string task;           // defaults to "Your task is to predict the value of <target>."
    // Ordered (label, "your assessment is that ...") clauses; defaults to
    // every observed label in sorted order with "<target> is <label>".
    std::vector<std::pair<std::string, std::string>> labels;
};

/// Labels of a prediction target; throws TargetNotCategorical when the
/// feature is free text or has more than kMaxPredictionClasses values.
std::vector<std::string> class_labels(const TabularDataset& dataset, std::size_t target);

std::string prediction_system_message(const TabularDataset& dataset, std::size_t target,
                                      const PredictionPersona& persona);

/// "IF a = 1, b = 2, THEN" over every feature except the target.
std::string prediction_query(const TabularDataset& dataset, const Row& row, std::size_t target);

PromptBundle build_prediction(const TabularDataset& dataset, std::size_t target, std::span<const std::size_t> shots,
                              std::size_t test_row, const PredictionPersona& persona = {});

/// Human-readable transcript with "### system" / "### user" / "### assistant"
/// sections, used for the golden files.
std::string render_conversation(const PromptBundle& bundle);

}  // namespace tabaudit::prompt
