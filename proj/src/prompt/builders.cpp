#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "tabaudit/error.hpp"
#include "tabaudit/prompt.hpp"

namespace tabaudit::prompt {

namespace {

using llm::ChatMessage;
using llm::ChatRequest;
using llm::Role;

const std::string kFeatureNamesSystem =
    "You are an expert assistant for tabular datasets. Your task is to list the names of the features of different "
    "datasets. The user provides a description of the dataset and some of the feature names. You then provide the "
    "names of the remaining features.";

const std::string kCompletionSystem =
    "You are a helpful autocomplete bot for tabular datasets. You will be prompted with a portion of a sample from a "
    "machine learning dataset. Your task is to complete the observation from the dataset. The observations are "
    "presented to you in the format \"Feature Name = Feature Value\".";

const std::string kZkSampleSystem =
    "You are an expert assistant for tabular datasets. You provide random samples from different datasets. The user "
    "provides the name of the dataset and the names of the features. You then provide a sample from the dataset.";

const std::string kHeaderSystem =
    "You are an autocomplete bot for tabular datasets. You will be prompted with parts of a tabular dataset. Your "
    "task is to complete the dataset.";

const std::string kRowCompletionSystem =
    "You are a helpful autocomplete bot for tabular datasets. Your task is to provide rows as they are contained in "
    "tabular datasets. The user provides a number of contiguous rows from a tabular dataset. You then provide the "
    "next row from the dataset.";

const std::string kPredictionClosing = "Read all the provided inputs carefully and provide your best overall assessment.";

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string join_lines(const std::vector<std::string>& lines, std::size_t begin, std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end; ++i) {
        if (i > begin) out.push_back('\n');
        out += lines[i];
    }
    return out;
}

std::vector<std::size_t> iota(std::size_t begin, std::size_t end) {
    std::vector<std::size_t> out(end - begin);
    std::iota(out.begin(), out.end(), begin);
    return out;
}

std::vector<std::size_t> all_but(std::size_t n, std::size_t skip) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i != skip) out.push_back(i);
    }
    return out;
}

ChatRequest start(const std::string& system, int max_tokens, double temperature = 0.0) {
    ChatRequest r;
    r.messages.push_back({Role::System, system});
    r.max_tokens = max_tokens;
    r.temperature = temperature;
    return r;
}

void shot(ChatRequest& r, std::string user, std::string assistant) {
    r.messages.push_back({Role::User, std::move(user)});
    r.messages.push_back({Role::Assistant, std::move(assistant)});
}

std::string first_lines(const std::string& text, std::size_t n) {
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
        pos = text.find('\n', pos);
        if (pos == std::string::npos) return text;
        if (i + 1 == n) break;
        ++pos;
    }
    std::string out = text.substr(0, pos);
    if (!out.empty() && out.back() == '\r') out.pop_back();
    return out;
}

std::string fv_of_row_except(const TabularDataset& ds, const Row& row, std::size_t target) {
    const auto features = all_but(ds.feature_count(), target);
    return serialize_fv(ds, row, features);
}

std::string feature_list(const std::vector<std::string>& names) {
    if (names.size() <= 1) return join(names, "");
    if (names.size() == 2) return names[0] + " and " + names[1];
    std::vector<std::string> head(names.begin(), names.end() - 1);
    return join(head, ", ") + ", and " + names.back();
}

}  // namespace

std::string_view to_string(PromptKind kind) {
    switch (kind) {
        case PromptKind::FeatureNames: return "feature_names";
        case PromptKind::ZkSample: return "zk_sample";
        case PromptKind::ConditionalCompletion: return "conditional_completion";
        case PromptKind::Header: return "header";
        case PromptKind::RowCompletion: return "row_completion";
        case PromptKind::FeatureCompletion: return "feature_completion";
        case PromptKind::Prediction: return "prediction";
    }
    return "feature_names";
}

std::string_view to_string(ExpectedKind kind) {
    switch (kind) {
        case ExpectedKind::FeatureNames: return "feature-names";
        case ExpectedKind::FvCompletion: return "fv-completion";
        case ExpectedKind::FvSample: return "fv-sample";
        case ExpectedKind::CsvContinuation: return "csv-continuation";
        case ExpectedKind::SingleFeature: return "single-feature";
        case ExpectedKind::FirstToken: return "first-token";
        case ExpectedKind::ClassLabel: return "class-label";
    }
    return "feature-names";
}

const std::string& system_message(PromptKind kind) {
    switch (kind) {
        case PromptKind::FeatureNames: return kFeatureNamesSystem;
        case PromptKind::ZkSample: return kZkSampleSystem;
        case PromptKind::ConditionalCompletion:
        case PromptKind::FeatureCompletion: return kCompletionSystem;
        case PromptKind::Header: return kHeaderSystem;
        case PromptKind::RowCompletion: return kRowCompletionSystem;
        case PromptKind::Prediction: break;
    }
    throw std::invalid_argument("prediction system messages are built by prediction_system_message");
}

PromptBundle build_feature_names(const TabularDataset& dataset, const FewShotPool& pool) {
    if (dataset.feature_count() < 2) throw std::invalid_argument("feature-names prompt needs at least two features");
    PromptBundle b;
    b.kind = PromptKind::FeatureNames;
    b.expected_kind = ExpectedKind::FeatureNames;
    b.request = start(kFeatureNamesSystem, 1024);
    for (const PoolEntry* e : pool.examples_for(dataset)) {
        auto names = e->data.feature_names();
        const std::string first = names.front();
        names.erase(names.begin());
        shot(b.request, "Dataset: " + e->name + ". Feature Names: " + first, join(names, ", "));
    }
    auto names = dataset.feature_names();
    b.request.messages.push_back({Role::User, "Dataset: " + dataset.name() + ". Feature Names: " + names.front()});
    names.erase(names.begin());
    b.ground_truth = join(names, ", ");
    return b;
}

PromptBundle build_zk_sample(const TabularDataset& dataset, const FewShotPool& pool, double temperature) {
    PromptBundle b;
    b.kind = PromptKind::ZkSample;
    b.expected_kind = ExpectedKind::FvSample;
    b.request = start(kZkSampleSystem, 1024, temperature);
    for (const PoolEntry* e : pool.examples_for(dataset)) {
        shot(b.request, "Dataset: " + e->name + "\nFeature Names: " + join(e->data.feature_names(), ", "), e->sample);
    }
    b.request.messages.push_back(
        {Role::User, "Dataset: " + dataset.name() + "\nFeature Names: " + join(dataset.feature_names(), ", ")});
    return b;
}

PromptBundle build_conditional_completion(const TabularDataset& dataset, std::size_t row, std::size_t prefix_len,
                                          const FewShotPool& pool, double temperature) {
    if (prefix_len < 1 || prefix_len >= dataset.feature_count()) {
        throw std::invalid_argument("conditional completion needs 1 <= prefix length < feature count");
    }
    if (row >= dataset.row_count()) throw RowOutOfRange("row " + std::to_string(row) + " outside the dataset");
    PromptBundle b;
    b.kind = PromptKind::ConditionalCompletion;
    b.expected_kind = ExpectedKind::FvCompletion;
    b.request = start(kCompletionSystem, 1024, temperature);
    for (const PoolEntry* e : pool.examples_for(dataset)) {
        shot(b.request,
             "Dataset: " + e->name + "\nFeature Names: " + join(e->data.feature_names(), ", ") +
                 "\nFeature Values: " + e->completion_given,
             e->completion_rest);
    }
    const Row& r = dataset.row(row);
    const auto given = iota(0, prefix_len);
    const auto rest = iota(prefix_len, dataset.feature_count());
    b.request.messages.push_back({Role::User, "Dataset: " + dataset.name() + "\nFeature Names: " +
                                                  join(dataset.feature_names(), ", ") +
                                                  "\nFeature Values: " + serialize_fv(dataset, r, given)});
    b.ground_truth = serialize_fv(dataset, r, rest);
    return b;
}

PromptBundle build_header(const TabularDataset& dataset, const HeaderSplit& split, const FewShotPool& pool) {
    PromptBundle b;
    b.kind = PromptKind::Header;
    b.expected_kind = ExpectedKind::CsvContinuation;
    b.request = start(kHeaderSystem, 1024);
    for (const PoolEntry* e : pool.examples_for(dataset)) {
        const HeaderSplit ex = split_at(e->data, e->header_row, e->header_cut);
        shot(b.request, ex.prefix, first_lines(ex.continuation, kHeaderExampleLines));
    }
    b.request.messages.push_back({Role::User, split.prefix});
    b.ground_truth = split.continuation;
    return b;
}

PromptBundle build_row_completion(const TabularDataset& dataset, std::size_t start_row, std::size_t window,
                                  const FewShotPool& pool) {
    if (window == 0) throw std::invalid_argument("row completion window must be positive");
    if (start_row + window >= dataset.row_count()) {
        throw RowOutOfRange("rows " + std::to_string(start_row) + ".." + std::to_string(start_row + window) +
                            " need " + std::to_string(start_row + window + 1) + " rows, dataset has " +
                            std::to_string(dataset.row_count()));
    }
    PromptBundle b;
    b.kind = PromptKind::RowCompletion;
    b.expected_kind = ExpectedKind::CsvContinuation;
    b.request = start(kRowCompletionSystem, 512);
    for (const PoolEntry* e : pool.examples_for(dataset)) {
        const auto& lines = e->data.raw_lines();
        const std::size_t k = std::min(window, lines.size() - 1);
        shot(b.request, join_lines(lines, 0, k), lines[k]);
    }
    const auto& lines = dataset.raw_lines();
    b.request.messages.push_back({Role::User, join_lines(lines, start_row, start_row + window)});
    b.ground_truth = lines[start_row + window];
    return b;
}

PromptBundle build_feature_completion(const TabularDataset& dataset, std::size_t row, std::size_t target,
                                      std::span<const std::size_t> shot_rows) {
    if (row >= dataset.row_count()) throw RowOutOfRange("row " + std::to_string(row) + " outside the dataset");
    if (target >= dataset.feature_count()) throw std::invalid_argument("target feature out of range");
    const auto& spec = dataset.feature(target);
    PromptBundle b;
    b.kind = PromptKind::FeatureCompletion;
    b.expected_kind = ExpectedKind::SingleFeature;
    b.request = start(kCompletionSystem, 256);
    for (std::size_t s : shot_rows) {
        if (s == row) throw std::invalid_argument("feature completion shots must not contain the queried row");
        const Row& r = dataset.row(s);
        shot(b.request, fv_of_row_except(dataset, r, target), spec.name + " = " + fv_value(spec, r.values[target]));
    }
    const Row& r = dataset.row(row);
    b.request.messages.push_back({Role::User, fv_of_row_except(dataset, r, target)});
    b.ground_truth = r.values[target];
    return b;
}

std::vector<std::size_t> draw_rows(std::size_t row_count, std::size_t n, std::size_t exclude, Rng& rng) {
    std::vector<std::size_t> candidates = all_but(row_count, exclude);
    n = std::min(n, candidates.size());
    // partial Fisher-Yates
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + uniform_index(rng, candidates.size() - i);
        std::swap(candidates[i], candidates[j]);
    }
    candidates.resize(n);
    return candidates;
}

PromptBundle build_feature_completion(const TabularDataset& dataset, std::size_t row, std::size_t target,
                                      const FewShotPool&, Rng& rng, std::size_t shots) {
    const auto rows = draw_rows(dataset.row_count(), shots, row, rng);
    return build_feature_completion(dataset, row, target, rows);
}

std::vector<std::string> class_labels(const TabularDataset& dataset, std::size_t target) {
    const auto& spec = dataset.feature(target);
    if (spec.kind == FeatureKind::Text) {
        throw TargetNotCategorical("feature '" + spec.name + "' is free text, not a class label");
    }
    std::vector<std::string> labels;
    for (const auto& v : spec.observed_values) {
        if (spec.has_missing() && v == spec.format.missing_token) continue;
        labels.push_back(v);
    }
    if (labels.size() < 2 || labels.size() > kMaxPredictionClasses) {
        throw TargetNotCategorical("feature '" + spec.name + "' has " + std::to_string(labels.size()) +
                                   " distinct values; prediction needs 2 to " +
                                   std::to_string(kMaxPredictionClasses));
    }
    return labels;
}

std::string prediction_system_message(const TabularDataset& dataset, std::size_t target,
                                      const PredictionPersona& persona) {
    const auto& target_name = dataset.feature(target).name;
    std::vector<std::pair<std::string, std::string>> labels = persona.labels;
    if (labels.empty()) {
        for (const auto& l : class_labels(dataset, target)) labels.emplace_back(l, target_name + " is " + l);
    }
    std::vector<std::string> features;
    for (std::size_t f = 0; f < dataset.feature_count(); ++f) {
        if (f != target) features.push_back(dataset.feature(f).name);
    }
    std::string clauses;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i > 0) clauses += (i + 1 == labels.size()) ? ", and with " : ", with ";
        clauses += "'" + labels[i].first + "' if your assessment is that " + labels[i].second;
    }
    const std::string label = persona.dataset_label.empty() ? dataset.name() : persona.dataset_label;
    const std::string task =
        persona.task.empty() ? "Your task is to predict the value of " + target_name + "." : persona.task;
    return persona.persona + "\n\n" + "You help to make predictions on the " + label +
           " dataset. This dataset contains the following features: " + feature_list(features) + ".\n\n" + task +
           "\n\n" + "The user provides you with the data of different individuals. You respond with " + clauses +
           ".\n\n" + kPredictionClosing;
}

std::string prediction_query(const TabularDataset& dataset, const Row& row, std::size_t target) {
    return "IF " + fv_of_row_except(dataset, row, target) + ", THEN";
}

PromptBundle build_prediction(const TabularDataset& dataset, std::size_t target, std::span<const std::size_t> shots,
                              std::size_t test_row, const PredictionPersona& persona) {
    if (test_row >= dataset.row_count()) throw RowOutOfRange("test row outside the dataset");
    class_labels(dataset, target);
    PromptBundle b;
    b.kind = PromptKind::Prediction;
    b.expected_kind = ExpectedKind::ClassLabel;
    b.request = start(prediction_system_message(dataset, target, persona), 16);
    for (std::size_t s : shots) {
        if (s == test_row) throw std::invalid_argument("prediction shots must not contain the test row");
        const Row& r = dataset.row(s);
        shot(b.request, prediction_query(dataset, r, target), r.values[target]);
    }
    const Row& r = dataset.row(test_row);
    b.request.messages.push_back({Role::User, prediction_query(dataset, r, target)});
    b.ground_truth = r.values[target];
    return b;
}

std::string render_conversation(const PromptBundle& bundle) {
    std::string out;
    for (const auto& m : bundle.request.messages) {
        out += "### ";
        out += llm::to_string(m.role);
        out += "\n";
        out += m.content;
        out += "\n";
    }
    if (bundle.ground_truth) out += "### expected\n" + *bundle.ground_truth + "\n";
    return out;
}

}  // namespace tabaudit::prompt
