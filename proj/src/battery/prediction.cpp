#include <algorithm>
#include <cctype>
#include <unordered_map>

#include "internal.hpp"
#include "tabaudit/error.hpp"

namespace tabaudit::battery {

using namespace detail;

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::optional<std::string> parse_label(std::string_view response, const std::vector<std::string>& labels) {
    std::string text = first_line(response);
    const auto b = text.find_first_not_of(" \t\"'");
    if (b == std::string::npos) return std::nullopt;
    const auto e = text.find_last_not_of(" \t\"'.");
    text = text.substr(b, e - b + 1);
    for (const auto& l : labels) {
        if (l == text) return l;
    }
    const std::string folded = lower(text);
    for (const auto& l : labels) {
        if (lower(l) == folded) return l;
    }
    return std::nullopt;
}

}  // namespace

TestResult test_prediction(llm::ModelAdapter& adapter, const TabularDataset& dataset, std::size_t target,
                           const TestConfig& cfg) {
    TestResult r;
    r.name = "prediction";
    r.rule = "outcome measure: accuracy of few-shot label predictions on held-out rows, no verdict";
    const auto labels = prompt::class_labels(dataset, target);
    const std::size_t rows = dataset.row_count();
    const std::size_t available = rows > cfg.prediction_shots + 1 ? rows - cfg.prediction_shots - 1 : 0;
    const std::size_t n = std::min(cfg.trials, available);
    if (n == 0) {
        r.verdict = Verdict::NotApplicable;
        r.headline = "too few rows";
        return r;
    }
    Rng row_rng = trial_rng(cfg, "prediction_rows", 0);
    const auto test_rows = distinct_draws(rows, n, row_rng);
    std::vector<llm::ChatRequest> requests;
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = trial_rng(cfg, "prediction", i);
        const auto shots = prompt::draw_rows(rows, cfg.prediction_shots, test_rows[i], rng);
        requests.push_back(prompt::build_prediction(dataset, target, shots, test_rows[i], cfg.persona).request);
    }
    const auto batch = run_queries(adapter, requests, cfg);
    r.n_queries = n;
    r.digests = batch.digests;

    std::size_t correct = 0, unparseable = 0;
    std::unordered_map<std::string, std::size_t> truth_counts;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& truth = dataset.row(test_rows[i]).values[target];
        ++truth_counts[truth];
        const auto label = parse_label(batch.responses[i], labels);
        if (!label) {
            ++unparseable;
            continue;
        }
        correct += *label == truth;
    }
    std::unordered_map<std::string, std::size_t> all_counts;
    std::size_t majority = 0;
    for (const auto& row : dataset.rows()) majority = std::max(majority, ++all_counts[row.values[target]]);
    std::string majority_label;
    for (const auto& l : labels) {
        if (all_counts[l] == majority) {
            majority_label = l;
            break;
        }
    }
    const double accuracy = static_cast<double>(correct) / static_cast<double>(n);
    const auto ci = stats::wilson_interval(correct, n);
    r.statistics["accuracy"] = accuracy;
    r.statistics["accuracy_low"] = ci.low;
    r.statistics["accuracy_high"] = ci.high;
    r.statistics["majority_accuracy"] =
        static_cast<double>(truth_counts[majority_label]) / static_cast<double>(n);
    r.statistics["unparseable_fraction"] = static_cast<double>(unparseable) / static_cast<double>(n);
    r.headline = fixed(accuracy) + " (" + fixed(ci.low) + ", " + fixed(ci.high) + ")";
    r.details = {{"target", dataset.feature(target).name}, {"labels", labels}, {"majority_label", majority_label}};
    return r;
}

}  // namespace tabaudit::battery
