#include <algorithm>
#include <cctype>
#include <unordered_map>

#include "internal.hpp"
#include "tabaudit/error.hpp"

namespace tabaudit::battery {

using namespace detail;

namespace {

constexpr std::size_t kHeaderSplitRows[] = {2, 4, 6, 8};
constexpr std::size_t kMinRowTrials = 25;
constexpr std::size_t kBaselinePairs = 2000;
constexpr std::size_t kBaselineFolds = 5;
constexpr double kFirstTokenCeiling = 0.9;

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::size_t> window_starts(const TabularDataset& dataset, const TestConfig& cfg) {
    const std::size_t range = dataset.row_count() > cfg.window ? dataset.row_count() - cfg.window : 0;
    Rng rng = trial_rng(cfg, "row_windows", 0);
    return distinct_draws(range, std::min(cfg.trials, range), rng);
}

std::vector<llm::ChatRequest> row_requests(const TabularDataset& dataset, const prompt::FewShotPool& pool,
                                           const std::vector<std::size_t>& starts, const TestConfig& cfg) {
    std::vector<llm::ChatRequest> out;
    out.reserve(starts.size());
    for (std::size_t s : starts) {
        auto req = prompt::build_row_completion(dataset, s, cfg.window, pool).request;
        req.temperature = cfg.memorization_temperature;
        out.push_back(std::move(req));
    }
    return out;
}

// Logistic accuracy predicting each row's first token from the previous row's numeric values.
std::optional<double> logistic_first_token(const TabularDataset& dataset, const std::vector<std::string>& tokens,
                                           const TestConfig& cfg) {
    const auto numeric = dataset.numeric_features();
    if (numeric.empty() || dataset.row_count() < 2 * kBaselineFolds + 1) return std::nullopt;
    std::vector<double> means(numeric.size(), 0.0);
    for (std::size_t j = 0; j < numeric.size(); ++j) {
        std::vector<double> xs;
        for (const auto& row : dataset.rows()) {
            if (row.parsed[numeric[j]].type == ValueType::Number) xs.push_back(row.parsed[numeric[j]].number);
        }
        means[j] = mean(xs);
    }
    Rng rng = trial_rng(cfg, "first_token_baseline", 0);
    auto targets = distinct_draws(dataset.row_count() - 1, kBaselinePairs, rng);
    std::sort(targets.begin(), targets.end());
    std::vector<std::vector<double>> features;
    std::vector<std::string> labels;
    for (std::size_t t : targets) {
        const Row& prev = dataset.row(t);
        std::vector<double> x(numeric.size());
        for (std::size_t j = 0; j < numeric.size(); ++j) {
            const auto& v = prev.parsed[numeric[j]];
            x[j] = v.type == ValueType::Number ? v.number : means[j];
        }
        features.push_back(std::move(x));
        labels.push_back(tokens[t + 1]);
    }
    stats::LogisticOptions options;
    options.iterations = 500;
    return stats::cross_validated_accuracy(features, labels, kBaselineFolds,
                                           derive_seed(cfg.seed, "first_token_folds", 0), options);
}

}  // namespace

TestResult test_header(llm::ModelAdapter& adapter, const TabularDataset& dataset, const prompt::FewShotPool& pool,
                       const TestConfig& cfg) {
    TestResult r;
    r.name = "header";
    r.rule = "best of four splits: Evidence iff at least one full line after the cut line is reproduced; Ambiguous "
             "iff only the cut line is finished; else AbsenceOfEvidence";
    if (dataset.row_count() < 9) {
        r.verdict = Verdict::NotApplicable;
        r.headline = "<9 rows";
        return r;
    }
    std::vector<prompt::PromptBundle> bundles;
    std::vector<llm::ChatRequest> requests;
    for (std::size_t j = 0; j < std::size(kHeaderSplitRows); ++j) {
        const std::size_t row = kHeaderSplitRows[j];
        if (dataset.raw_lines()[row].size() < 2) continue;
        Rng rng = trial_rng(cfg, "header", j);
        auto bundle = prompt::build_header(dataset, split_for_header(dataset, row, rng), pool);
        bundle.request.temperature = cfg.memorization_temperature;
        requests.push_back(bundle.request);
        bundles.push_back(std::move(bundle));
    }
    if (requests.empty()) {
        r.verdict = Verdict::NotApplicable;
        r.headline = "short rows";
        return r;
    }
    const auto batch = run_queries(adapter, requests, cfg);
    r.n_queries = requests.size();
    r.digests = batch.digests;

    double best = 0.0;
    nlohmann::json splits = nlohmann::json::array();
    for (std::size_t i = 0; i < bundles.size(); ++i) {
        const double score = header_score(batch.responses[i], *bundles[i].ground_truth);
        best = std::max(best, score);
        splits.push_back({{"score", score}, {"response", batch.responses[i]}});
    }
    r.verdict = header_verdict(best);
    r.statistics["best_lines"] = best;
    r.headline = fixed(best, 1);
    r.details = {{"splits", std::move(splits)}};
    return r;
}

TestResult test_row_completion(llm::ModelAdapter& adapter, const TabularDataset& dataset,
                               const prompt::FewShotPool& pool, const TestConfig& cfg) {
    TestResult r;
    r.name = "row_completion";
    r.rule = "Evidence iff exact rate >= max(0.10, 3 x duplicate baseline), or exact rate >= 0.02 with the "
             "similarity t-test p < 0.01; Ambiguous iff exact rate >= 0.02 otherwise; else AbsenceOfEvidence";
    const auto starts = window_starts(dataset, cfg);
    if (starts.size() < kMinRowTrials) {
        r.verdict = Verdict::NotApplicable;
        r.headline = std::to_string(starts.size()) + " windows";
        return r;
    }
    const auto requests = row_requests(dataset, pool, starts, cfg);
    const auto batch = run_queries(adapter, requests, cfg);
    r.n_queries = requests.size();
    r.digests = batch.digests;

    const auto& lines = dataset.raw_lines();
    std::unordered_map<std::string_view, std::size_t> occurrences;
    for (const auto& l : lines) ++occurrences[l];

    std::size_t exact = 0, duplicates = 0;
    std::vector<double> to_truth, to_other;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        const std::size_t target = starts[i] + cfg.window;
        const std::string got = first_line(batch.responses[i]);
        exact += got == lines[target];
        duplicates += occurrences[lines[target]] > 1;
        Rng rng = trial_rng(cfg, "row_completion_other", i);
        std::size_t other = uniform_index(rng, lines.size() - 1);
        if (other >= target) ++other;
        to_truth.push_back(stats::similarity(got, lines[target]));
        to_other.push_back(stats::similarity(got, lines[other]));
    }
    const double n = static_cast<double>(starts.size());
    const double exact_rate = static_cast<double>(exact) / n;
    const double duplicate_baseline = static_cast<double>(duplicates) / n;
    const double p = stats::one_sided_p(to_truth, to_other);
    r.verdict = row_completion_verdict(exact_rate, duplicate_baseline, p);
    r.statistics["exact_rate"] = exact_rate;
    r.statistics["duplicate_baseline"] = duplicate_baseline;
    r.statistics["similarity_true"] = mean(to_truth);
    r.statistics["similarity_random"] = mean(to_other);
    r.statistics["similarity_p"] = p;
    r.headline = ratio(exact, starts.size());
    r.details = {{"window", cfg.window}, {"starts", starts}};
    return r;
}

TestResult test_feature_completion(llm::ModelAdapter& adapter, const TabularDataset& dataset, const TestConfig& cfg) {
    TestResult r;
    r.name = "feature_completion";
    r.rule = "Evidence iff the unique feature is completed exactly in >= 25% of trials; Ambiguous in [10%, 25%); "
             "else AbsenceOfEvidence";
    const auto target = find_unique_feature(dataset);
    if (!target) {
        r.verdict = Verdict::NotApplicable;
        r.headline = "no unique feature";
        return r;
    }
    const auto& spec = dataset.feature(*target);
    if (dataset.row_count() < cfg.completion_shots + 1) {
        r.verdict = Verdict::NotApplicable;
        r.headline = "too few rows";
        return r;
    }
    Rng row_rng = trial_rng(cfg, "feature_completion_rows", 0);
    const auto rows = distinct_draws(dataset.row_count(), cfg.trials, row_rng);
    std::vector<llm::ChatRequest> requests;
    std::vector<std::string> truth;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        Rng rng = trial_rng(cfg, "feature_completion", i);
        const auto shots = prompt::draw_rows(dataset.row_count(), cfg.completion_shots, rows[i], rng);
        auto bundle = prompt::build_feature_completion(dataset, rows[i], *target, shots);
        bundle.request.temperature = cfg.memorization_temperature;
        requests.push_back(std::move(bundle.request));
        truth.push_back(*bundle.ground_truth);
    }
    const auto batch = run_queries(adapter, requests, cfg);
    r.n_queries = requests.size();
    r.digests = batch.digests;

    std::size_t exact = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto pairs = parse_fv_response(batch.responses[i], std::span(&spec, 1));
        const auto it = pairs.find(spec.name);
        const std::string raw = it != pairs.end() ? it->second : trim(first_line(batch.responses[i]));
        exact += canonical_value(spec, raw) == truth[i];
    }
    const double rate = static_cast<double>(exact) / static_cast<double>(rows.size());
    r.verdict = feature_completion_verdict(rate);
    r.statistics["exact_rate"] = rate;
    r.headline = ratio(exact, rows.size());
    r.details = {{"feature", spec.name}};
    return r;
}

TestResult test_first_token(llm::ModelAdapter& adapter, const TabularDataset& dataset, const prompt::FewShotPool& pool,
                            const TestConfig& cfg) {
    TestResult r;
    r.name = "first_token";
    r.rule = "one-sided binomial test of accuracy against max(mode, logistic) baseline: AbsenceOfEvidence iff "
             "p >= 0.01; Evidence iff accuracy - baseline >= 0.05; else Ambiguous";
    const auto& lines = dataset.raw_lines();
    const auto length = first_token_length(lines);
    if (!length) {
        r.verdict = Verdict::NotApplicable;
        r.headline = "no informative prefix";
        return r;
    }
    const auto starts = window_starts(dataset, cfg);
    if (starts.size() < kMinRowTrials) {
        r.verdict = Verdict::NotApplicable;
        r.headline = std::to_string(starts.size()) + " windows";
        return r;
    }
    const std::size_t len = *length;
    std::vector<std::string> tokens;
    tokens.reserve(lines.size());
    for (const auto& l : lines) tokens.push_back(l.substr(0, len));

    std::unordered_map<std::string, std::size_t> counts;
    std::size_t mode_count = 0;
    for (const auto& t : tokens) mode_count = std::max(mode_count, ++counts[t]);
    const double mode_accuracy = static_cast<double>(mode_count) / static_cast<double>(tokens.size());
    const auto logistic_accuracy = logistic_first_token(dataset, tokens, cfg);
    const double baseline = std::max(mode_accuracy, logistic_accuracy.value_or(0.0));
    r.statistics["mode_accuracy"] = mode_accuracy;
    if (logistic_accuracy) r.statistics["logistic_accuracy"] = *logistic_accuracy;
    r.statistics["baseline"] = baseline;
    r.details = {{"token_length", len}};
    if (baseline >= kFirstTokenCeiling) {
        r.verdict = Verdict::NotApplicable;
        r.headline = "baseline " + fixed(baseline);
        return r;
    }

    const auto requests = row_requests(dataset, pool, starts, cfg);
    const auto batch = run_queries(adapter, requests, cfg);
    r.n_queries = requests.size();
    r.digests = batch.digests;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        const std::string got = first_line(batch.responses[i]);
        correct += got.size() >= len && got.compare(0, len, tokens[starts[i] + cfg.window]) == 0;
    }
    const double accuracy = static_cast<double>(correct) / static_cast<double>(starts.size());
    const double p = stats::binomial_upper_p(correct, starts.size(), baseline);
    const auto ci = stats::wilson_interval(correct, starts.size());
    r.verdict = first_token_verdict(accuracy, baseline, p);
    r.statistics["accuracy"] = accuracy;
    r.statistics["accuracy_low"] = ci.low;
    r.statistics["accuracy_high"] = ci.high;
    r.statistics["binomial_p"] = p;
    r.headline = fixed(accuracy) + " vs " + fixed(baseline);
    return r;
}

}  // namespace tabaudit::battery
