#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>

#include "tabaudit/battery.hpp"
#include "tabaudit/error.hpp"
#include "internal.hpp"

namespace tabaudit::battery {

using namespace detail;

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::string> split_names(std::string_view response) {
    std::vector<std::string> out;
    std::string current;
    auto flush = [&] {
        auto t = trim(current);
        current.clear();
        if (!t.empty()) out.push_back(std::move(t));
    };
    for (char c : response) {
        if (c == ',' || c == '\n') {
            flush();
        } else {
            current.push_back(c);
        }
    }
    flush();
    if (!out.empty() && out.back().ends_with('.')) {
        out.back().pop_back();
        if (out.back().empty()) out.pop_back();
    }
    return out;
}

bool cell_valid(const FeatureSpec& spec, const std::optional<std::string>& value) {
    if (!value) return false;
    const std::string& v = *value;
    if (spec.has_missing() && v == spec.format.missing_token) return true;
    switch (spec.kind) {
        case FeatureKind::Numeric: {
            if (!parse_number(v)) return false;
            const int d = decimal_places(v);
            return d >= spec.format.min_decimals && d <= spec.format.max_decimals;
        }
        case FeatureKind::Categorical: return spec.observed(v);
        case FeatureKind::Text: return !v.empty();
    }
    return false;
}

double sample_validity(const TabularDataset& ds, const std::vector<ParsedSample>& samples,
                       std::vector<double>* per_feature = nullptr) {
    const std::size_t f = ds.feature_count();
    std::vector<std::size_t> valid(f, 0);
    for (const auto& s : samples) {
        for (std::size_t i = 0; i < f; ++i) valid[i] += cell_valid(ds.feature(i), s[i]);
    }
    std::size_t total = 0;
    for (auto v : valid) total += v;
    if (per_feature) {
        per_feature->clear();
        for (auto v : valid) {
            per_feature->push_back(samples.empty() ? 0.0 : static_cast<double>(v) / static_cast<double>(samples.size()));
        }
    }
    if (samples.empty() || f == 0) return 0.0;
    return static_cast<double>(total) / static_cast<double>(samples.size() * f);
}

// Deciles of a numeric feature; a value's bucket is the number of edges <= it.
struct Deciles {
    std::vector<double> edges;

    explicit Deciles(std::vector<double> values) {
        std::sort(values.begin(), values.end());
        if (values.empty()) return;
        for (int q = 1; q <= 9; ++q) {
            const auto rank = static_cast<std::size_t>(q * values.size() / 10);
            edges.push_back(values[std::min(rank, values.size() - 1)]);
        }
    }

    [[nodiscard]] std::string bucket(double x) const {
        return "decile:" + std::to_string(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
    }
};

std::string distribution_key(const FeatureSpec& spec, const std::optional<Deciles>& deciles, const std::string& v) {
    if (spec.kind == FeatureKind::Numeric && deciles) {
        if (const auto x = parse_number(v)) return deciles->bucket(*x);
    }
    return "value:" + v;
}

}  // namespace

TestResult test_feature_names(llm::ModelAdapter& adapter, const TabularDataset& dataset,
                              const prompt::FewShotPool& pool, const TestConfig& cfg) {
    TestResult r;
    r.name = "feature_names";
    r.rule = "Evidence iff the listed names equal the remaining feature names in order; Ambiguous if >= 80% of "
             "them appear; else AbsenceOfEvidence";
    if (dataset.feature_count() < 2) {
        r.verdict = Verdict::NotApplicable;
        r.headline = "1 feature";
        return r;
    }
    const auto bundle = prompt::build_feature_names(dataset, pool);
    const auto batch = run_queries(adapter, {bundle.request}, cfg);
    r.n_queries = 1;
    r.digests = batch.digests;

    auto expected = dataset.feature_names();
    expected.erase(expected.begin());
    const auto got = split_names(batch.responses[0]);
    const std::set<std::string> got_set(got.begin(), got.end());
    std::size_t matched = 0;
    for (const auto& name : expected) matched += got_set.contains(name);
    const bool exact = got == expected;

    r.verdict = feature_names_verdict(matched, expected.size(), exact);
    r.statistics["matched_fraction"] = static_cast<double>(matched) / static_cast<double>(expected.size());
    r.statistics["exact"] = exact ? 1.0 : 0.0;
    r.headline = std::to_string(matched) + "/" + std::to_string(expected.size());
    r.details = {{"expected", expected}, {"response", batch.responses[0]}};
    return r;
}

TestResult test_feature_values(llm::ModelAdapter& adapter, const TabularDataset& dataset,
                               const prompt::FewShotPool& pool, const TestConfig& cfg) {
    TestResult r;
    r.name = "feature_values";
    r.rule = "Evidence iff mean cell format validity >= 0.9; Ambiguous in [0.5, 0.9); else AbsenceOfEvidence";
    const auto requests = zk_sample_requests(dataset, pool, cfg.zk_temperature, cfg.feature_value_samples, cfg);
    const auto batch = run_queries(adapter, requests, cfg);
    r.n_queries = requests.size();
    r.digests = batch.digests;

    const auto samples = parse_all(dataset, batch.responses);
    std::vector<double> per_feature;
    const double validity = sample_validity(dataset, samples, &per_feature);
    const std::size_t ok = count_parseable(samples);
    r.verdict = feature_values_verdict(validity);
    r.statistics["validity"] = validity;
    r.statistics["parseable_fraction"] = static_cast<double>(ok) / static_cast<double>(samples.size());
    r.headline = fixed(validity);
    nlohmann::json features = nlohmann::json::array();
    for (std::size_t f = 0; f < dataset.feature_count(); ++f) {
        features.push_back({{"feature", dataset.feature(f).name}, {"validity", per_feature[f]}});
    }
    r.details = {{"samples", samples.size()}, {"parseable", ok}, {"features", std::move(features)}};
    return r;
}

TestResult test_feature_distribution(llm::ModelAdapter& adapter, const TabularDataset& dataset,
                                     const prompt::FewShotPool& pool, const TestConfig& cfg,
                                     const TestResult* feature_values) {
    TestResult r;
    r.name = "feature_distribution";
    r.rule = "NotApplicable unless the feature-values test shows valid formats; Evidence iff the sample mode "
             "(numerics by decile) equals the dataset mode for >= 50% of features; Ambiguous in [30%, 50%); else "
             "AbsenceOfEvidence";
    if (feature_values &&
        (feature_values->errored() || feature_values->verdict == Verdict::AbsenceOfEvidence)) {
        r.verdict = Verdict::NotApplicable;
        r.headline = "gated";
        r.details = {{"gate", "feature_values"}};
        return r;
    }

    const auto requests =
        zk_sample_requests(dataset, pool, cfg.distribution_temperature, cfg.distribution_samples, cfg);
    const auto batch = run_queries(adapter, requests, cfg);
    r.n_queries = requests.size();
    r.digests = batch.digests;
    const auto samples = parse_all(dataset, batch.responses);

    if (!feature_values) {
        const double validity = sample_validity(dataset, samples);
        r.statistics["gate_validity"] = validity;
        if (feature_values_verdict(validity) == Verdict::AbsenceOfEvidence) {
            r.verdict = Verdict::NotApplicable;
            r.headline = "gated";
            r.details = {{"gate", "own samples"}};
            return r;
        }
    }

    std::size_t agree = 0;
    nlohmann::json features = nlohmann::json::array();
    for (std::size_t f = 0; f < dataset.feature_count(); ++f) {
        const auto& spec = dataset.feature(f);
        std::optional<Deciles> deciles;
        if (spec.kind == FeatureKind::Numeric) {
            std::vector<double> xs;
            for (const auto& row : dataset.rows()) {
                if (row.parsed[f].type == ValueType::Number) xs.push_back(row.parsed[f].number);
            }
            deciles.emplace(std::move(xs));
        }
        std::vector<std::string> data_keys;
        data_keys.reserve(dataset.row_count());
        for (const auto& row : dataset.rows()) data_keys.push_back(distribution_key(spec, deciles, row.values[f]));
        std::vector<std::string> sample_keys;
        for (const auto& s : samples) {
            if (s[f]) sample_keys.push_back(distribution_key(spec, deciles, *s[f]));
        }
        const std::string data_mode = stats::mode_value(data_keys);
        const std::optional<std::string> sample_mode =
            sample_keys.empty() ? std::nullopt : std::optional(stats::mode_value(sample_keys));
        const bool same = sample_mode && *sample_mode == data_mode;
        agree += same;
        features.push_back({{"feature", spec.name},
                            {"dataset_mode", data_mode},
                            {"sample_mode", sample_mode ? nlohmann::json(*sample_mode) : nlohmann::json(nullptr)},
                            {"agree", same}});
    }
    const double agreement = static_cast<double>(agree) / static_cast<double>(dataset.feature_count());
    r.verdict = feature_distribution_verdict(agreement);
    r.statistics["mode_agreement"] = agreement;
    r.headline = std::to_string(agree) + "/" + std::to_string(dataset.feature_count());
    r.details = {{"features", std::move(features)}, {"samples", samples.size()}};
    return r;
}

}  // namespace tabaudit::battery
