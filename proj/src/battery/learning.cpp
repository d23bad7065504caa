#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "internal.hpp"
#include "tabaudit/error.hpp"

namespace tabaudit::battery {

using namespace detail;

namespace {

constexpr double kCorrelationGate = 0.2;
constexpr std::size_t kMinCorrelationSamples = 100;
constexpr std::size_t kMinMeanSamples = 30;
constexpr std::size_t kMinProvenanceSamples = 100;
constexpr std::size_t kSelfMatchRows = 2000;

nlohmann::json matrix_json(const stats::CorrelationMatrix& m) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& row : m) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& v : row) r.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<std::string> sample_row(const ParsedSample& s) {
    std::vector<std::string> out;
    out.reserve(s.size());
    for (const auto& v : s) out.push_back(v.value_or(std::string()));
    return out;
}

std::string prefix_key(const std::vector<std::string>& values, std::size_t k) {
    std::string key;
    for (std::size_t i = 0; i < k; ++i) {
        key += values[i];
        key.push_back('\x1f');
    }
    return key;
}

// For prefix length k: the values feature k takes after each observed k-prefix.
class PrefixIndex {
public:
    explicit PrefixIndex(const TabularDataset& ds) : ds_(ds) {}

    bool valid(std::size_t k, const std::vector<std::string>& row, const std::string& value) {
        auto& index = for_length(k);
        const auto it = index.find(prefix_key(row, k));
        return it != index.end() && it->second.contains(value);
    }

private:
    using Index = std::unordered_map<std::string, std::unordered_set<std::string>>;

    Index& for_length(std::size_t k) {
        auto it = cache_.find(k);
        if (it != cache_.end()) return it->second;
        Index index;
        for (const auto& row : ds_.rows()) index[prefix_key(row.values, k)].insert(row.values[k]);
        return cache_.emplace(k, std::move(index)).first->second;
    }

    const TabularDataset& ds_;
    std::unordered_map<std::size_t, Index> cache_;
};

}  // namespace

std::vector<FeatureMeanTest> test_sample_means(const TabularDataset& dataset, const std::vector<ParsedSample>& samples) {
    const std::size_t ok = count_parseable(samples);
    if (ok < kMinMeanSamples) {
        throw InsufficientParseable(std::to_string(ok) + " parseable samples, need " + std::to_string(kMinMeanSamples));
    }
    std::vector<FeatureMeanTest> out;
    for (std::size_t f : dataset.numeric_features()) {
        FeatureMeanTest t;
        t.feature = dataset.feature(f).name;
        std::vector<double> xs, ys;
        for (const auto& s : samples) {
            if (!parseable(s) || !s[f]) continue;
            if (const auto x = parse_number(*s[f])) xs.push_back(*x);
        }
        for (const auto& row : dataset.rows()) {
            if (row.parsed[f].type == ValueType::Number) ys.push_back(row.parsed[f].number);
        }
        t.sample_mean = mean(xs);
        t.dataset_mean = mean(ys);
        try {
            t.test = stats::welch_t_test(xs, ys, stats::Alternative::TwoSided);
        } catch (const DegenerateSample& e) {
            t.error = e.what();
        }
        out.push_back(std::move(t));
    }
    return out;
}

TestResult test_conditional_distribution(llm::ModelAdapter& adapter, const TabularDataset& dataset,
                                         const prompt::FewShotPool& pool, const TestConfig& cfg) {
    TestResult r;
    r.name = "conditional_distribution";
    r.rule = "over feature pairs with dataset |r| >= 0.2: Evidence iff the sample correlation has the same sign "
             "for >= 80% of pairs; Ambiguous in [60%, 80%); else AbsenceOfEvidence";
    const auto numeric = dataset.numeric_features();
    if (numeric.size() < 2) {
        r.verdict = Verdict::NotApplicable;
        r.headline = "<2 numeric";
        return r;
    }
    const auto data_matrix = stats::correlation_matrix(stats::numeric_table(dataset), numeric);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < numeric.size(); ++i) {
        for (std::size_t j = i + 1; j < numeric.size(); ++j) {
            if (data_matrix[i][j] && std::fabs(*data_matrix[i][j]) >= kCorrelationGate) pairs.emplace_back(i, j);
        }
    }
    if (pairs.size() < 2) {
        r.verdict = Verdict::NotApplicable;
        r.headline = std::to_string(pairs.size()) + " pairs";
        r.details = {{"dataset_correlations", matrix_json(data_matrix)}};
        return r;
    }

    const auto requests = zk_sample_requests(dataset, pool, cfg.zk_temperature, cfg.correlation_samples, cfg);
    const auto batch = run_queries(adapter, requests, cfg);
    r.n_queries = requests.size();
    r.digests = batch.digests;
    const auto samples = parse_all(dataset, batch.responses);
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : samples) {
        if (parseable(s)) rows.push_back(sample_row(s));
    }
    if (rows.size() < kMinCorrelationSamples) {
        throw InsufficientParseable(std::to_string(rows.size()) + " of " + std::to_string(samples.size()) +
                                    " samples parsed, need " + std::to_string(kMinCorrelationSamples));
    }
    const auto sample_matrix = stats::correlation_matrix(stats::numeric_table(rows, dataset), numeric);

    std::size_t agree = 0;
    nlohmann::json pair_json = nlohmann::json::array();
    for (const auto& [i, j] : pairs) {
        const double d = *data_matrix[i][j];
        const auto s = sample_matrix[i][j];
        const bool same = s && *s != 0.0 && std::signbit(*s) == std::signbit(d);
        agree += same;
        pair_json.push_back({{"a", dataset.feature(numeric[i]).name},
                             {"b", dataset.feature(numeric[j]).name},
                             {"dataset_r", d},
                             {"sample_r", s ? nlohmann::json(*s) : nlohmann::json(nullptr)},
                             {"same_sign", same}});
    }
    const double agreement = static_cast<double>(agree) / static_cast<double>(pairs.size());
    r.verdict = conditional_distribution_verdict(agreement);
    r.statistics["sign_agreement"] = agreement;
    r.statistics["parseable_fraction"] = static_cast<double>(rows.size()) / static_cast<double>(samples.size());
    r.headline = ratio(agree, pairs.size());

    nlohmann::json names = nlohmann::json::array();
    for (std::size_t f : numeric) names.push_back(dataset.feature(f).name);
    nlohmann::json means = nlohmann::json::array();
    for (const auto& t : test_sample_means(dataset, samples)) {
        nlohmann::json m = {{"feature", t.feature}, {"sample_mean", t.sample_mean}, {"dataset_mean", t.dataset_mean}};
        if (t.test) {
            m["t"] = t.test->t_statistic;
            m["df"] = t.test->degrees_of_freedom;
            m["p"] = t.test->p_value;
        } else {
            m["error"] = *t.error;
        }
        means.push_back(std::move(m));
    }
    r.details = {{"features", std::move(names)},
                 {"dataset_correlations", matrix_json(data_matrix)},
                 {"sample_correlations", matrix_json(sample_matrix)},
                 {"pairs", std::move(pair_json)},
                 {"sample_means", std::move(means)}};
    return r;
}

TestResult test_conditional_completion(llm::ModelAdapter& adapter, const TabularDataset& dataset,
                                       const prompt::FewShotPool& pool, const TestConfig& cfg) {
    TestResult r;
    r.name = "conditional_completion";
    r.rule = "per feature, one-sided Welch tests of completion validity against marginal draws: Evidence iff some "
             "feature is better at p < 0.01 and none worse; Ambiguous if both occur; else AbsenceOfEvidence";
    const std::size_t features = dataset.feature_count();
    if (features < 2) {
        r.verdict = Verdict::NotApplicable;
        r.headline = "1 feature";
        return r;
    }
    const std::size_t positions = features - 1;
    const std::size_t n = cfg.trials;
    std::vector<std::size_t> rows(n), ks(n);
    std::vector<std::string> baseline(n);
    std::vector<llm::ChatRequest> requests;
    requests.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = trial_rng(cfg, "conditional_completion", i);
        ks[i] = 1 + i % positions;
        rows[i] = uniform_index(rng, dataset.row_count());
        baseline[i] = marginal_sample(ks[i], dataset, rng);
        requests.push_back(
            prompt::build_conditional_completion(dataset, rows[i], ks[i], pool, cfg.memorization_temperature).request);
    }
    const auto batch = run_queries(adapter, requests, cfg);
    r.n_queries = n;
    r.digests = batch.digests;

    PrefixIndex index(dataset);
    std::vector<std::vector<double>> model(features), base(features);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = dataset.row(rows[i]).values;
        const std::size_t k = ks[i];
        const auto parsed = parse_sample(dataset, batch.responses[i]);
        model[k].push_back(parsed[k] && index.valid(k, row, *parsed[k]) ? 1.0 : 0.0);
        base[k].push_back(index.valid(k, row, baseline[i]) ? 1.0 : 0.0);
    }

    std::vector<std::pair<double, double>> p_values;
    std::size_t better = 0, worse = 0;
    std::vector<double> all_model, all_base;
    nlohmann::json per_feature = nlohmann::json::array();
    for (std::size_t k = 1; k < features; ++k) {
        if (model[k].empty()) continue;
        const double p_greater = stats::one_sided_p(model[k], base[k]);
        const double p_less = stats::one_sided_p(base[k], model[k]);
        p_values.emplace_back(p_greater, p_less);
        better += p_greater < 0.01;
        worse += p_less < 0.01;
        all_model.insert(all_model.end(), model[k].begin(), model[k].end());
        all_base.insert(all_base.end(), base[k].begin(), base[k].end());
        per_feature.push_back({{"feature", dataset.feature(k).name},
                               {"trials", model[k].size()},
                               {"model_validity", mean(model[k])},
                               {"baseline_validity", mean(base[k])},
                               {"p_greater", p_greater},
                               {"p_less", p_less}});
    }
    r.verdict = conditional_completion_verdict(p_values);
    r.statistics["model_validity"] = mean(all_model);
    r.statistics["baseline_validity"] = mean(all_base);
    r.statistics["features_better"] = static_cast<double>(better);
    r.statistics["features_worse"] = static_cast<double>(worse);
    r.headline = std::to_string(better) + "+/" + std::to_string(worse) + "- of " + std::to_string(p_values.size());
    r.details = {{"features", std::move(per_feature)}};
    return r;
}

double self_match_statistic(const TabularDataset& dataset, std::size_t max_rows, Rng& rng, std::size_t* rows_used) {
    const stats::MatchIndex index(dataset);
    if (dataset.row_count() <= max_rows) {
        if (rows_used) *rows_used = dataset.row_count();
        return index.mean_self_match();
    }
    const auto chosen = distinct_draws(dataset.row_count(), max_rows, rng);
    double total = 0.0;
    for (std::size_t r : chosen) total += static_cast<double>(index.best_match(dataset.row(r).values, r));
    if (rows_used) *rows_used = chosen.size();
    return total / static_cast<double>(chosen.size());
}

ProvenanceRecord run_provenance(llm::ModelAdapter& adapter, const TabularDataset& dataset,
                                const prompt::FewShotPool& pool, const TestConfig& cfg) {
    ProvenanceRecord rec;
    const auto requests = zk_sample_requests(dataset, pool, cfg.zk_temperature, cfg.provenance_samples, cfg);
    const auto batch = run_queries(adapter, requests, cfg);
    rec.n_queries = requests.size();
    rec.digests = batch.digests;

    std::vector<std::vector<std::string>> complete;
    for (const auto& response : batch.responses) {
        const auto s = parse_sample(dataset, response);
        if (present_count(s) == s.size()) complete.push_back(sample_row(s));
    }
    rec.parseable_samples = complete.size();
    Rng rng = trial_rng(cfg, "provenance_reference", 0);
    rec.dataset_self_match = self_match_statistic(dataset, kSelfMatchRows, rng, &rec.reference_rows);
    if (complete.size() < kMinProvenanceSamples) {
        rec.skipped = std::to_string(complete.size()) + " complete samples, need " +
                      std::to_string(kMinProvenanceSamples);
        return rec;
    }
    rec.samples = stats::provenance_stats(complete, dataset);
    return rec;
}

nlohmann::json to_json(const ProvenanceRecord& r) {
    nlohmann::json j = {
        {"dataset_self_match", r.dataset_self_match},
        {"reference_rows", r.reference_rows},
        {"parseable_samples", r.parseable_samples},
        {"n_queries", r.n_queries},
        {"digests", r.digests},
        {"skipped", r.skipped ? nlohmann::json(*r.skipped) : nlohmann::json(nullptr)},
        {"samples", nullptr},
    };
    if (r.samples) {
        j["samples"] = {
            {"copied_row_fraction", r.samples->copied_row_fraction},
            {"mean_best_match", r.samples->mean_best_match},
            {"copied_value_fraction", r.samples->copied_value_fraction},
            {"samples", r.samples->samples},
            {"features", r.samples->features},
        };
    }
    return j;
}

ProvenanceRecord provenance_from_json(const nlohmann::json& j) {
    ProvenanceRecord r;
    r.dataset_self_match = j.at("dataset_self_match").get<double>();
    r.reference_rows = j.at("reference_rows").get<std::size_t>();
    r.parseable_samples = j.at("parseable_samples").get<std::size_t>();
    r.n_queries = j.at("n_queries").get<std::size_t>();
    r.digests = j.at("digests").get<std::vector<std::string>>();
    if (!j.at("skipped").is_null()) r.skipped = j.at("skipped").get<std::string>();
    if (!j.at("samples").is_null()) {
        const auto& s = j.at("samples");
        stats::ProvenanceStats p;
        p.copied_row_fraction = s.at("copied_row_fraction").get<double>();
        p.mean_best_match = s.at("mean_best_match").get<double>();
        p.copied_value_fraction = s.at("copied_value_fraction").get<double>();
        p.samples = s.at("samples").get<std::size_t>();
        p.features = s.at("features").get<std::size_t>();
        r.samples = p;
    }
    return r;
}

}  // namespace tabaudit::battery
