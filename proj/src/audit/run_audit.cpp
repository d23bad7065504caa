#include <chrono>
#include <set>

#include "tabaudit/audit.hpp"
#include "tabaudit/error.hpp"
#include "tabaudit/http_adapter.hpp"
#include "tabaudit/simulators.hpp"

namespace tabaudit::audit {

namespace {

// Forwards to an adapter that can be swapped between datasets, so one
// budget spans the whole run.
class SwitchAdapter : public llm::ModelAdapter {
public:
    void set(llm::ModelAdapter* inner) { inner_ = inner; }
    [[nodiscard]] std::string identity() const override { return inner_->identity(); }
    std::string complete(const llm::ChatRequest& request) override { return inner_->complete(request); }

private:
    llm::ModelAdapter* inner_ = nullptr;
};

// Stands in for the recorded model; every request must be served by the cache.
class ReplayOnlyAdapter : public llm::ModelAdapter {
public:
    explicit ReplayOnlyAdapter(std::string identity) : identity_(std::move(identity)) {}
    [[nodiscard]] std::string identity() const override { return identity_; }
    std::string complete(const llm::ChatRequest& request) override {
        throw ReplayMiss("no recorded transcript for request " + llm::request_digest(identity_, request));
    }

private:
    std::string identity_;
};

std::string replay_identity(const std::filesystem::path& cache, const std::string& model,
                            const std::string& dataset_name) {
    if (!model.empty()) return model;
    std::set<std::string> models;
    for (const auto& t : llm::read_transcripts(cache)) models.insert(t.model);
    if (models.size() == 1) return *models.begin();
    std::vector<std::string> candidates;
    for (const auto& m : models) {
        if (m.find(":" + dataset_name + "#") != std::string::npos) candidates.push_back(m);
    }
    if (candidates.size() == 1) return candidates.front();
    std::string list;
    for (const auto& m : models) list += (list.empty() ? "" : ", ") + m;
    throw ConfigError("cannot tell which recorded model to replay for '" + dataset_name + "' (cache holds: " +
                      (list.empty() ? "nothing" : list) + "); set model");
}

battery::TestResult errored(const std::string& name, const std::string& what) {
    battery::TestResult r;
    r.name = name;
    r.error = what;
    r.headline = "error";
    return r;
}

battery::TestResult not_applicable(const std::string& name, const std::string& headline, const std::string& why) {
    battery::TestResult r;
    r.name = name;
    r.verdict = battery::Verdict::NotApplicable;
    r.headline = headline;
    r.details = {{"reason", why}};
    return r;
}

battery::TestResult provenance_result(battery::ProvenanceRecord& rec) {
    battery::TestResult r;
    r.name = "provenance";
    r.rule = "outcome measure: copying statistics of zero-knowledge samples against the dataset, no verdict";
    r.n_queries = rec.n_queries;
    r.digests = std::move(rec.digests);
    rec.digests.clear();
    r.statistics["dataset_self_match"] = rec.dataset_self_match;
    r.statistics["parseable_samples"] = static_cast<double>(rec.parseable_samples);
    if (rec.skipped) {
        r.verdict = battery::Verdict::NotApplicable;
        r.headline = "skipped";
        r.details = {{"reason", *rec.skipped}};
        return r;
    }
    const auto& s = *rec.samples;
    r.statistics["copied_row_fraction"] = s.copied_row_fraction;
    r.statistics["mean_best_match"] = s.mean_best_match;
    r.statistics["copied_value_fraction"] = s.copied_value_fraction;
    char buf[96];
    std::snprintf(buf, sizeof buf, "copied %.1f%%, match %.1f/%zu", 100.0 * s.copied_row_fraction, s.mean_best_match,
                  s.features);
    r.headline = buf;
    return r;
}

battery::TestResult run_prediction(llm::ModelAdapter& adapter, const TabularDataset& dataset,
                                   const battery::TestConfig& cfg) {
    std::size_t target = dataset.feature_count() - 1;
    if (cfg.prediction_target) {
        const auto idx = dataset.feature_index(*cfg.prediction_target);
        if (!idx) throw ConfigError("prediction target '" + *cfg.prediction_target + "' is not a feature");
        target = *idx;
    }
    try {
        prompt::class_labels(dataset, target);
    } catch (const TargetNotCategorical& e) {
        return not_applicable("prediction", "target not categorical", e.what());
    }
    return battery::test_prediction(adapter, dataset, target, cfg);
}

}  // namespace

std::unique_ptr<llm::ModelAdapter> make_adapter(const AuditConfig& config,
                                                std::shared_ptr<const TabularDataset> dataset) {
    if (!config.adapter) throw ConfigError("no adapter given");
    const auto& spec = *config.adapter;
    switch (spec.kind) {
        case AdapterSpec::Kind::Simulator:
            return std::make_unique<llm::SimulatedModel>(llm::simulator_from_string(spec.target), std::move(dataset),
                                                         spec.seed.value_or(config.test.seed));
        case AdapterSpec::Kind::Replay:
            return std::make_unique<ReplayOnlyAdapter>(replay_identity(spec.target, config.model, dataset->name()));
        case AdapterSpec::Kind::Http:
            return std::make_unique<llm::HttpAdapter>(llm::endpoint_from_environment(spec.target, config.model));
    }
    throw ConfigError("unsupported adapter");
}

std::string sample_csv(llm::ModelAdapter& adapter, const TabularDataset& dataset, const prompt::FewShotPool& pool,
                       std::size_t n, double temperature, const battery::TestConfig& cfg) {
    const auto requests = battery::zk_sample_requests(dataset, pool, temperature, n, cfg);
    const auto batch = battery::run_queries(adapter, requests, cfg);
    std::string out = csv::format_record(dataset.feature_names(), dataset.delimiter()) + "\n";
    for (const auto& response : batch.responses) {
        const auto sample = battery::parse_sample(dataset, response);
        std::vector<std::string> values;
        for (const auto& v : sample) values.push_back(v.value_or(std::string()));
        out += csv::format_record(values, dataset.delimiter()) + "\n";
    }
    return out;
}

DatasetFingerprint fingerprint(const TabularDataset& dataset) {
    return {dataset.row_count(), dataset.feature_count(), llm::sha256_hex(dataset.canonical_text())};
}

bool AuditReport::all_errored() const {
    bool any = false;
    for (const auto& d : datasets) {
        for (const auto& r : d.results) {
            if (!r.errored()) return false;
            any = true;
        }
    }
    return any;
}

DatasetReport audit_dataset(llm::ModelAdapter& adapter, const TabularDataset& dataset,
                            const prompt::FewShotPool& pool, const AuditConfig& config,
                            std::map<std::string, double>* test_seconds) {
    DatasetReport report;
    report.name = dataset.name();
    report.fingerprint = fingerprint(dataset);
    report.model = adapter.identity();
    std::optional<battery::TestResult> feature_values;

    for (const auto& name : config.selected_tests()) {
        const auto cfg = config.config_for(name);
        const auto started = std::chrono::steady_clock::now();
        battery::TestResult r;
        try {
            if (name == "feature_names") {
                r = battery::test_feature_names(adapter, dataset, pool, cfg);
            } else if (name == "feature_values") {
                r = battery::test_feature_values(adapter, dataset, pool, cfg);
            } else if (name == "feature_distribution") {
                r = battery::test_feature_distribution(adapter, dataset, pool, cfg,
                                                       feature_values ? &*feature_values : nullptr);
            } else if (name == "conditional_distribution") {
                r = battery::test_conditional_distribution(adapter, dataset, pool, cfg);
            } else if (name == "conditional_completion") {
                r = battery::test_conditional_completion(adapter, dataset, pool, cfg);
            } else if (name == "header") {
                r = battery::test_header(adapter, dataset, pool, cfg);
            } else if (name == "row_completion") {
                r = battery::test_row_completion(adapter, dataset, pool, cfg);
            } else if (name == "feature_completion") {
                r = battery::test_feature_completion(adapter, dataset, cfg);
            } else if (name == "first_token") {
                r = battery::test_first_token(adapter, dataset, pool, cfg);
            } else if (name == "prediction") {
                r = run_prediction(adapter, dataset, cfg);
            } else if (name == "provenance") {
                auto rec = battery::run_provenance(adapter, dataset, pool, cfg);
                r = provenance_result(rec);
                report.provenance = std::move(rec);
            }
        } catch (const std::exception& e) {
            r = errored(name, e.what());
        }
        if (name == "feature_values") feature_values = r;
        if (test_seconds) {
            (*test_seconds)[name] +=
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        }
        report.results.push_back(std::move(r));
    }

    std::set<std::string> digests;
    for (const auto& r : report.results) digests.insert(r.digests.begin(), r.digests.end());
    report.queries = digests.size();
    return report;
}

AuditReport run_audit(const AuditConfig& config) {
    config.validate();
    const auto wall_start = std::chrono::steady_clock::now();
    AuditReport report;
    report.tool_version = std::string(tool_version());
    report.adapter = config.adapter->to_string();
    report.seed = config.test.seed;
    report.tests = config.selected_tests();
    report.run.started_at = llm::utc_timestamp();

    const bool replay_adapter = config.adapter->kind == AdapterSpec::Kind::Replay;
    const llm::CacheMode mode = replay_adapter ? llm::CacheMode::Replay : config.cache;
    report.cache_mode = std::string(llm::to_string(mode));

    std::optional<prompt::FewShotPool> loaded_pool;
    if (config.pool) loaded_pool.emplace(prompt::FewShotPool::load(*config.pool));
    const prompt::FewShotPool& pool = loaded_pool ? *loaded_pool : prompt::default_pool();

    std::vector<std::shared_ptr<const TabularDataset>> datasets;
    for (const auto& path : config.datasets) {
        datasets.push_back(std::make_shared<const TabularDataset>(load_csv_file(path)));
    }

    if (mode == llm::CacheMode::Record) {
        std::error_code ec;
        const auto parent = config.cache_path().parent_path();
        if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    }
    std::unique_ptr<llm::TranscriptStore> store =
        mode == llm::CacheMode::Off ? std::make_unique<llm::TranscriptStore>(mode)
                                    : std::make_unique<llm::TranscriptStore>(config.cache_path(), mode);

    SwitchAdapter current;
    llm::InstrumentedAdapter instrumented(current, config.budget);
    llm::CachedAdapter cached(instrumented, *store);

    std::set<std::string> all_digests;
    for (std::size_t i = 0; i < datasets.size(); ++i) {
        const auto inner = make_adapter(config, datasets[i]);
        current.set(inner.get());
        const auto& ds = datasets[i];
        auto d = audit_dataset(cached, *ds, pool, config, &report.run.test_seconds);
        d.path = config.datasets[i].string();
        for (const auto& r : d.results) all_digests.insert(r.digests.begin(), r.digests.end());
        report.datasets.push_back(std::move(d));
    }
    report.queries = all_digests.size();
    report.run.adapter_invocations = store->invocations();
    report.run.cache_hits = store->hits();
    report.run.finished_at = llm::utc_timestamp();
    report.run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    write_report(report, config.out_dir);
    return report;
}

}  // namespace tabaudit::audit
