#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "tabaudit/audit.hpp"
#include "tabaudit/error.hpp"

namespace {

using tabaudit::audit::Settings;

struct RunFlags {
    std::string config;
    std::vector<std::string> datasets;
    Settings settings;
};

void add_setting(CLI::App* app, Settings& settings, const std::string& flag, const std::string& key,
                 const std::string& help) {
    app->add_option_function<std::string>(
        flag, [&settings, key](const std::string& v) { settings[key] = v; }, help);
}

void add_shared(CLI::App* app, RunFlags& flags) {
    app->add_option("--config", flags.config, "Config file (TOML subset); flags override it");
    app->add_option("--dataset", flags.datasets, "Dataset CSV path (repeatable)");
    add_setting(app, flags.settings, "--adapter", "adapter", "http:URL | sim:NAME[:SEED] | replay:PATH");
    add_setting(app, flags.settings, "--seed", "seed", "Base seed for every random draw");
    add_setting(app, flags.settings, "--cache", "cache", "Transcript cache mode: record | replay | off");
    add_setting(app, flags.settings, "--cache-file", "cache_file", "Transcript cache path");
    add_setting(app, flags.settings, "--model", "model", "Model name sent to an http endpoint");
    add_setting(app, flags.settings, "--pool", "pool", "Few-shot pool JSON replacing the built-in pool");
    add_setting(app, flags.settings, "--parallelism", "parallelism", "Concurrent queries per test");
}

tabaudit::audit::AuditConfig build_config(const RunFlags& flags) {
    tabaudit::audit::AuditConfig cfg;
    if (!flags.config.empty()) apply_settings(cfg, tabaudit::audit::load_config_file(flags.config));
    Settings settings = flags.settings;
    if (!flags.datasets.empty()) {
        std::string joined;
        for (const auto& d : flags.datasets) joined += (joined.empty() ? "" : "\n") + d;
        settings["dataset"] = joined;
    }
    apply_settings(cfg, settings);
    return cfg;
}

int run(const RunFlags& flags) {
    const auto cfg = build_config(flags);
    const auto report = tabaudit::audit::run_audit(cfg);
    std::cout << tabaudit::audit::render_matrix(report);
    std::cout << "\nreport written to " << (cfg.out_dir / "report.json").string() << " and report.md\n";
    return report.all_errored() ? 3 : 0;
}

int sample(const RunFlags& flags, std::size_t n, double temperature) {
    auto cfg = build_config(flags);
    const bool cache_set = flags.settings.contains("cache") ||
                           (!flags.config.empty() && tabaudit::audit::load_config_file(flags.config).contains("cache"));
    if (!cache_set) cfg.cache = tabaudit::llm::CacheMode::Off;
    if (cfg.datasets.size() != 1) throw tabaudit::ConfigError("sample needs exactly one dataset");
    if (!cfg.adapter) throw tabaudit::ConfigError("no adapter given");
    cfg.test.validate();
    const auto dataset = std::make_shared<const tabaudit::TabularDataset>(tabaudit::load_csv_file(cfg.datasets[0]));
    std::optional<tabaudit::prompt::FewShotPool> loaded;
    if (cfg.pool) loaded.emplace(tabaudit::prompt::FewShotPool::load(*cfg.pool));
    const auto& pool = loaded ? *loaded : tabaudit::prompt::default_pool();
    const auto inner = tabaudit::audit::make_adapter(cfg, dataset);
    const bool replay = cfg.adapter->kind == tabaudit::audit::AdapterSpec::Kind::Replay;
    const auto mode = replay ? tabaudit::llm::CacheMode::Replay : cfg.cache;
    std::unique_ptr<tabaudit::llm::TranscriptStore> store;
    if (mode == tabaudit::llm::CacheMode::Off) {
        store = std::make_unique<tabaudit::llm::TranscriptStore>(mode);
    } else {
        std::error_code ec;
        const auto parent = cfg.cache_path().parent_path();
        if (!parent.empty()) std::filesystem::create_directories(parent, ec);
        store = std::make_unique<tabaudit::llm::TranscriptStore>(cfg.cache_path(), mode);
    }
    tabaudit::llm::CachedAdapter cached(*inner, *store);
    std::cout << tabaudit::audit::sample_csv(cached, *dataset, pool, n, temperature, cfg.test);
    return 0;
}

int cache_inspect(const std::string& path) {
    std::cout << tabaudit::audit::render_summary(tabaudit::audit::inspect_cache(path));
    return 0;
}

int cache_verify(const std::string& path) {
    const auto mismatches = tabaudit::audit::verify_cache(path);
    for (const auto& m : mismatches) std::cout << path << ":" << m.line << ": " << m.reason << "\n";
    std::cout << mismatches.size() << " mismatches\n";
    return mismatches.empty() ? 0 : 1;
}

int cache_merge(const std::string& out, const std::vector<std::string>& inputs) {
    std::vector<std::filesystem::path> paths(inputs.begin(), inputs.end());
    const auto n = tabaudit::audit::merge_caches(paths, out);
    std::cout << n << " transcripts written to " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tabaudit: test whether a language model has seen a tabular dataset"};
    app.set_version_flag("--version", std::string(tabaudit::audit::tool_version()));
    app.require_subcommand(1);

    RunFlags run_flags;
    auto* run_cmd = app.add_subcommand("run", "Run the test battery and write report.json / report.md");
    add_shared(run_cmd, run_flags);
    add_setting(run_cmd, run_flags.settings, "--tests", "tests", "Comma-separated tests, or all");
    add_setting(run_cmd, run_flags.settings, "--out", "out", "Output directory");
    add_setting(run_cmd, run_flags.settings, "--trials", "trials", "Trials per test");
    add_setting(run_cmd, run_flags.settings, "--budget", "budget", "Maximum distinct requests sent to the model");
    add_setting(run_cmd, run_flags.settings, "--prediction-target", "prediction_target",
                "Feature predicted by the prediction test (default: last)");

    RunFlags sample_flags;
    std::size_t n = 10;
    double temperature = 0.7;
    auto* sample_cmd = app.add_subcommand("sample", "Emit zero-knowledge samples as CSV");
    add_shared(sample_cmd, sample_flags);
    sample_cmd->add_option("--n", n, "Number of samples")->check(CLI::PositiveNumber);
    sample_cmd->add_option("--temperature", temperature, "Sampling temperature")->check(CLI::NonNegativeNumber);

    auto* cache_cmd = app.add_subcommand("cache", "Inspect, verify or merge transcript caches");
    cache_cmd->require_subcommand(1);
    std::string inspect_path, verify_path, merge_out;
    std::vector<std::string> merge_inputs;
    auto* inspect_cmd = cache_cmd->add_subcommand("inspect", "List transcripts per model identity");
    inspect_cmd->add_option("path", inspect_path, "Cache file")->required();
    auto* verify_cmd = cache_cmd->add_subcommand("verify", "Recompute digests and checksums");
    verify_cmd->add_option("path", verify_path, "Cache file")->required();
    auto* merge_cmd = cache_cmd->add_subcommand("merge", "Merge caches, dropping duplicate digests");
    merge_cmd->add_option("--out", merge_out, "Merged cache path")->required();
    merge_cmd->add_option("inputs", merge_inputs, "Input caches")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return run(run_flags);
        if (*sample_cmd) return sample(sample_flags, n, temperature);
        if (*inspect_cmd) return cache_inspect(inspect_path);
        if (*verify_cmd) return cache_verify(verify_path);
        if (*merge_cmd) return cache_merge(merge_out, merge_inputs);
    } catch (const tabaudit::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
