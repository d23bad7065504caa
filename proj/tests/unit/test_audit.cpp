#include <fstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "tabaudit/audit.hpp"
#include "tabaudit/error.hpp"

using namespace tabaudit;
using namespace tabaudit::audit;

namespace {

std::size_t config_error_line(std::string_view text) {
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        const auto at = what.find("line ");
        if (at != std::string::npos) return std::stoul(what.substr(at + 5));
    }
    return 0;
}

AuditConfig small_run(const std::filesystem::path& out, const std::string& adapter,
                      const std::filesystem::path& dataset = fixture::data_dir() / "iris.csv") {
    AuditConfig cfg;
    apply_settings(cfg, {{"dataset", dataset.string()},
                         {"adapter", adapter},
                         {"tests", "feature_names, header, row_completion, first_token, prediction"},
                         {"trials", "10"},
                         {"prediction_shots", "5"},
                         {"seed", "3"},
                         {"out", out.string()}});
    return cfg;
}

battery::TestResult result(const std::string& name, std::optional<battery::Verdict> v, std::string headline) {
    battery::TestResult r;
    r.name = name;
    r.verdict = v;
    r.headline = std::move(headline);
    return r;
}

}  // namespace

TEST_SUITE("audit") {
    TEST_CASE("config parser") {
        const auto s = parse_config_text(
            "# comment\n"
            "adapter = \"sim:verbatim:4\"\n"
            "trials = 50   # inline\n"
            "datasets = [\"a.csv\", 'b.csv']\n"
            "persona = \"line\\none \\\"quoted\\\"\"\n"
            "\n"
            "[test.header]\n"
            "trials = 25\n");
        CHECK(s.at("adapter") == "sim:verbatim:4");
        CHECK(s.at("trials") == "50");
        CHECK(s.at("datasets") == "a.csv\nb.csv");
        CHECK(s.at("persona") == "line\none \"quoted\"");
        CHECK(s.at("test.header.trials") == "25");

        AuditConfig cfg;
        apply_settings(cfg, s);
        CHECK(cfg.datasets.size() == 2);
        CHECK(cfg.test.trials == 50);
        CHECK(cfg.config_for("header").trials == 25);
        CHECK(cfg.config_for("row_completion").trials == 50);
        CHECK(cfg.adapter->seed == 4u);
        CHECK_NOTHROW(cfg.validate());
    }

    TEST_CASE("config errors name the line") {
        CHECK(config_error_line("a = 1\nb = \"open\n") == 2);
        CHECK(config_error_line("a = 1\n\n[nope]\n") == 3);
        CHECK(config_error_line("x = bare words\n") == 1);
        CHECK(config_error_line("a = 1\na = 2\n") == 2);
        CHECK(config_error_line("a = [1, 2\n") == 1);
        CHECK(config_error_line("k = \"\\q\"\n") == 1);
        AuditConfig cfg;
        CHECK_THROWS_AS(apply_settings(cfg, {{"colour", "blue"}}), ConfigError);
        CHECK_THROWS_AS(apply_settings(cfg, {{"test.unknown.trials", "3"}}), ConfigError);
        CHECK_THROWS_AS(apply_settings(cfg, {{"trials", "-3"}}), ConfigError);
    }

    TEST_CASE("config validation") {
        AuditConfig cfg;
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg.datasets = {"x.csv"};
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg.adapter = AdapterSpec::parse("http:https://example.invalid/v1");
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
        cfg.model = "m";
        CHECK_NOTHROW(cfg.validate());
        cfg.tests = {"header", "bogus"};
        CHECK_THROWS_AS(cfg.validate(), ConfigError);
    }

    TEST_CASE("adapter specs") {
        const auto sim = AdapterSpec::parse("sim:marginal:9");
        CHECK(sim.kind == AdapterSpec::Kind::Simulator);
        CHECK(sim.target == "marginal");
        CHECK(sim.seed == 9u);
        CHECK(sim.to_string() == "sim:marginal:9");
        CHECK(AdapterSpec::parse("replay:out/t.jsonl").kind == AdapterSpec::Kind::Replay);
        CHECK(AdapterSpec::parse("http:http://localhost:8000/v1").target == "http://localhost:8000/v1");
        CHECK_THROWS_AS(AdapterSpec::parse("carrier-pigeon:x"), ConfigError);
        CHECK_THROWS_AS(AdapterSpec::parse("sim:psychic"), ConfigError);
        CHECK_THROWS_AS(AdapterSpec::parse("sim:noise:abc"), ConfigError);
    }

    TEST_CASE("matrix rendering") {
        AuditReport report;
        report.tool_version = std::string(tool_version());
        report.tests = {"header", "row_completion", "feature_completion", "prediction"};
        DatasetReport d;
        d.name = "iris";
        d.results.push_back(result("header", battery::Verdict::Evidence, "2.5 lines"));
        d.results.push_back(result("row_completion", battery::Verdict::AbsenceOfEvidence, "0/10"));
        d.results.push_back(result("feature_completion", battery::Verdict::Ambiguous, "2/10"));
        d.results.push_back(result("prediction", std::nullopt, "0.93"));
        auto errored = result("first_token", std::nullopt, "");
        errored.error = "boom";
        d.results.push_back(errored);
        report.tests.push_back("first_token");
        report.datasets.push_back(d);
        const auto m = render_matrix(report);
        CHECK(m.find("| iris |") != std::string::npos);
        for (const char* token : {"PASS", "FAIL", "AMBIG", "0.93", "ERR"}) CHECK(m.find(token) != std::string::npos);
        CHECK(m.find("2.5 lines") != std::string::npos);
        CHECK(m.find("0/10") != std::string::npos);
        CHECK_FALSE(report.all_errored());
    }

    TEST_CASE("report json round trip") {
        const auto ds = fixture::load("iris.csv");
        AuditReport report;
        report.tool_version = std::string(tool_version());
        report.adapter = "sim:verbatim";
        report.cache_mode = "record";
        report.seed = 5;
        report.tests = {"header"};
        report.queries = 3;
        DatasetReport d;
        d.name = ds.name();
        d.path = "iris.csv";
        d.fingerprint = fingerprint(ds);
        d.model = "sim-verbatim:iris#0";
        d.queries = 3;
        auto r = result("header", battery::Verdict::Evidence, "1.5");
        r.statistics = {{"best_lines", 1.5}};
        r.digests = {"aa", "bb", "cc"};
        d.results.push_back(r);
        report.datasets.push_back(d);
        report.run.wall_seconds = 1.25;
        report.run.test_seconds = {{"header", 0.5}};
        const auto j = to_json(report);
        const auto back = report_from_json(j);
        CHECK(to_json(back) == j);
        CHECK(deterministic_part(back) == deterministic_part(report));
        CHECK_FALSE(deterministic_part(report).contains("run"));
        CHECK(d.fingerprint.rows == 25);
        CHECK(d.fingerprint.sha256.size() == 64);
        auto bad = j;
        bad["schema_version"] = 99;
        CHECK_THROWS_AS(report_from_json(bad), Error);
    }

    TEST_CASE("cache tool: verify, inspect and merge") {
        fixture::TempDir dir("audit-cache");
        const auto run = run_audit(small_run(dir.path() / "a", "sim:verbatim"));
        const auto cache = dir.path() / "a" / "transcripts.jsonl";
        REQUIRE(std::filesystem::exists(cache));
        CHECK(verify_cache(cache).empty());
        const auto summary = inspect_cache(cache);
        CHECK(summary.transcripts == run.queries);
        CHECK(summary.models.size() == 1);
        CHECK(render_summary(summary).find("sim-verbatim") != std::string::npos);

        std::vector<std::string> lines;
        {
            std::ifstream in(cache);
            for (std::string l; std::getline(in, l);) lines.push_back(l);
        }
        REQUIRE(lines.size() >= 3);
        auto flipped = lines;
        const auto pos = flipped[2].find("\"response\":\"") + 12;
        flipped[2][pos] = flipped[2][pos] == 'x' ? 'y' : 'x';
        std::string text;
        for (const auto& l : flipped) text += l + "\n";
        const auto broken = dir.path() / "broken.jsonl";
        fixture::write_file(broken, text);
        const auto problems = verify_cache(broken);
        REQUIRE(problems.size() == 1);
        CHECK(problems[0].line == 3);
        CHECK_THROWS_AS(inspect_cache(broken), CorruptCache);

        run_audit(small_run(dir.path() / "b", "sim:marginal"));
        const auto other = dir.path() / "b" / "transcripts.jsonl";
        const auto merged = dir.path() / "merged.jsonl";
        const auto n = merge_caches({cache, other, cache}, merged);
        CHECK(n == inspect_cache(cache).transcripts + inspect_cache(other).transcripts);
        CHECK(verify_cache(merged).empty());
    }

    TEST_CASE("replay reproduces a recorded run without the model") {
        fixture::TempDir dir("audit-replay");
        const auto recorded = run_audit(small_run(dir.path() / "rec", "sim:learner:2"));
        CHECK(recorded.run.adapter_invocations > 0);
        const auto cache = dir.path() / "rec" / "transcripts.jsonl";
        const auto replayed = run_audit(small_run(dir.path() / "rep", "replay:" + cache.string()));
        CHECK(replayed.run.adapter_invocations == 0);
        CHECK(deterministic_part(replayed).dump() == deterministic_part(recorded).dump());
        const auto on_disk = nlohmann::json::parse(fixture::read_file(dir.path() / "rep" / "report.json"));
        CHECK(on_disk.at("datasets") == deterministic_part(recorded).at("datasets"));
        CHECK(std::filesystem::exists(dir.path() / "rep" / "report.md"));

        auto fewer = small_run(dir.path() / "sub", "replay:" + cache.string());
        fewer.tests = {"header"};
        const auto subset = run_audit(fewer);
        REQUIRE(subset.datasets.size() == 1);
        CHECK(subset.datasets[0].results.size() == 1);
        CHECK(subset.run.adapter_invocations == 0);

    }

    TEST_CASE("replay misses surface as errored tests") {
        fixture::TempDir dir("audit-miss");
        const auto csv = dir.path() / "d_syn.csv";
        fixture::write_file(csv, fixture::synthetic_csv());
        run_audit(small_run(dir.path() / "rec", "sim:verbatim", csv));
        auto other = small_run(dir.path() / "miss", "replay:" + (dir.path() / "rec" / "transcripts.jsonl").string(), csv);
        other.test.seed = 4;
        other.test.trials = 30;
        const auto missing = run_audit(other);
        REQUIRE(missing.datasets.size() == 1);
        for (const auto& r : missing.datasets[0].results) {
            INFO(r.name);
            if (r.name == "header" || r.name == "row_completion" || r.name == "first_token") CHECK(r.errored());
            if (r.name == "feature_names") CHECK_FALSE(r.errored());
        }
        CHECK(missing.run.adapter_invocations == 0);
    }

    TEST_CASE("query budget stops the run") {
        fixture::TempDir dir("audit-budget");
        const auto csv = dir.path() / "d_syn.csv";
        fixture::write_file(csv, fixture::synthetic_csv());
        auto cfg = small_run(dir.path() / "out", "sim:verbatim", csv);
        cfg.test.trials = 30;
        cfg.budget = 5;
        const auto report = run_audit(cfg);
        bool any_error = false;
        for (const auto& r : report.datasets[0].results) any_error |= r.errored();
        CHECK(any_error);
        CHECK(report.queries <= 5);
    }
}
