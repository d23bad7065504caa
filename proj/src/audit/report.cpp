#include <cstdio>
#include <fstream>

#include "tabaudit/audit.hpp"
#include "tabaudit/error.hpp"

namespace tabaudit::audit {

namespace {

const std::map<std::string, std::string>& column_titles() {
    static const std::map<std::string, std::string> titles = {
        {"feature_names", "Feature Names"},
        {"feature_values", "Feature Values"},
        {"feature_distribution", "Feature Dist."},
        {"conditional_distribution", "Cond. Dist."},
        {"conditional_completion", "Cond. Completion"},
        {"header", "Header"},
        {"row_completion", "Row Completion"},
        {"feature_completion", "Feature Completion"},
        {"first_token", "First Token"},
        {"prediction", "Prediction"},
        {"provenance", "Provenance"},
    };
    return titles;
}

std::string title(const std::string& test) {
    const auto it = column_titles().find(test);
    return it == column_titles().end() ? test : it->second;
}

std::string cell_token(const battery::TestResult& r) {
    if (r.errored()) return "ERR";
    if (!r.verdict) return r.headline;
    switch (*r.verdict) {
        case battery::Verdict::Evidence: return "PASS";
        case battery::Verdict::AbsenceOfEvidence: return "FAIL";
        case battery::Verdict::Ambiguous: return "AMBIG";
        case battery::Verdict::NotApplicable: return "N-A";
    }
    return "N-A";
}

std::string escape_cell(std::string s) {
    std::string out;
    for (char c : s) {
        if (c == '|') out += "\\|";
        else if (c == '\n') out += ' ';
        else out.push_back(c);
    }
    return out;
}

std::string number(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

const battery::TestResult* find_result(const DatasetReport& d, const std::string& test) {
    for (const auto& r : d.results) {
        if (r.name == test) return &r;
    }
    return nullptr;
}

nlohmann::json dataset_json(const DatasetReport& d) {
    nlohmann::json results = nlohmann::json::array();
    for (const auto& r : d.results) results.push_back(battery::to_json(r));
    return {
        {"name", d.name},
        {"path", d.path},
        {"fingerprint", {{"rows", d.fingerprint.rows}, {"features", d.fingerprint.features},
                         {"sha256", d.fingerprint.sha256}}},
        {"model", d.model},
        {"queries", d.queries},
        {"results", std::move(results)},
        {"provenance", d.provenance ? battery::to_json(*d.provenance) : nlohmann::json(nullptr)},
    };
}

DatasetReport dataset_from_json(const nlohmann::json& j) {
    DatasetReport d;
    d.name = j.at("name").get<std::string>();
    d.path = j.at("path").get<std::string>();
    const auto& f = j.at("fingerprint");
    d.fingerprint = {f.at("rows").get<std::size_t>(), f.at("features").get<std::size_t>(),
                     f.at("sha256").get<std::string>()};
    d.model = j.at("model").get<std::string>();
    d.queries = j.at("queries").get<std::size_t>();
    for (const auto& r : j.at("results")) d.results.push_back(battery::test_result_from_json(r));
    if (!j.at("provenance").is_null()) d.provenance = battery::provenance_from_json(j.at("provenance"));
    return d;
}

}  // namespace

nlohmann::json deterministic_part(const AuditReport& r) {
    nlohmann::json datasets = nlohmann::json::array();
    for (const auto& d : r.datasets) datasets.push_back(dataset_json(d));
    return {
        {"schema_version", r.schema_version},
        {"tool_version", r.tool_version},
        {"seed", r.seed},
        {"tests", r.tests},
        {"queries", r.queries},
        {"datasets", std::move(datasets)},
    };
}

nlohmann::json to_json(const AuditReport& r) {
    auto j = deterministic_part(r);
    nlohmann::json seconds = nlohmann::json::object();
    for (const auto& [k, v] : r.run.test_seconds) seconds[k] = v;
    j["run"] = {
        {"adapter", r.adapter},
        {"cache_mode", r.cache_mode},
        {"started_at", r.run.started_at},
        {"finished_at", r.run.finished_at},
        {"wall_seconds", r.run.wall_seconds},
        {"adapter_invocations", r.run.adapter_invocations},
        {"cache_hits", r.run.cache_hits},
        {"test_seconds", std::move(seconds)},
    };
    return j;
}

AuditReport report_from_json(const nlohmann::json& j) {
    try {
        AuditReport r;
        r.schema_version = j.at("schema_version").get<int>();
        if (r.schema_version != kReportSchemaVersion) {
            throw Error("unsupported report schema version " + std::to_string(r.schema_version));
        }
        r.tool_version = j.at("tool_version").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.tests = j.at("tests").get<std::vector<std::string>>();
        r.queries = j.at("queries").get<std::size_t>();
        for (const auto& d : j.at("datasets")) r.datasets.push_back(dataset_from_json(d));
        const auto& run = j.at("run");
        r.adapter = run.at("adapter").get<std::string>();
        r.cache_mode = run.at("cache_mode").get<std::string>();
        r.run.started_at = run.at("started_at").get<std::string>();
        r.run.finished_at = run.at("finished_at").get<std::string>();
        r.run.wall_seconds = run.at("wall_seconds").get<double>();
        r.run.adapter_invocations = run.at("adapter_invocations").get<std::size_t>();
        r.run.cache_hits = run.at("cache_hits").get<std::size_t>();
        for (const auto& [k, v] : run.at("test_seconds").items()) r.run.test_seconds[k] = v.get<double>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed report: ") + e.what());
    }
}

std::string render_matrix(const AuditReport& report) {
    std::string out = "| Dataset |";
    std::string rule = "|---|";
    for (const auto& t : report.tests) {
        out += " " + title(t) + " |";
        rule += "---|";
    }
    out += "\n" + rule + "\n";
    std::string notes;
    std::size_t note = 0;
    for (const auto& d : report.datasets) {
        out += "| " + escape_cell(d.name) + " |";
        for (const auto& t : report.tests) {
            const auto* r = find_result(d, t);
            if (!r) {
                out += " N-A |";
                continue;
            }
            ++note;
            out += " " + escape_cell(cell_token(*r)) + "[^" + std::to_string(note) + "] |";
            std::string text = r->errored() ? *r->error : r->headline;
            notes += "[^" + std::to_string(note) + "]: " + d.name + ", " + title(t) + ": " + escape_cell(text) + "\n";
        }
        out += "\n";
    }
    out += "\nPASS = evidence, FAIL = no evidence, AMBIG = ambiguous, N-A = test cannot be conducted, "
           "ERR = test failed to run.\n";
    if (!notes.empty()) out += "\n" + notes;
    return out;
}

std::string render_report(const AuditReport& report) {
    std::string out = "# tabaudit report\n\n";
    out += "- tool version: " + report.tool_version + "\n";
    out += "- adapter: `" + report.adapter + "`\n";
    out += "- cache: " + report.cache_mode + "\n";
    out += "- seed: " + std::to_string(report.seed) + "\n";
    out += "- distinct queries: " + std::to_string(report.queries) + "\n";
    out += "- adapter invocations: " + std::to_string(report.run.adapter_invocations) + "\n";
    out += "- started: " + report.run.started_at + ", finished: " + report.run.finished_at + "\n\n";
    out += "## Verdicts\n\n" + render_matrix(report);
    for (const auto& d : report.datasets) {
        out += "\n## " + d.name + "\n\n";
        out += "- model: `" + d.model + "`\n";
        out += "- rows: " + std::to_string(d.fingerprint.rows) + ", features: " +
               std::to_string(d.fingerprint.features) + ", sha256: `" + d.fingerprint.sha256 + "`\n";
        for (const auto& r : d.results) {
            out += "\n### " + title(r.name) + "\n\n";
            if (r.errored()) {
                out += "Error: " + *r.error + "\n";
                continue;
            }
            out += "- result: " + cell_token(r) + (r.verdict ? " (" + std::string(to_string(*r.verdict)) + ")" : "") +
                   "\n";
            out += "- headline: " + r.headline + "\n";
            out += "- queries: " + std::to_string(r.n_queries) + "\n";
            if (!r.rule.empty()) out += "- rule: " + r.rule + "\n";
            if (!r.statistics.empty()) {
                out += "\n| statistic | value |\n|---|---|\n";
                for (const auto& [k, v] : r.statistics) out += "| " + k + " | " + number(v) + " |\n";
            }
        }
    }
    return out;
}

void write_report(const AuditReport& report, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + out_dir.string() + ": " + ec.message());
    auto write = [&](const std::string& file, const std::string& text) {
        const auto path = out_dir / file;
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f || !(f << text) || !f.flush()) throw ConfigError("cannot write " + path.string());
    };
    write("report.json", to_json(report).dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n");
    write("report.md", render_report(report));
}

}  // namespace tabaudit::audit
