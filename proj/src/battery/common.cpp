#include <charconv>
#include <cmath>

#include "tabaudit/battery.hpp"
#include "tabaudit/error.hpp"

namespace tabaudit::battery {

namespace {

std::string shortest(double x) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc() ? std::string(buf, end) : std::to_string(x);
}

}  // namespace

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Evidence: return "Evidence";
        case Verdict::AbsenceOfEvidence: return "AbsenceOfEvidence";
        case Verdict::Ambiguous: return "Ambiguous";
        case Verdict::NotApplicable: return "NotApplicable";
    }
    return "NotApplicable";
}

Verdict verdict_from_string(std::string_view text) {
    if (text == "Evidence") return Verdict::Evidence;
    if (text == "AbsenceOfEvidence") return Verdict::AbsenceOfEvidence;
    if (text == "Ambiguous") return Verdict::Ambiguous;
    if (text == "NotApplicable") return Verdict::NotApplicable;
    throw Error("unknown verdict '" + std::string(text) + "'");
}

void TestConfig::validate() const {
    if (trials == 0) throw ConfigError("trials must be at least 1");
    for (double t : {memorization_temperature, zk_temperature, distribution_temperature}) {
        if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("temperatures must be finite and non-negative");
    }
    if (parallelism == 0) throw ConfigError("parallelism must be at least 1");
    if (window == 0) throw ConfigError("row-completion window must be at least 1");
    if (feature_value_samples == 0 || distribution_samples == 0 || correlation_samples == 0 ||
        provenance_samples == 0) {
        throw ConfigError("sample counts must be at least 1");
    }
}

nlohmann::json to_json(const TestResult& r) {
    nlohmann::json stats = nlohmann::json::object();
    for (const auto& [k, v] : r.statistics) stats[k] = v;
    return {
        {"name", r.name},
        {"n_queries", r.n_queries},
        {"statistics", std::move(stats)},
        {"verdict", r.verdict ? nlohmann::json(std::string(to_string(*r.verdict))) : nlohmann::json(nullptr)},
        {"error", r.error ? nlohmann::json(*r.error) : nlohmann::json(nullptr)},
        {"headline", r.headline},
        {"rule", r.rule},
        {"digests", r.digests},
        {"details", r.details},
    };
}

TestResult test_result_from_json(const nlohmann::json& j) {
    TestResult r;
    r.name = j.at("name").get<std::string>();
    r.n_queries = j.at("n_queries").get<std::size_t>();
    for (const auto& [k, v] : j.at("statistics").items()) r.statistics[k] = v.get<double>();
    if (!j.at("verdict").is_null()) r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    if (!j.at("error").is_null()) r.error = j.at("error").get<std::string>();
    r.headline = j.at("headline").get<std::string>();
    r.rule = j.at("rule").get<std::string>();
    r.digests = j.at("digests").get<std::vector<std::string>>();
    r.details = j.at("details");
    return r;
}

QueryBatch run_queries(llm::ModelAdapter& adapter, const std::vector<llm::ChatRequest>& requests,
                       const TestConfig& cfg) {
    QueryBatch batch;
    const std::string identity = adapter.identity();
    batch.digests.reserve(requests.size());
    for (const auto& r : requests) {
        llm::validate(r);
        batch.digests.push_back(llm::request_digest(identity, r));
    }
    batch.responses = llm::complete_all(adapter, requests, cfg.parallelism);
    return batch;
}

Rng trial_rng(const TestConfig& cfg, std::string_view stream, std::uint64_t index) {
    return Rng(derive_seed(cfg.seed, stream, index));
}

std::vector<llm::ChatRequest> zk_sample_requests(const TabularDataset& dataset, const prompt::FewShotPool& pool,
                                                 double temperature, std::size_t n, const TestConfig& cfg) {
    const auto base = prompt::build_zk_sample(dataset, pool, temperature).request;
    const std::string stream = "zk_sample:" + shortest(temperature);
    std::vector<llm::ChatRequest> out(n, base);
    for (std::size_t i = 0; i < n; ++i) out[i].seed = derive_seed(cfg.seed, stream, i);
    return out;
}

ParsedSample parse_sample(const TabularDataset& dataset, std::string_view response) {
    const auto pairs = parse_fv_response(response, dataset.features());
    ParsedSample out(dataset.feature_count());
    for (std::size_t f = 0; f < dataset.feature_count(); ++f) {
        const auto& spec = dataset.feature(f);
        const auto it = pairs.find(spec.name);
        if (it != pairs.end()) out[f] = canonical_value(spec, it->second);
    }
    return out;
}

std::size_t present_count(const ParsedSample& s) {
    std::size_t n = 0;
    for (const auto& v : s) n += v.has_value();
    return n;
}

bool parseable(const ParsedSample& s) { return !s.empty() && 2 * present_count(s) >= s.size(); }

std::string first_line(std::string_view response) {
    while (!response.empty()) {
        const auto nl = response.find('\n');
        std::string_view line = response.substr(0, nl);
        if (line.ends_with('\r')) line.remove_suffix(1);
        if (line.find_first_not_of(" \t") != std::string_view::npos) return std::string(line);
        if (nl == std::string_view::npos) break;
        response.remove_prefix(nl + 1);
    }
    return {};
}

// --- verdict rules ------------------------------------------------------------

Verdict feature_names_verdict(std::size_t matched, std::size_t expected, bool exact) {
    if (exact) return Verdict::Evidence;
    if (expected > 0 && static_cast<double>(matched) >= 0.8 * static_cast<double>(expected)) return Verdict::Ambiguous;
    return Verdict::AbsenceOfEvidence;
}

Verdict feature_values_verdict(double validity) {
    if (validity >= 0.9) return Verdict::Evidence;
    if (validity >= 0.5) return Verdict::Ambiguous;
    return Verdict::AbsenceOfEvidence;
}

Verdict feature_distribution_verdict(double agreement) {
    if (agreement >= 0.5) return Verdict::Evidence;
    if (agreement >= 0.3) return Verdict::Ambiguous;
    return Verdict::AbsenceOfEvidence;
}

Verdict conditional_distribution_verdict(double sign_agreement) {
    if (sign_agreement >= 0.8) return Verdict::Evidence;
    if (sign_agreement >= 0.6) return Verdict::Ambiguous;
    return Verdict::AbsenceOfEvidence;
}

Verdict conditional_completion_verdict(const std::vector<std::pair<double, double>>& p_values) {
    bool better = false, worse = false;
    for (const auto& [greater, less] : p_values) {
        better = better || greater < 0.01;
        worse = worse || less < 0.01;
    }
    if (better && worse) return Verdict::Ambiguous;
    if (better) return Verdict::Evidence;
    return Verdict::AbsenceOfEvidence;
}

Verdict header_verdict(double best_lines) {
    if (best_lines >= 1.5) return Verdict::Evidence;
    if (best_lines >= 0.5) return Verdict::Ambiguous;
    return Verdict::AbsenceOfEvidence;
}

Verdict row_completion_verdict(double exact_rate, double duplicate_baseline, double similarity_p) {
    if (exact_rate >= std::max(0.10, 3.0 * duplicate_baseline)) return Verdict::Evidence;
    if (exact_rate >= 0.02 && similarity_p < 0.01) return Verdict::Evidence;
    if (exact_rate >= 0.02) return Verdict::Ambiguous;
    return Verdict::AbsenceOfEvidence;
}

Verdict feature_completion_verdict(double exact_rate) {
    if (exact_rate >= 0.25) return Verdict::Evidence;
    if (exact_rate >= 0.10) return Verdict::Ambiguous;
    return Verdict::AbsenceOfEvidence;
}

Verdict first_token_verdict(double accuracy, double baseline, double binomial_p) {
    if (binomial_p >= 0.01) return Verdict::AbsenceOfEvidence;
    return accuracy - baseline >= 0.05 ? Verdict::Evidence : Verdict::Ambiguous;
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> out;
    for (;;) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        if (line.ends_with('\r')) line.remove_suffix(1);
        out.push_back(line);
        if (nl == std::string_view::npos) break;
        text.remove_prefix(nl + 1);
    }
    return out;
}

}  // namespace

double header_score(std::string_view response, std::string_view continuation) {
    const auto got = split_lines(response);
    const auto want = split_lines(continuation);
    if (want.empty() || want[0].empty() || got[0] != want[0]) return 0.0;
    double score = 0.5;
    for (std::size_t i = 1; i < got.size() && i < want.size(); ++i) {
        if (want[i].empty() || got[i] != want[i]) break;
        score += 1.0;
    }
    return score;
}

std::optional<std::size_t> first_token_length(const std::vector<std::string>& lines) {
    if (lines.empty()) return std::nullopt;
    std::size_t longest = 0;
    for (const auto& l : lines) longest = std::max(longest, l.size());
    for (std::size_t len = 1; len <= longest; ++len) {
        std::unordered_map<std::string_view, std::size_t> counts;
        std::size_t mode = 0;
        for (const auto& l : lines) mode = std::max(mode, ++counts[std::string_view(l).substr(0, len)]);
        if (static_cast<double>(mode) <= 0.9 * static_cast<double>(lines.size())) return len;
    }
    return std::nullopt;
}

}  // namespace tabaudit::battery
