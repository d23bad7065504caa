#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "tabaudit/audit.hpp"
#include "tabaudit/error.hpp"
#include "tabaudit/simulators.hpp"

namespace tabaudit::audit {

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::string> split_list(std::string_view text, bool commas) {
    std::vector<std::string> out;
    std::string current;
    auto flush = [&] {
        auto t = trim(current);
        current.clear();
        if (!t.empty()) out.push_back(std::move(t));
    };
    for (char c : text) {
        if (c == '\n' || (commas && c == ',')) {
            flush();
        } else {
            current.push_back(c);
        }
    }
    flush();
    return out;
}

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
    throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

// Parses one TOML scalar starting at text[pos]; advances pos past it.
std::string parse_scalar(std::string_view text, std::size_t& pos, std::size_t line) {
    if (pos >= text.size()) fail_line(line, "missing value");
    const char q = text[pos];
    if (q == '"' || q == '\'') {
        std::string out;
        for (++pos; pos < text.size(); ++pos) {
            char c = text[pos];
            if (c == q) {
                ++pos;
                return out;
            }
            if (q == '"' && c == '\\') {
                if (++pos >= text.size()) break;
                switch (text[pos]) {
                    case 'n': c = '\n'; break;
                    case 't': c = '\t'; break;
                    case '"': c = '"'; break;
                    case '\\': c = '\\'; break;
                    default: fail_line(line, "unsupported escape");
                }
            }
            out.push_back(c);
        }
        fail_line(line, "unterminated string");
    }
    const std::size_t start = pos;
    while (pos < text.size() && text[pos] != ',' && text[pos] != ']' && text[pos] != '#') ++pos;
    auto token = trim(text.substr(start, pos - start));
    if (token.empty()) fail_line(line, "missing value");
    for (char c : token) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-' && c != '+' && c != '_') {
            fail_line(line, "bare value '" + token + "' must be a number or boolean; quote strings");
        }
    }
    return token;
}

void skip_space(std::string_view text, std::size_t& pos) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
}

void expect_end(std::string_view text, std::size_t pos, std::size_t line) {
    skip_space(text, pos);
    if (pos < text.size() && text[pos] != '#') fail_line(line, "unexpected text after value");
}

template <class T>
T parse_integer(const std::string& key, const std::string& value) {
    T out{};
    const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || end != value.data() + value.size()) {
        throw ConfigError("setting '" + key + "' needs a non-negative integer, got '" + value + "'");
    }
    return out;
}

double parse_real(const std::string& key, const std::string& value) {
    const auto x = parse_number(value);
    if (!x) throw ConfigError("setting '" + key + "' needs a number, got '" + value + "'");
    return *x;
}

// Returns false when the key is not a test setting.
bool apply_test_setting(battery::TestConfig& t, const std::string& key, const std::string& value) {
    if (key == "trials") t.trials = parse_integer<std::size_t>(key, value);
    else if (key == "memorization_temperature") t.memorization_temperature = parse_real(key, value);
    else if (key == "zk_temperature") t.zk_temperature = parse_real(key, value);
    else if (key == "distribution_temperature") t.distribution_temperature = parse_real(key, value);
    else if (key == "seed") t.seed = parse_integer<std::uint64_t>(key, value);
    else if (key == "parallelism") t.parallelism = parse_integer<std::size_t>(key, value);
    else if (key == "window") t.window = parse_integer<std::size_t>(key, value);
    else if (key == "feature_value_samples") t.feature_value_samples = parse_integer<std::size_t>(key, value);
    else if (key == "distribution_samples") t.distribution_samples = parse_integer<std::size_t>(key, value);
    else if (key == "correlation_samples") t.correlation_samples = parse_integer<std::size_t>(key, value);
    else if (key == "provenance_samples") t.provenance_samples = parse_integer<std::size_t>(key, value);
    else if (key == "completion_shots") t.completion_shots = parse_integer<std::size_t>(key, value);
    else if (key == "prediction_shots") t.prediction_shots = parse_integer<std::size_t>(key, value);
    else if (key == "prediction_target") t.prediction_target = value;
    else if (key == "persona") t.persona.persona = value;
    else if (key == "persona_label") t.persona.dataset_label = value;
    else if (key == "persona_task") t.persona.task = value;
    else return false;
    return true;
}

}  // namespace

std::string_view tool_version() { return TABAUDIT_VERSION; }

const std::vector<std::string>& all_tests() {
    static const std::vector<std::string> tests = {
        "feature_names",  "feature_values", "feature_distribution", "conditional_distribution",
        "conditional_completion", "header", "row_completion", "feature_completion",
        "first_token",    "prediction",     "provenance",
    };
    return tests;
}

bool is_known_test(std::string_view name) {
    const auto& t = all_tests();
    return std::find(t.begin(), t.end(), name) != t.end();
}

AdapterSpec AdapterSpec::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw ConfigError("adapter '" + std::string(text) + "' must be http:URL, sim:NAME or replay:PATH");
    }
    const auto scheme = text.substr(0, colon);
    const auto rest = text.substr(colon + 1);
    if (rest.empty()) throw ConfigError("adapter '" + std::string(text) + "' has no target");
    AdapterSpec spec;
    spec.target = std::string(rest);
    if (scheme == "http") {
        spec.kind = Kind::Http;
    } else if (scheme == "replay") {
        spec.kind = Kind::Replay;
    } else if (scheme == "sim") {
        spec.kind = Kind::Simulator;
        const auto sep = rest.find(':');
        if (sep != std::string_view::npos) {
            spec.target = std::string(rest.substr(0, sep));
            spec.seed = parse_integer<std::uint64_t>("adapter seed", std::string(rest.substr(sep + 1)));
        }
        llm::simulator_from_string(spec.target);
    } else {
        throw ConfigError("unknown adapter kind '" + std::string(scheme) + "'");
    }
    return spec;
}

std::string AdapterSpec::to_string() const {
    switch (kind) {
        case Kind::Http: return "http:" + target;
        case Kind::Replay: return "replay:" + target;
        case Kind::Simulator: return "sim:" + target + (seed ? ":" + std::to_string(*seed) : "");
    }
    return target;
}

Settings parse_config_text(std::string_view text) {
    Settings out;
    std::string section;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            const auto close = line.find(']');
            if (close == std::string::npos) fail_line(line_no, "unterminated section header");
            expect_end(line, close + 1, line_no);
            section = trim(std::string_view(line).substr(1, close - 1));
            if (!section.starts_with("test.") || !is_known_test(section.substr(5))) {
                fail_line(line_no, "unknown section [" + section + "]; only [test.NAME] sections are allowed");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail_line(line_no, "expected key = value");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        if (key.empty()) fail_line(line_no, "empty key");
        std::string_view rest(line);
        std::size_t pos = eq + 1;
        skip_space(rest, pos);
        std::string value;
        if (pos < rest.size() && rest[pos] == '[') {
            ++pos;
            std::vector<std::string> items;
            for (;;) {
                skip_space(rest, pos);
                if (pos < rest.size() && rest[pos] == ']') {
                    ++pos;
                    break;
                }
                items.push_back(parse_scalar(rest, pos, line_no));
                skip_space(rest, pos);
                if (pos < rest.size() && rest[pos] == ',') {
                    ++pos;
                } else if (pos < rest.size() && rest[pos] == ']') {
                    ++pos;
                    break;
                } else {
                    fail_line(line_no, "unterminated array");
                }
            }
            for (std::size_t i = 0; i < items.size(); ++i) value += (i ? "\n" : "") + items[i];
        } else {
            value = parse_scalar(rest, pos, line_no);
        }
        expect_end(rest, pos, line_no);
        const std::string full = section.empty() ? key : section + "." + key;
        if (out.contains(full)) fail_line(line_no, "duplicate key '" + full + "'");
        out[full] = value;
    }
    return out;
}

Settings load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void apply_settings(AuditConfig& cfg, const Settings& settings) {
    for (const auto& [key, value] : settings) {
        if (key.starts_with("test.")) {
            const auto dot = key.find('.', 5);
            const std::string test = key.substr(5, dot == std::string::npos ? std::string::npos : dot - 5);
            if (dot == std::string::npos || !is_known_test(test)) {
                throw ConfigError("setting '" + key + "' must look like test.NAME.key with a known test name");
            }
            const std::string sub = key.substr(dot + 1);
            battery::TestConfig probe;
            if (!apply_test_setting(probe, sub, value)) throw ConfigError("unknown test setting '" + sub + "'");
            cfg.per_test[test][sub] = value;
        } else if (key == "dataset" || key == "datasets") {
            cfg.datasets.clear();
            for (const auto& p : split_list(value, false)) cfg.datasets.emplace_back(p);
        } else if (key == "adapter") {
            cfg.adapter = AdapterSpec::parse(value);
        } else if (key == "tests") {
            cfg.tests = split_list(value, true);
            if (cfg.tests.size() == 1 && cfg.tests[0] == "all") cfg.tests.clear();
        } else if (key == "out") {
            cfg.out_dir = value;
        } else if (key == "cache") {
            cfg.cache = llm::cache_mode_from_string(value);
        } else if (key == "cache_file") {
            cfg.cache_file = value;
        } else if (key == "budget") {
            cfg.budget = parse_integer<std::size_t>(key, value);
        } else if (key == "pool") {
            cfg.pool = value;
        } else if (key == "model") {
            cfg.model = value;
        } else if (!apply_test_setting(cfg.test, key, value)) {
            throw ConfigError("unknown setting '" + key + "'");
        }
    }
}

void AuditConfig::validate() const {
    if (datasets.empty()) throw ConfigError("no dataset given");
    if (!adapter) throw ConfigError("no adapter given");
    if (adapter->kind == AdapterSpec::Kind::Http && model.empty()) {
        throw ConfigError("an http adapter needs a model name");
    }
    if (adapter->kind == AdapterSpec::Kind::Replay && cache == llm::CacheMode::Off) {
        throw ConfigError("a replay adapter cannot run with the cache off");
    }
    for (const auto& t : tests) {
        if (!is_known_test(t)) throw ConfigError("unknown test '" + t + "'");
    }
    test.validate();
    for (const auto& [name, _] : per_test) config_for(name).validate();
}

std::vector<std::string> AuditConfig::selected_tests() const {
    if (tests.empty()) return all_tests();
    std::vector<std::string> out;
    for (const auto& t : all_tests()) {
        if (std::find(tests.begin(), tests.end(), t) != tests.end()) out.push_back(t);
    }
    return out;
}

battery::TestConfig AuditConfig::config_for(const std::string& name) const {
    battery::TestConfig out = test;
    const auto it = per_test.find(name);
    if (it != per_test.end()) {
        for (const auto& [key, value] : it->second) apply_test_setting(out, key, value);
    }
    return out;
}

std::filesystem::path AuditConfig::cache_path() const {
    if (adapter && adapter->kind == AdapterSpec::Kind::Replay) return adapter->target;
    return cache_file.value_or(out_dir / "transcripts.jsonl");
}

}  // namespace tabaudit::audit
