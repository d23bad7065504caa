#include <algorithm>
#include <cctype>
#include <numeric>

#include "tabaudit/dataset.hpp"

namespace tabaudit {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool is_pair_boundary(char c) {
    return c == ' ' || c == ',' || c == ':' || c == ';' || c == '\t' || c == '(' || c == '"';
}

struct PairMatch {
    std::size_t name_pos = 0;
    std::size_t value_pos = 0;
    std::size_t feature = 0;
};

std::string trim_value(const FeatureSpec& feature, std::string_view raw) {
    std::string_view v = trim(raw);
    while (!v.empty() && v.back() == ',') v = trim(v.substr(0, v.size() - 1));
    if (feature.observed(v)) return std::string(v);
    if (!v.empty() && (v.back() == '.' || v.back() == '!' || v.back() == '?')) {
        v = trim(v.substr(0, v.size() - 1));
    }
    return std::string(v);
}

}  // namespace

std::string fv_value(const FeatureSpec& feature, std::string_view value) {
    if (value.empty() || (feature.kind == FeatureKind::Numeric && value == feature.format.missing_token)) {
        return "nan";
    }
    return std::string(value);
}

std::string canonical_value(const FeatureSpec& feature, std::string_view text) {
    text = trim(text);
    if (feature.has_missing() && !feature.observed(text)) {
        const std::string l = lower(text);
        if (l == "nan" || l == "none" || l.empty()) return feature.format.missing_token;
    }
    return std::string(text);
}

std::string serialize_fv(const TabularDataset& dataset, const Row& row, std::span<const std::size_t> features) {
    std::string out;
    for (std::size_t k = 0; k < features.size(); ++k) {
        const std::size_t i = features[k];
        if (k) out += ", ";
        out += dataset.feature(i).name;
        out += " = ";
        out += fv_value(dataset.feature(i), row.values.at(i));
    }
    return out;
}

std::map<std::string, std::string> parse_fv_response(std::string_view text, std::span<const FeatureSpec> features) {
    std::vector<std::string> names;
    names.reserve(features.size());
    for (const auto& f : features) names.push_back(lower(f.name));
    // try longer names first so "Age" never shadows "AgeGroup"
    std::vector<std::size_t> order(features.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return names[a].size() > names[b].size(); });

    std::map<std::string, std::string> out;
    std::size_t line_start = 0;
    while (line_start <= text.size()) {
        std::size_t line_end = text.find('\n', line_start);
        if (line_end == std::string_view::npos) line_end = text.size();
        const std::string_view line = text.substr(line_start, line_end - line_start);
        const std::string lline = lower(line);

        std::vector<PairMatch> matches;
        std::size_t p = 0;
        while (p < lline.size()) {
            bool matched = false;
            if (p == 0 || is_pair_boundary(lline[p - 1])) {
                for (std::size_t idx : order) {
                    const std::string& n = names[idx];
                    if (n.empty() || lline.compare(p, n.size(), n) != 0) continue;
                    std::size_t q = p + n.size();
                    while (q < lline.size() && lline[q] == ' ') ++q;
                    if (q < lline.size() && lline[q] == '=') {
                        matches.push_back(PairMatch{p, q + 1, idx});
                        p = q + 1;
                        matched = true;
                        break;
                    }
                }
            }
            if (!matched) ++p;
        }

        for (std::size_t m = 0; m < matches.size(); ++m) {
            const std::size_t end = m + 1 < matches.size() ? matches[m + 1].name_pos : line.size();
            const auto& spec = features[matches[m].feature];
            const std::string value = trim_value(spec, line.substr(matches[m].value_pos, end - matches[m].value_pos));
            out.try_emplace(spec.name, value);
        }

        if (line_end == text.size()) break;
        line_start = line_end + 1;
    }
    return out;
}

}  // namespace tabaudit
