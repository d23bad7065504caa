#include <algorithm>
#include <cctype>
#include <cmath>

#include "tabaudit/error.hpp"
#include "tabaudit/simulators.hpp"

namespace tabaudit::llm {

namespace {

constexpr std::size_t kMinAnchor = 8;
constexpr std::size_t kMaxLines = 15;

enum class PromptKind { FeatureNames, Prediction, FeatureValues, Csv };

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool asks_for_feature_names(const ChatRequest& request) {
    for (const auto& m : request.messages) {
        if (m.role == Role::System && m.content.find("list the names of the features") != std::string::npos) return true;
    }
    return false;
}

// "IF a = 1, b = 2, THEN" -> "a = 1, b = 2"
std::string_view strip_rule(std::string_view text) {
    auto t = trim(text);
    if (!t.starts_with("IF ") || !t.ends_with("THEN")) return text;
    t.remove_prefix(3);
    t.remove_suffix(4);
    t = trim(t);
    if (t.ends_with(',')) t.remove_suffix(1);
    return t;
}

PromptKind classify(const ChatRequest& request, std::string_view text,
                    const std::map<std::string, std::string>& given) {
    if (asks_for_feature_names(request)) return PromptKind::FeatureNames;
    const auto t = trim(text);
    if (t.starts_with("IF ") && t.ends_with("THEN")) return PromptKind::Prediction;
    if (t.find("Feature Names:") != std::string_view::npos || t.find("Feature Values:") != std::string_view::npos ||
        !given.empty()) {
        return PromptKind::FeatureValues;
    }
    return PromptKind::Csv;
}

std::uint64_t request_stream_seed(std::uint64_t seed, const ChatRequest& request) {
    return derive_seed(seed, canonical_serialization(request), 0);
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string remaining_feature_names(const TabularDataset& ds, std::string_view text) {
    std::vector<std::string> given;
    const auto at = text.rfind("Feature Names:");
    if (at != std::string_view::npos) {
        std::string_view list = text.substr(at + 14);
        list = list.substr(0, list.find('\n'));
        while (!list.empty()) {
            const auto comma = list.find(',');
            const auto item = trim(list.substr(0, comma));
            if (!item.empty()) given.emplace_back(item);
            if (comma == std::string_view::npos) break;
            list.remove_prefix(comma + 1);
        }
    }
    std::vector<std::string> rest;
    for (const auto& f : ds.features()) {
        if (std::find(given.begin(), given.end(), f.name) == given.end()) rest.push_back(f.name);
    }
    return join(rest, ", ");
}

struct Condition {
    std::vector<std::pair<std::size_t, std::string>> pairs;  // feature, canonical value
    std::vector<std::size_t> open;                           // features not given, in order
};

Condition condition_of(const TabularDataset& ds, const std::map<std::string, std::string>& given) {
    Condition c;
    std::vector<bool> seen(ds.feature_count(), false);
    for (const auto& [name, text] : given) {
        const auto idx = ds.feature_index(name);
        if (!idx) continue;
        seen[*idx] = true;
        c.pairs.emplace_back(*idx, canonical_value(ds.feature(*idx), text));
    }
    std::sort(c.pairs.begin(), c.pairs.end());
    for (std::size_t f = 0; f < ds.feature_count(); ++f) {
        if (!seen[f]) c.open.push_back(f);
    }
    return c;
}

std::size_t agreement(const Row& row, const Condition& c) {
    std::size_t n = 0;
    for (const auto& [f, v] : c.pairs) n += row.values[f] == v;
    return n;
}

std::vector<std::size_t> matching_rows(const TabularDataset& ds, const Condition& c) {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        if (agreement(ds.row(r), c) == c.pairs.size()) out.push_back(r);
    }
    return out;
}

std::string fv_of_values(const TabularDataset& ds, const std::vector<std::string>& values,
                         const std::vector<std::size_t>& features) {
    std::string out;
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (i) out += ", ";
        const auto& spec = ds.feature(features[i]);
        out += spec.name;
        out += " = ";
        out += fv_value(spec, values[features[i]]);
    }
    return out;
}

std::string continuation_after(const std::string& file, std::string_view text, std::size_t max_chars) {
    if (text.size() < kMinAnchor) return {};
    const auto occurs = [&](std::size_t len) { return file.find(text.substr(text.size() - len)) != std::string::npos; };
    if (!occurs(kMinAnchor)) return {};
    std::size_t lo = kMinAnchor, hi = text.size();
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo + 1) / 2;
        if (occurs(mid)) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    const std::size_t pos = file.find(text.substr(text.size() - lo)) + lo;
    std::string_view rest(file);
    rest.remove_prefix(pos);
    if (rest.starts_with("\r\n")) {
        rest.remove_prefix(2);
    } else if (rest.starts_with("\n")) {
        rest.remove_prefix(1);
    }
    std::size_t end = 0, lines = 0;
    while (end < rest.size() && end < max_chars) {
        if (rest[end] == '\n' && ++lines == kMaxLines) break;
        ++end;
    }
    rest = rest.substr(0, end);
    if (rest.ends_with('\r')) rest.remove_suffix(1);
    return std::string(rest);
}

std::vector<std::string> learner_values(const SimulationContext& ctx, std::size_t base, Rng& rng) {
    const auto& ds = ctx.dataset();
    const auto unique = ctx.unique_feature();
    const std::size_t n = ds.row_count();
    auto redraw_unique = [&](std::vector<std::string>& values) {
        if (!unique) return;
        std::size_t other = uniform_index(rng, n - 1);
        if (other >= base) ++other;
        values[*unique] = ds.row(other).values[*unique];
    };

    std::vector<std::string> values = ds.row(base).values;
    redraw_unique(values);
    for (std::size_t f = 0; f < values.size(); ++f) {
        if (unique && f == *unique) continue;
        if (uniform_unit(rng) < 0.5) values[f] = ctx.neighbour(f, values[f]);
    }
    for (int attempt = 0; attempt < 64 && ctx.is_dataset_row(values); ++attempt) {
        redraw_unique(values);
        for (std::size_t f = 0; f < values.size(); ++f) {
            if (!(unique && f == *unique) && uniform_unit(rng) < 0.5) values[f] = ctx.neighbour(f, values[f]);
        }
    }
    return values;
}

std::string csv_of_values(const TabularDataset& ds, std::vector<std::string> values,
                          std::vector<csv::CellLayout> layout) {
    Row row;
    row.values = std::move(values);
    row.layout = std::move(layout);
    return ds.serialize_row(row);
}

}  // namespace

std::string_view to_string(SimulatorKind kind) {
    switch (kind) {
        case SimulatorKind::Verbatim: return "verbatim";
        case SimulatorKind::Marginal: return "marginal";
        case SimulatorKind::Learner: return "learner";
        case SimulatorKind::Noise: return "noise";
    }
    return "noise";
}

SimulatorKind simulator_from_string(std::string_view text) {
    if (text == "verbatim") return SimulatorKind::Verbatim;
    if (text == "marginal") return SimulatorKind::Marginal;
    if (text == "learner") return SimulatorKind::Learner;
    if (text == "noise") return SimulatorKind::Noise;
    throw ConfigError("unknown simulator '" + std::string(text) + "' (expected verbatim, marginal, learner or noise)");
}

SimulationContext::SimulationContext(const TabularDataset& dataset)
    : dataset_(dataset), file_(dataset.canonical_text()), unique_(most_unique_feature(dataset)),
      ladders_(dataset.feature_count()) {
    for (std::size_t f = 0; f < dataset.feature_count(); ++f) {
        if (dataset.feature(f).kind != FeatureKind::Numeric) continue;
        auto& ladder = ladders_[f];
        for (const auto& v : dataset.feature(f).observed_values) {
            if (auto x = parse_number(v)) ladder.emplace_back(*x, v);
        }
        std::stable_sort(ladder.begin(), ladder.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        ladder.erase(std::unique(ladder.begin(), ladder.end(),
                                 [](const auto& a, const auto& b) { return a.first == b.first; }),
                     ladder.end());
    }
    for (const auto& row : dataset.rows()) row_keys_.insert(join(row.values, "\x1f"));
}

bool SimulationContext::is_dataset_row(const std::vector<std::string>& values) const {
    return row_keys_.contains(join(values, "\x1f"));
}

bool SimulationContext::perturbable() const noexcept {
    if (unique_ && dataset_.feature(*unique_).observed_values.size() > 1) return true;
    return std::any_of(ladders_.begin(), ladders_.end(), [](const auto& l) { return l.size() > 1; });
}

const std::string& SimulationContext::neighbour(std::size_t feature, const std::string& value) const {
    const auto& ladder = ladders_.at(feature);
    const auto x = parse_number(value);
    if (ladder.size() < 2 || !x) return value;
    const auto it = std::lower_bound(ladder.begin(), ladder.end(), *x,
                                     [](const auto& entry, double v) { return entry.first < v; });
    if (it == ladder.end() || it->first != *x) return value;
    const std::size_t i = static_cast<std::size_t>(it - ladder.begin());
    if (i == 0) return ladder[1].second;
    if (i + 1 == ladder.size()) return ladder[i - 1].second;
    const double down = *x - ladder[i - 1].first;
    const double up = ladder[i + 1].first - *x;
    return up < down ? ladder[i + 1].second : ladder[i - 1].second;
}

std::string simulate_verbatim(const SimulationContext& ctx, const ChatRequest& request) {
    const auto& ds = ctx.dataset();
    const std::string_view text = last_user_content(request);
    const auto given = parse_fv_response(strip_rule(text), ds.features());
    switch (classify(request, text, given)) {
        case PromptKind::FeatureNames: return remaining_feature_names(ds, text);
        case PromptKind::Csv: {
            const std::size_t max_chars = static_cast<std::size_t>(std::max(request.max_tokens, 1)) * 4;
            return continuation_after(ctx.file_text(), text, max_chars);
        }
        case PromptKind::Prediction:
        case PromptKind::FeatureValues: break;
    }
    const Condition c = condition_of(ds, given);
    const auto rows = matching_rows(ds, c);
    if (rows.empty() || c.open.empty()) return {};
    std::size_t pick = rows.front();
    if (c.pairs.empty()) {
        // unconditional sampling: recall a row chosen by the request nonce
        Rng rng(request_stream_seed(0, request));
        pick = rows[uniform_index(rng, rows.size())];
    }
    const auto& row = ds.row(pick);
    if (classify(request, text, given) == PromptKind::Prediction) return row.values[c.open.front()];
    return serialize_fv(ds, row, c.open);
}

std::string simulate_marginal(const SimulationContext& ctx, const ChatRequest& request, Rng& rng) {
    const auto& ds = ctx.dataset();
    const std::string_view text = last_user_content(request);
    const auto given = parse_fv_response(strip_rule(text), ds.features());
    const PromptKind kind = classify(request, text, given);
    if (kind == PromptKind::FeatureNames) return remaining_feature_names(ds, text);
    if (kind == PromptKind::Csv) {
        std::vector<std::string> values(ds.feature_count());
        std::vector<csv::CellLayout> layout(ds.feature_count());
        for (std::size_t f = 0; f < ds.feature_count(); ++f) {
            const auto& row = ds.row(uniform_index(rng, ds.row_count()));
            values[f] = row.values[f];
            layout[f] = row.layout[f];
        }
        return csv_of_values(ds, std::move(values), std::move(layout));
    }
    const Condition c = condition_of(ds, given);
    if (c.open.empty()) return {};
    std::vector<std::string> values(ds.feature_count());
    for (std::size_t f : c.open) values[f] = marginal_sample(f, ds, rng);
    if (kind == PromptKind::Prediction) return values[c.open.front()];
    return fv_of_values(ds, values, c.open);
}

std::string simulate_learner(const SimulationContext& ctx, const ChatRequest& request, Rng& rng) {
    const auto& ds = ctx.dataset();
    if (!ctx.perturbable()) throw NoPerturbableFeature("dataset '" + ds.name() + "' has nothing the learner can redact");
    const std::string_view text = last_user_content(request);
    const auto given = parse_fv_response(strip_rule(text), ds.features());
    const PromptKind kind = classify(request, text, given);
    if (kind == PromptKind::FeatureNames) return remaining_feature_names(ds, text);
    if (kind == PromptKind::Csv) {
        const std::size_t base = uniform_index(rng, ds.row_count());
        return csv_of_values(ds, learner_values(ctx, base, rng), ds.row(base).layout);
    }
    const Condition c = condition_of(ds, given);
    if (c.open.empty()) return {};

    if (kind == PromptKind::Prediction) {
        // nearest neighbour on the given features, never the exact record
        std::size_t best_score = 0;
        std::optional<std::size_t> best;
        for (std::size_t r = 0; r < ds.row_count(); ++r) {
            const std::size_t score = agreement(ds.row(r), c);
            if (score == c.pairs.size() && !c.pairs.empty()) continue;
            if (!best || score > best_score) {
                best = r;
                best_score = score;
            }
        }
        if (!best) return marginal_sample(c.open.front(), ds, rng);
        return ds.row(*best).values[c.open.front()];
    }

    std::vector<std::size_t> candidates = matching_rows(ds, c);
    if (candidates.empty()) {
        std::size_t best_score = 0;
        for (std::size_t r = 0; r < ds.row_count(); ++r) {
            const std::size_t score = agreement(ds.row(r), c);
            if (score > best_score) {
                best_score = score;
                candidates.clear();
            }
            if (score == best_score) candidates.push_back(r);
        }
    }
    const std::size_t base = candidates[uniform_index(rng, candidates.size())];
    return fv_of_values(ds, learner_values(ctx, base, rng), c.open);
}

std::string simulate_verbatim(const TabularDataset& dataset, const ChatRequest& request) {
    return simulate_verbatim(SimulationContext(dataset), request);
}

std::string simulate_marginal(const TabularDataset& dataset, const ChatRequest& request, Rng& rng) {
    return simulate_marginal(SimulationContext(dataset), request, rng);
}

std::string simulate_learner(const TabularDataset& dataset, const ChatRequest& request, Rng& rng) {
    return simulate_learner(SimulationContext(dataset), request, rng);
}

std::string simulate_noise(const ChatRequest&) { return std::string(kRefusal); }

SimulatedModel::SimulatedModel(SimulatorKind kind, std::shared_ptr<const TabularDataset> dataset, std::uint64_t seed)
    : kind_(kind), dataset_(std::move(dataset)), seed_(seed) {
    if (kind_ != SimulatorKind::Noise) {
        if (!dataset_) throw ConfigError("simulator needs a dataset");
        context_ = std::make_unique<SimulationContext>(*dataset_);
        if (kind_ == SimulatorKind::Learner && !context_->perturbable()) {
            throw NoPerturbableFeature("dataset '" + dataset_->name() + "' has nothing the learner can redact");
        }
    }
}

std::string SimulatedModel::identity() const {
    std::string id = "sim-" + std::string(to_string(kind_));
    if (dataset_) id += ":" + dataset_->name();
    id += "#" + std::to_string(seed_);
    return id;
}

std::string SimulatedModel::complete(const ChatRequest& request) {
    Rng rng(request_stream_seed(seed_, request));
    switch (kind_) {
        case SimulatorKind::Verbatim: return simulate_verbatim(*context_, request);
        case SimulatorKind::Marginal: return simulate_marginal(*context_, request, rng);
        case SimulatorKind::Learner: return simulate_learner(*context_, request, rng);
        case SimulatorKind::Noise: return simulate_noise(request);
    }
    return {};
}

}  // namespace tabaudit::llm
