#include <limits>

#include "tabaudit/error.hpp"
#include "tabaudit/stats.hpp"

namespace tabaudit::stats {

namespace {

constexpr std::uint32_t kUnseen = std::numeric_limits<std::uint32_t>::max();

std::string row_key(std::span<const std::string> values) {
    std::string key;
    for (const auto& v : values) {
        key += v;
        key.push_back('\x1f');
    }
    return key;
}

}  // namespace

MatchIndex::MatchIndex(const TabularDataset& dataset)
    : rows_(dataset.row_count()), features_(dataset.feature_count()), dictionaries_(features_) {
    codes_.reserve(rows_ * features_);
    for (std::size_t r = 0; r < rows_; ++r) {
        const auto& values = dataset.row(r).values;
        for (std::size_t f = 0; f < features_; ++f) {
            auto& dict = dictionaries_[f];
            auto [it, inserted] = dict.try_emplace(values[f], static_cast<std::uint32_t>(dict.size()));
            codes_.push_back(it->second);
        }
        row_keys_.try_emplace(row_key(values), r);
    }
}

std::size_t MatchIndex::best_match(std::span<const std::string> candidate, std::optional<std::size_t> exclude) const {
    if (candidate.size() != features_) {
        throw ArityMismatch("candidate has " + std::to_string(candidate.size()) + " values, dataset has " +
                            std::to_string(features_) + " features");
    }
    std::vector<std::uint32_t> probe(features_);
    for (std::size_t f = 0; f < features_; ++f) {
        const auto it = dictionaries_[f].find(candidate[f]);
        probe[f] = it == dictionaries_[f].end() ? kUnseen : it->second;
    }
    std::size_t best = 0;
    for (std::size_t r = 0; r < rows_; ++r) {
        if (exclude && *exclude == r) continue;
        const std::uint32_t* row = codes_.data() + r * features_;
        std::size_t matches = 0;
        for (std::size_t f = 0; f < features_; ++f) matches += row[f] == probe[f];
        if (matches > best) {
            best = matches;
            if (best == features_) break;
        }
    }
    return best;
}

bool MatchIndex::contains_row(std::span<const std::string> candidate) const {
    return candidate.size() == features_ && row_keys_.contains(row_key(candidate));
}

bool MatchIndex::contains_value(std::size_t feature, std::string_view value) const {
    return dictionaries_.at(feature).contains(std::string(value));
}

double MatchIndex::mean_self_match() const {
    if (rows_ < 2) return 0.0;
    // match counts are symmetric, so each pair is compared once
    std::vector<std::size_t> best(rows_, 0);
    for (std::size_t i = 0; i < rows_; ++i) {
        const std::uint32_t* a = codes_.data() + i * features_;
        std::size_t best_i = best[i];
        for (std::size_t j = i + 1; j < rows_; ++j) {
            const std::uint32_t* b = codes_.data() + j * features_;
            std::size_t matches = 0;
            for (std::size_t f = 0; f < features_; ++f) matches += a[f] == b[f];
            if (matches > best_i) best_i = matches;
            if (matches > best[j]) best[j] = matches;
        }
        best[i] = best_i;
    }
    double total = 0.0;
    for (std::size_t b : best) total += static_cast<double>(b);
    return total / static_cast<double>(rows_);
}

std::size_t best_match_count(std::span<const std::string> candidate, const TabularDataset& dataset,
                             std::optional<std::size_t> exclude) {
    return MatchIndex(dataset).best_match(candidate, exclude);
}

ProvenanceStats provenance_stats(const std::vector<std::vector<std::string>>& samples, const TabularDataset& dataset) {
    ProvenanceStats out;
    out.samples = samples.size();
    out.features = dataset.feature_count();
    if (samples.empty()) throw ArityMismatch("provenance_stats needs at least one sample");

    const MatchIndex index(dataset);
    std::size_t copied_rows = 0;
    std::size_t copied_values = 0;
    double match_total = 0.0;
    for (const auto& sample : samples) {
        match_total += static_cast<double>(index.best_match(sample));
        if (index.contains_row(sample)) ++copied_rows;
        for (std::size_t f = 0; f < sample.size(); ++f) {
            if (index.contains_value(f, sample[f])) ++copied_values;
        }
    }
    const double n = static_cast<double>(samples.size());
    out.copied_row_fraction = static_cast<double>(copied_rows) / n;
    out.mean_best_match = match_total / n;
    out.copied_value_fraction = static_cast<double>(copied_values) / (n * static_cast<double>(out.features));
    return out;
}

}  // namespace tabaudit::stats
