#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tabaudit/dataset.hpp"

namespace tabaudit::stats {

// --- string similarity -----------------------------------------------------

/// Unit-cost edit distance over bytes.
std::size_t levenshtein(std::string_view a, std::string_view b);

/// 1 - levenshtein / max length; 1 for two empty strings.
double similarity(std::string_view a, std::string_view b);

// --- hypothesis tests --------------------------------------------------------

enum class Alternative { TwoSided, Greater };

struct TTestResult {
    double t_statistic = 0.0;
    double degrees_of_freedom = 0.0;
    double p_value = 1.0;
    Alternative alternative = Alternative::TwoSided;
};

/// Welch's unequal-variance t-test. `Greater` tests mean(xs) > mean(ys).
/// Throws DegenerateSample when either side has fewer than two values or
/// both variances are zero.
TTestResult welch_t_test(std::span<const double> xs, std::span<const double> ys,
                         Alternative alternative = Alternative::TwoSided);

/// One-sided p-value for mean(xs) > mean(ys) that stays defined when both
/// samples are constant: 0 if the constant means already differ in the
/// tested direction, 1 otherwise.
double one_sided_p(std::span<const double> xs, std::span<const double> ys);

/// P(X >= successes) for X ~ Binomial(n, p).
double binomial_upper_p(std::size_t successes, std::size_t n, double p);

struct Interval {
    double low = 0.0;
    double high = 1.0;
    double level = 0.95;
};

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::size_t successes, std::size_t n, double level = 0.95);

// --- correlation -------------------------------------------------------------

/// Sample Pearson correlation. Throws ArityMismatch on unequal or short
/// input and ConstantInput when either side has zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

/// Rows of optional numbers; nullopt marks a missing cell.
using NumericTable = std::vector<std::vector<std::optional<double>>>;

NumericTable numeric_table(const TabularDataset& dataset);

/// Parse model-produced rows against the dataset's numeric features.
NumericTable numeric_table(const std::vector<std::vector<std::string>>& rows, const TabularDataset& dataset);

/// Pairwise-complete correlation matrix over the given columns. The diagonal
/// is exactly 1; entries are nullopt where fewer than two complete pairs
/// exist or a column is constant on them.
using CorrelationMatrix = std::vector<std::vector<std::optional<double>>>;
CorrelationMatrix correlation_matrix(const NumericTable& table, std::span<const std::size_t> columns);

// --- provenance --------------------------------------------------------------

/// Positions where the candidate's canonical values equal those of the
/// closest dataset row, optionally ignoring one row. Throws ArityMismatch.
std::size_t best_match_count(std::span<const std::string> candidate, const TabularDataset& dataset,
                             std::optional<std::size_t> exclude = std::nullopt);

/// Dictionary-encoded copy of a dataset for repeated row matching.
class MatchIndex {
public:
    explicit MatchIndex(const TabularDataset& dataset);

    [[nodiscard]] std::size_t best_match(std::span<const std::string> candidate,
                                         std::optional<std::size_t> exclude = std::nullopt) const;
    [[nodiscard]] bool contains_row(std::span<const std::string> candidate) const;
    [[nodiscard]] bool contains_value(std::size_t feature, std::string_view value) const;

    /// Mean over rows of best_match against all other rows.
    [[nodiscard]] double mean_self_match() const;

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t features() const noexcept { return features_; }

private:
    std::size_t rows_ = 0;
    std::size_t features_ = 0;
    std::vector<std::unordered_map<std::string, std::uint32_t>> dictionaries_;
    std::vector<std::uint32_t> codes_;  // row-major
    std::unordered_map<std::string, std::size_t> row_keys_;
};

struct ProvenanceStats {
    double copied_row_fraction = 0.0;
    double mean_best_match = 0.0;
    double copied_value_fraction = 0.0;
    std::size_t samples = 0;
    std::size_t features = 0;
};

ProvenanceStats provenance_stats(const std::vector<std::vector<std::string>>& samples, const TabularDataset& dataset);

// --- baselines ---------------------------------------------------------------

/// Most frequent value; ties go to the value seen first.
template <class T>
T mode_value(std::span<const T> values) {
    std::unordered_map<T, std::size_t> counts;
    std::vector<T> order;
    for (const auto& v : values) {
        auto [it, inserted] = counts.try_emplace(v, 0);
        if (inserted) order.push_back(v);
        ++it->second;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (counts[order[i]] > counts[order[best]]) best = i;
    }
    return order.at(best);
}

template <class T>
T mode_value(const std::vector<T>& values) {
    return mode_value(std::span<const T>(values));
}

struct LogisticOptions {
    int iterations = 2000;
    double step = 0.1;
    double l2 = 1e-4;
};

/// Multinomial logistic regression fitted by full-batch gradient descent on
/// standardized features.
class LogisticModel {
public:
    static LogisticModel fit(const std::vector<std::vector<double>>& features, const std::vector<std::string>& labels,
                             const LogisticOptions& options = {});

    [[nodiscard]] std::string predict(std::span<const double> features) const;
    [[nodiscard]] std::vector<std::string> predict(const std::vector<std::vector<double>>& features) const;

    /// Set when training saw a single class; the model then predicts it always.
    [[nodiscard]] bool single_class() const noexcept { return classes_.size() == 1; }
    [[nodiscard]] const std::vector<std::string>& classes() const noexcept { return classes_; }

private:
    std::vector<std::string> classes_;
    std::vector<double> mean_;
    std::vector<double> scale_;
    std::vector<double> weights_;  // classes x (features + 1), bias last
};

struct LogisticPrediction {
    std::vector<std::string> labels;
    bool single_class = false;
};

LogisticPrediction logistic_baseline(const std::vector<std::vector<double>>& train_features,
                                     const std::vector<std::string>& train_labels,
                                     const std::vector<std::vector<double>>& test_features,
                                     const LogisticOptions& options = {});

/// Held-out accuracy of logistic_baseline over `folds` seeded folds.
double cross_validated_accuracy(const std::vector<std::vector<double>>& features,
                                const std::vector<std::string>& labels, std::size_t folds, std::uint64_t seed,
                                const LogisticOptions& options = {});

}  // namespace tabaudit::stats
