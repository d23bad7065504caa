#include <algorithm>
#include <cmath>

#include "tabaudit/error.hpp"
#include "tabaudit/stats.hpp"

namespace tabaudit::stats {

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw ArityMismatch("pearson on vectors of different length");
    if (xs.size() < 2) throw ArityMismatch("pearson needs at least two observations");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) throw ConstantInput("pearson on a constant vector");
    const double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

NumericTable numeric_table(const TabularDataset& dataset) {
    NumericTable table;
    table.reserve(dataset.row_count());
    for (const auto& row : dataset.rows()) {
        std::vector<std::optional<double>> cells(dataset.feature_count());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (row.parsed[c].type == ValueType::Number) cells[c] = row.parsed[c].number;
        }
        table.push_back(std::move(cells));
    }
    return table;
}

NumericTable numeric_table(const std::vector<std::vector<std::string>>& rows, const TabularDataset& dataset) {
    NumericTable table;
    table.reserve(rows.size());
    for (const auto& row : rows) {
        std::vector<std::optional<double>> cells(dataset.feature_count());
        for (std::size_t c = 0; c < cells.size() && c < row.size(); ++c) {
            if (dataset.feature(c).kind == FeatureKind::Numeric) cells[c] = parse_number(row[c]);
        }
        table.push_back(std::move(cells));
    }
    return table;
}

CorrelationMatrix correlation_matrix(const NumericTable& table, std::span<const std::size_t> columns) {
    const std::size_t k = columns.size();
    CorrelationMatrix m(k, std::vector<std::optional<double>>(k));
    for (std::size_t i = 0; i < k; ++i) {
        m[i][i] = 1.0;
        for (std::size_t j = i + 1; j < k; ++j) {
            std::vector<double> xs, ys;
            for (const auto& row : table) {
                const auto& a = columns[i] < row.size() ? row[columns[i]] : std::nullopt;
                const auto& b = columns[j] < row.size() ? row[columns[j]] : std::nullopt;
                if (a && b) {
                    xs.push_back(*a);
                    ys.push_back(*b);
                }
            }
            std::optional<double> r;
            try {
                r = pearson(xs, ys);
            } catch (const Error&) {
                r = std::nullopt;
            }
            m[i][j] = r;
            m[j][i] = r;
        }
    }
    return m;
}

}  // namespace tabaudit::stats
