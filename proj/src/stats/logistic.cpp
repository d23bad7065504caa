#include <algorithm>
#include <cmath>
#include <numeric>

#include "tabaudit/error.hpp"
#include "tabaudit/rng.hpp"
#include "tabaudit/stats.hpp"

namespace tabaudit::stats {

LogisticModel LogisticModel::fit(const std::vector<std::vector<double>>& features,
                                 const std::vector<std::string>& labels, const LogisticOptions& options) {
    if (features.size() != labels.size()) throw ArityMismatch("feature rows and labels differ in length");
    if (labels.empty()) throw ArityMismatch("logistic regression needs training data");

    LogisticModel model;
    model.classes_ = labels;
    std::sort(model.classes_.begin(), model.classes_.end());
    model.classes_.erase(std::unique(model.classes_.begin(), model.classes_.end()), model.classes_.end());

    const std::size_t n = features.size();
    const std::size_t d = features.front().size();
    model.mean_.assign(d, 0.0);
    model.scale_.assign(d, 1.0);
    for (const auto& x : features) {
        if (x.size() != d) throw ArityMismatch("ragged feature matrix");
        for (std::size_t j = 0; j < d; ++j) model.mean_[j] += x[j];
    }
    for (auto& m : model.mean_) m /= static_cast<double>(n);
    for (std::size_t j = 0; j < d; ++j) {
        double ss = 0.0;
        for (const auto& x : features) ss += (x[j] - model.mean_[j]) * (x[j] - model.mean_[j]);
        const double sd = std::sqrt(ss / static_cast<double>(n));
        model.scale_[j] = sd > 0.0 ? sd : 1.0;
    }

    const std::size_t k = model.classes_.size();
    const std::size_t width = d + 1;
    model.weights_.assign(k * width, 0.0);
    if (k == 1) return model;

    std::vector<double> z(n * width);
    std::vector<std::size_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) z[i * width + j] = (features[i][j] - model.mean_[j]) / model.scale_[j];
        z[i * width + d] = 1.0;
        y[i] = static_cast<std::size_t>(
            std::lower_bound(model.classes_.begin(), model.classes_.end(), labels[i]) - model.classes_.begin());
    }

    std::vector<double> grad(k * width);
    std::vector<double> logits(k);
    for (int iter = 0; iter < options.iterations; ++iter) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double* zi = &z[i * width];
            double top = -INFINITY;
            for (std::size_t c = 0; c < k; ++c) {
                const double* w = &model.weights_[c * width];
                double s = 0.0;
                for (std::size_t j = 0; j < width; ++j) s += w[j] * zi[j];
                logits[c] = s;
                top = std::max(top, s);
            }
            double total = 0.0;
            for (auto& l : logits) {
                l = std::exp(l - top);
                total += l;
            }
            for (std::size_t c = 0; c < k; ++c) {
                const double err = logits[c] / total - (c == y[i] ? 1.0 : 0.0);
                double* g = &grad[c * width];
                for (std::size_t j = 0; j < width; ++j) g[j] += err * zi[j];
            }
        }
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t j = 0; j < width; ++j) {
                double g = grad[c * width + j] / static_cast<double>(n);
                if (j < d) g += options.l2 * model.weights_[c * width + j];
                model.weights_[c * width + j] -= options.step * g;
            }
        }
    }
    return model;
}

std::string LogisticModel::predict(std::span<const double> features) const {
    if (classes_.size() == 1) return classes_.front();
    const std::size_t d = mean_.size();
    const std::size_t width = d + 1;
    std::size_t best = 0;
    double best_score = -INFINITY;
    for (std::size_t c = 0; c < classes_.size(); ++c) {
        const double* w = &weights_[c * width];
        double s = w[d];
        for (std::size_t j = 0; j < d; ++j) s += w[j] * (features[j] - mean_[j]) / scale_[j];
        if (s > best_score) {
            best_score = s;
            best = c;
        }
    }
    return classes_[best];
}

std::vector<std::string> LogisticModel::predict(const std::vector<std::vector<double>>& features) const {
    std::vector<std::string> out;
    out.reserve(features.size());
    for (const auto& x : features) out.push_back(predict(x));
    return out;
}

LogisticPrediction logistic_baseline(const std::vector<std::vector<double>>& train_features,
                                     const std::vector<std::string>& train_labels,
                                     const std::vector<std::vector<double>>& test_features,
                                     const LogisticOptions& options) {
    const auto model = LogisticModel::fit(train_features, train_labels, options);
    return LogisticPrediction{model.predict(test_features), model.single_class()};
}

double cross_validated_accuracy(const std::vector<std::vector<double>>& features,
                                const std::vector<std::string>& labels, std::size_t folds, std::uint64_t seed,
                                const LogisticOptions& options) {
    const std::size_t n = labels.size();
    if (n < 2 || folds < 2) throw ArityMismatch("cross validation needs at least two rows and two folds");
    folds = std::min(folds, n);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);

    std::size_t correct = 0;
    for (std::size_t fold = 0; fold < folds; ++fold) {
        std::vector<std::vector<double>> train_x, test_x;
        std::vector<std::string> train_y, test_y;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t idx = order[i];
            if (i % folds == fold) {
                test_x.push_back(features[idx]);
                test_y.push_back(labels[idx]);
            } else {
                train_x.push_back(features[idx]);
                train_y.push_back(labels[idx]);
            }
        }
        const auto pred = logistic_baseline(train_x, train_y, test_x, options);
        for (std::size_t i = 0; i < test_y.size(); ++i) correct += pred.labels[i] == test_y[i];
    }
    return static_cast<double>(correct) / static_cast<double>(n);
}

}  // namespace tabaudit::stats
