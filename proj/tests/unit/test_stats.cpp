#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "tabaudit/error.hpp"
#include "tabaudit/stats.hpp"

using namespace tabaudit;

namespace {

// Two-sided Student-t tail by Simpson integration of the density over [0, |t|].
double student_t_two_sided(double t, double df) {
    const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI);
    auto pdf = [&](double x) { return c * std::pow(1 + x * x / df, -(df + 1) / 2); };
    const int steps = 20000;
    const double h = std::abs(t) / steps;
    double area = pdf(0) + pdf(std::abs(t));
    for (int i = 1; i < steps; ++i) area += (i % 2 ? 4 : 2) * pdf(i * h);
    area *= h / 3;
    return 1.0 - 2.0 * area;
}

}  // namespace

TEST_SUITE("stats") {
    TEST_CASE("levenshtein examples") {
        CHECK(stats::levenshtein("abc", "abc") == 0);
        CHECK(stats::levenshtein("", "abc") == 3);
        CHECK(stats::levenshtein("kitten", "sitting") == 3);
        CHECK(stats::levenshtein("kitten", "sitting") == oracle::levenshtein("kitten", "sitting"));
    }

    TEST_CASE("similarity examples") {
        CHECK(stats::similarity("same", "same") == 1.0);
        CHECK(stats::similarity("", "") == 1.0);
        CHECK(stats::similarity("aaaa", "bbbb") == 0.0);
        CHECK(stats::similarity("abcd", "abce") == doctest::Approx(0.75));
    }

    TEST_CASE("welch t-test basics") {
        const std::vector<double> xs{1, 2, 3, 4, 5};
        const auto same = stats::welch_t_test(xs, xs);
        CHECK(same.t_statistic == 0.0);
        CHECK(same.p_value == doctest::Approx(1.0));

        const std::vector<double> ys{2, 3, 4, 5, 6};
        const auto r = stats::welch_t_test(xs, ys);
        CHECK(r.t_statistic == doctest::Approx(oracle::welch_statistic(xs, ys)));
        CHECK(r.degrees_of_freedom == doctest::Approx(8.0));
        CHECK(r.p_value == doctest::Approx(student_t_two_sided(r.t_statistic, r.degrees_of_freedom)).epsilon(1e-6));

        const auto greater = stats::welch_t_test(ys, xs, stats::Alternative::Greater);
        CHECK(greater.p_value == doctest::Approx(r.p_value / 2).epsilon(1e-9));

        const std::vector<double> zeros{0, 0, 0};
        CHECK_THROWS_AS(stats::welch_t_test(zeros, zeros), DegenerateSample);
        CHECK_THROWS_AS(stats::welch_t_test(std::vector<double>{1}, xs), DegenerateSample);
    }

    TEST_CASE("welch p against a permutation oracle on seeded cases") {
        std::mt19937_64 rng(2024);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_int_distribution<int> size(20, 40);
        for (int c = 0; c < 5; ++c) {
            const double shift = 0.2 * c;
            std::vector<double> xs(size(rng)), ys(size(rng));
            for (auto& x : xs) x = normal(rng);
            for (auto& y : ys) y = normal(rng) + shift;
            const double p = stats::welch_t_test(xs, ys).p_value;
            CHECK(std::abs(p - oracle::permutation_p(xs, ys, 20000, 7 + c)) <= 0.02);
        }
    }

    TEST_CASE("one-sided p stays defined on constant samples") {
        const std::vector<double> ones{1, 1, 1}, zeros{0, 0, 0};
        CHECK(stats::one_sided_p(ones, zeros) == 0.0);
        CHECK(stats::one_sided_p(zeros, ones) == 1.0);
        CHECK(stats::one_sided_p(ones, ones) == 1.0);
    }

    TEST_CASE("binomial upper tail") {
        CHECK(stats::binomial_upper_p(0, 10, 0.3) == doctest::Approx(1.0));
        for (std::size_t k : {1u, 5u, 12u, 30u}) {
            CHECK(stats::binomial_upper_p(k, 30, 0.2) == doctest::Approx(oracle::binomial_upper(k, 30, 0.2)).epsilon(1e-9));
        }
        CHECK(std::abs(stats::binomial_upper_p(100, 100, 0.1) / 1e-100 - 1.0) <= 1e-6);
    }

    TEST_CASE("wilson interval") {
        const auto w = stats::wilson_interval(8, 10, 0.95);
        CHECK(std::abs(w.low - 0.490) <= 0.005);
        CHECK(std::abs(w.high - 0.943) <= 0.005);
        const auto o = oracle::wilson(8, 10);
        CHECK(w.low == doctest::Approx(o.low).epsilon(1e-4));
        CHECK(w.high == doctest::Approx(o.high).epsilon(1e-4));
        CHECK(stats::wilson_interval(0, 10).low == 0.0);
        CHECK(stats::wilson_interval(10, 10).high == 1.0);
        const auto wide = stats::wilson_interval(3, 7, 0.99);
        CHECK(wide.low <= wide.high);
        CHECK(wide.level == 0.99);
    }

    TEST_CASE("pearson examples") {
        const std::vector<double> xs{1, 2, 3, 4};
        CHECK(stats::pearson(xs, std::vector<double>{2, 4, 6, 8}) == doctest::Approx(1.0));
        CHECK(stats::pearson(xs, std::vector<double>{-1, -2, -3, -4}) == doctest::Approx(-1.0));
        CHECK(stats::pearson(xs, std::vector<double>{1, 3, 2, 4}) == doctest::Approx(0.8));
        CHECK(stats::pearson(xs, std::vector<double>{1, 3, 2, 4}) == doctest::Approx(oracle::pearson(xs, {1, 3, 2, 4})));
        CHECK_THROWS_AS(stats::pearson(xs, std::vector<double>{1, 2}), ArityMismatch);
        CHECK_THROWS_AS(stats::pearson(xs, std::vector<double>{5, 5, 5, 5}), ConstantInput);
    }

    TEST_CASE("correlation matrix") {
        const auto ds = make_dataset("pair", {"a", "b", "c"}, {{"1", "2", "x"}, {"2", "4", "y"}, {"3", "6", ""}});
        const auto table = stats::numeric_table(ds);
        const std::vector<std::size_t> cols{0, 1};
        const auto m = stats::correlation_matrix(table, cols);
        CHECK(*m[0][0] == 1.0);
        CHECK(*m[0][1] == doctest::Approx(1.0));
        CHECK(*m[1][0] == doctest::Approx(1.0));

        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> unit(0, 1);
        stats::NumericTable independent(10000, std::vector<std::optional<double>>(3));
        for (auto& row : independent) {
            for (auto& cell : row) cell = unit(rng);
        }
        const std::vector<std::size_t> three{0, 1, 2};
        const auto mi = stats::correlation_matrix(independent, three);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                if (i != j) CHECK(std::abs(*mi[i][j]) <= 0.05);
            }
        }
        stats::NumericTable sparse{{1.0, std::nullopt}, {2.0, 3.0}};
        const std::vector<std::size_t> both{0, 1};
        CHECK_FALSE(stats::correlation_matrix(sparse, both)[0][1].has_value());
    }

    TEST_CASE("best match count") {
        const auto ds = make_dataset("m", {"a", "b", "c"}, {{"1", "x", "p"}, {"2", "y", "q"}, {"1", "y", "r"}});
        const std::vector<std::string> inside{"2", "y", "q"};
        CHECK(stats::best_match_count(inside, ds) == 3);
        CHECK(stats::best_match_count(inside, ds, 1) == 1);
        const std::vector<std::string> two{"1", "y", "z"};
        CHECK(stats::best_match_count(two, ds) == 2);
        CHECK_THROWS_AS(stats::best_match_count(std::vector<std::string>{"1"}, ds), ArityMismatch);

        const stats::MatchIndex index(ds);
        CHECK(index.best_match(two) == 2);
        CHECK(index.contains_row(inside));
        CHECK_FALSE(index.contains_row(two));
        CHECK(index.contains_value(2, "r"));
        CHECK_FALSE(index.contains_value(2, "z"));
        // rows 0 and 2 share one value with each other; row 1 shares "y" with row 2
        CHECK(index.mean_self_match() == doctest::Approx(1.0));
    }

    TEST_CASE("best match agrees with brute force") {
        const auto ds = fixture::load("adult.csv");
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : ds.rows()) rows.push_back(r.values);
        const stats::MatchIndex index(ds);
        double total = 0;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto expected = oracle::best_match(rows[r], rows, static_cast<long>(r));
            CHECK(index.best_match(rows[r], r) == expected);
            CHECK(stats::best_match_count(rows[r], ds, r) == expected);
            total += static_cast<double>(expected);
        }
        CHECK(index.mean_self_match() == doctest::Approx(total / static_cast<double>(rows.size())));
    }

    TEST_CASE("provenance statistics") {
        const auto ds = fixture::load("iris.csv");
        std::vector<std::vector<std::string>> copied;
        for (std::size_t r = 0; r < 10; ++r) copied.push_back(ds.row(r).values);
        const auto all = stats::provenance_stats(copied, ds);
        CHECK(all.copied_row_fraction == 1.0);
        CHECK(all.mean_best_match == 5.0);
        CHECK(all.copied_value_fraction == 1.0);
        CHECK(all.samples == 10);
        CHECK(all.features == 5);

        auto altered = copied;
        for (auto& row : altered) row[0] = "99.9";
        const auto s = stats::provenance_stats(altered, ds);
        CHECK(s.copied_row_fraction == 0.0);
        CHECK(s.copied_value_fraction == doctest::Approx(4.0 / 5.0));
        double best = 0;
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : ds.rows()) rows.push_back(r.values);
        for (const auto& row : altered) best += static_cast<double>(oracle::best_match(row, rows));
        CHECK(s.mean_best_match == doctest::Approx(best / 10));
    }

    TEST_CASE("mode value ties") {
        CHECK(stats::mode_value(std::vector<std::string>{"a", "b", "a"}) == "a");
        CHECK(stats::mode_value(std::vector<std::string>{"q", "r", "s"}) == "q");
        CHECK(stats::mode_value(std::vector<std::string>{"x", "y", "y", "x"}) == "x");
        CHECK(stats::mode_value(std::vector<int>{3, 1, 1}) == 1);
    }

    TEST_CASE("logistic baseline") {
        std::vector<std::vector<double>> xs;
        std::vector<std::string> ys;
        for (int i = 0; i < 40; ++i) {
            xs.push_back({static_cast<double>(i)});
            ys.push_back(i < 20 ? "low" : "high");
        }
        const auto fit = stats::logistic_baseline(xs, ys, xs);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < ys.size(); ++i) correct += fit.labels[i] == ys[i];
        CHECK(correct == ys.size());
        CHECK_FALSE(fit.single_class);

        const auto single = stats::logistic_baseline(xs, std::vector<std::string>(40, "only"), {{1.0}, {100.0}});
        CHECK(single.single_class);
        CHECK(single.labels == std::vector<std::string>{"only", "only"});

        std::mt19937_64 rng(3);
        std::normal_distribution<double> normal(0, 1);
        std::vector<std::vector<double>> noise;
        std::vector<std::string> labels;
        for (int i = 0; i < 3000; ++i) {
            noise.push_back({normal(rng), normal(rng)});
            labels.push_back(std::to_string(i % 3));
        }
        const double acc = stats::cross_validated_accuracy(noise, labels, 5, 9, {500, 0.1, 1e-4});
        CHECK(std::abs(acc - 1.0 / 3.0) <= 0.05);
    }
}
