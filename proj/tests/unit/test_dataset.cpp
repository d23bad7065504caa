#include <map>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "tabaudit/dataset.hpp"
#include "tabaudit/error.hpp"

using namespace tabaudit;

TEST_SUITE("dataset") {
    TEST_CASE("minimal well-formed input") {
        const auto ds = load_csv("a,b\n1,2\n3,4", "tiny");
        CHECK(ds.feature_count() == 2);
        CHECK(ds.row_count() == 2);
        CHECK(ds.feature(0).kind == FeatureKind::Numeric);
        CHECK(ds.feature(1).kind == FeatureKind::Numeric);
        CHECK(ds.header_line() == "a,b");
        CHECK(ds.raw_lines() == std::vector<std::string>{"1,2", "3,4"});
        CHECK(ds.row(1).parsed[0].type == ValueType::Number);
        CHECK(ds.row(1).parsed[0].number == 3.0);
    }

    TEST_CASE("ragged row is malformed at its line") {
        try {
            load_csv("a,b\n1,2,3", "ragged");
            FAIL("expected MalformedCsv");
        } catch (const MalformedCsv& e) {
            CHECK(e.line() == 2);
        }
        CHECK_THROWS_AS(load_csv("a,b\n1,2\n3", "ragged"), MalformedCsv);
    }

    TEST_CASE("too few rows") {
        CHECK_THROWS_AS(load_csv("", "empty"), EmptyDataset);
        CHECK_THROWS_AS(load_csv("a,b\n1,2\n", "one"), EmptyDataset);
        CHECK_THROWS_AS(load_csv_file(fixture::data_dir() / "missing.csv"), DatasetError);
    }

    TEST_CASE("titanic fixture: typing, missing cells and raw lines") {
        const auto ds = fixture::load("titanic.csv");
        CHECK(ds.name() == "titanic");
        CHECK(ds.row_count() == 16);
        CHECK(ds.feature_count() == 12);
        const auto age = *ds.feature_index("Age");
        CHECK(ds.feature(age).kind == FeatureKind::Numeric);
        CHECK(ds.feature(age).has_missing());
        CHECK(ds.row(0).parsed[age].type == ValueType::Missing);
        CHECK(ds.feature(*ds.feature_index("Name")).format.any_quoted);
        CHECK(ds.feature(*ds.feature_index("Fare")).format.max_decimals == 4);
        CHECK(ds.feature(*ds.feature_index("Fare")).format.min_decimals == 0);
        CHECK(ds.raw_lines()[12] == R"(625,0,3,"Bowen, Mr. David John ""Dai""",male,21,0,0,54636,16.1,,S)");
        CHECK(ds.row(12).values[3] == "Bowen, Mr. David John \"Dai\"");
    }

    TEST_CASE("kind inference thresholds") {
        std::vector<std::vector<std::string>> rows;
        for (int i = 0; i < 60; ++i) rows.push_back({std::to_string(i), "t" + std::to_string(i), i % 2 ? "x" : "y"});
        rows[0][0] = "n/a";
        const auto ds = make_dataset("kinds", {"num", "text", "cat"}, rows);
        CHECK(ds.feature(0).kind == FeatureKind::Numeric);
        CHECK(ds.feature(0).format.missing_token == "n/a");
        CHECK(ds.feature(1).kind == FeatureKind::Text);
        CHECK(ds.feature(2).kind == FeatureKind::Categorical);
        CHECK(ds.feature(2).uniqueness_ratio == doctest::Approx(2.0 / 60.0));
    }

    TEST_CASE("byte-exact round trip") {
        for (const char* file : {"titanic.csv", "adult.csv", "iris.csv", "fico.csv", "diabetes.csv"}) {
            const std::string text = fixture::read_file(fixture::data_dir() / file);
            const auto ds = load_csv(text, file);
            CHECK(ds.canonical_text() == text);
            for (std::size_t r = 0; r < ds.row_count(); ++r) CHECK(ds.serialize_row(ds.row(r)) == ds.raw_lines()[r]);
        }
        const std::string crlf = "a,b\r\n 1 ,\"x\"\r\n2,y\r\n";
        CHECK(load_csv(crlf, "crlf").canonical_text() == crlf);
        const std::string no_final = "a,b\n1,2\n3,4";
        CHECK(load_csv(no_final, "nf").canonical_text() == no_final + "\n");
    }

    TEST_CASE("header split at the IRIS cut") {
        const auto ds = fixture::load("iris.csv");
        const std::string row = ds.raw_lines()[14];
        REQUIRE(row == "5.8,4,1.2,0.2,Iris-setosa");
        const auto split = split_at(ds, 14, std::string("5.8,4,1.2,0.2,Iris-s").size());
        CHECK(split.prefix.ends_with("\n4.3,3,1.1,0.1,Iris-setosa\n5.8,4,1.2,0.2,Iris-s"));
        CHECK(split.continuation.starts_with("etosa\n5.7,4.4,1.5,0.4,Iris-setosa"));
        CHECK(split.prefix + split.continuation == ds.canonical_text());

        const auto first = split_at(ds, 2, 1);
        CHECK(first.continuation.starts_with(ds.raw_lines()[2].substr(1) + "\n" + ds.raw_lines()[3]));
        CHECK_THROWS_AS(split_at(ds, 2, 0), RowOutOfRange);
        CHECK_THROWS_AS(split_at(ds, 2, ds.raw_lines()[2].size()), RowOutOfRange);
        Rng rng(1);
        CHECK_THROWS_AS(split_for_header(ds, ds.row_count(), rng), RowOutOfRange);
    }

    TEST_CASE("unique feature") {
        CHECK(fixture::load("titanic.csv").feature(*find_unique_feature(fixture::load("titanic.csv"))).name == "Name");
        const auto adult = fixture::load("adult.csv");
        CHECK(adult.feature(*find_unique_feature(adult)).name == "fnlwgt");
        std::vector<std::vector<std::string>> rows;
        for (int i = 0; i < 40; ++i) rows.push_back({i % 2 ? "1" : "0", i % 3 ? "a" : "b"});
        CHECK_FALSE(find_unique_feature(make_dataset("binary", {"x", "y"}, rows)).has_value());
        CHECK(is_sequential_identifier(fixture::load("titanic.csv"), 0));
        // the 25-row excerpt: sepal_width has 13 distinct values
        const auto iris = fixture::load("iris.csv");
        CHECK(iris.feature(*find_unique_feature(iris)).name == "sepal_width");
        CHECK_FALSE(find_unique_feature(iris, 0.8).has_value());
    }

    TEST_CASE("marginal sample frequencies") {
        std::vector<std::vector<std::string>> rows;
        for (int i = 0; i < 4; ++i) rows.push_back({i == 3 ? "B" : "A"});
        const auto ds = make_dataset("ab", {"v"}, rows);
        Rng rng(derive_seed(11, "marginal", 0));
        std::size_t a = 0;
        const std::size_t n = 10000;
        for (std::size_t i = 0; i < n; ++i) a += marginal_sample(0, ds, rng) == "A";
        const double fa = static_cast<double>(a) / n;
        CHECK(std::abs(fa - 0.75) <= 0.02);
        const double expected_a = 0.75 * n, expected_b = 0.25 * n;
        const double chi = (a - expected_a) * (a - expected_a) / expected_a +
                           ((n - a) - expected_b) * ((n - a) - expected_b) / expected_b;
        CHECK(oracle::chi_square_1df_upper(chi) > 0.001);

        const auto constant = make_dataset("c", {"v"}, {{"x"}, {"x"}, {"x"}});
        CHECK(marginal_sample(0, constant, rng) == "x");
    }

    TEST_CASE("numbers and decimals") {
        CHECK(parse_number("+1.5") == 1.5);
        CHECK(parse_number("-0.25") == -0.25);
        CHECK_FALSE(parse_number(" 1").has_value());
        CHECK_FALSE(parse_number("1e999").has_value());
        CHECK_FALSE(parse_number("abc").has_value());
        CHECK(decimal_places("3.1400") == 4);
        CHECK(decimal_places("12") == 0);
        CHECK(decimal_places("1.5e3") == 1);
    }

    TEST_CASE("renamed keeps content") {
        const auto ds = fixture::load("iris.csv").renamed("flowers");
        CHECK(ds.name() == "flowers");
        CHECK(ds.row_count() == 25);
    }
}
