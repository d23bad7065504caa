#include <numeric>

#include "adapters.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "tabaudit/csv.hpp"
#include "tabaudit/error.hpp"
#include "tabaudit/simulators.hpp"

using namespace tabaudit;
using llm::ChatRequest;

namespace {

ChatRequest user_turn(const std::string& text, std::uint64_t nonce = 0) {
    auto r = fixture::simple_request(text, 0.7);
    r.seed = nonce;
    return r;
}

std::vector<double> numeric_cells(const std::string& line) {
    const auto split = csv::split_records(line);
    std::vector<double> out;
    for (const auto& field : split.records.at(0).fields) out.push_back(std::stod(field.value));
    return out;
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t c) {
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
}

std::vector<std::vector<double>> table_of(const TabularDataset& ds) {
    std::vector<std::vector<double>> out;
    for (const auto& line : ds.raw_lines()) out.push_back(numeric_cells(line));
    return out;
}

// Two features with population correlation 0.9.
TabularDataset strongly_correlated(std::size_t rows) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::string text = "a,b\n";
    for (std::size_t r = 0; r < rows; ++r) {
        const double x = normal(rng);
        const double y = 0.9 * x + std::sqrt(1 - 0.81) * normal(rng);
        text += fixture::decimal(x, 3) + "," + fixture::decimal(y, 3) + "\n";
    }
    return load_csv(text, "d_pair");
}

}  // namespace

TEST_SUITE("simulators") {
    TEST_CASE("verbatim continues the file") {
        const auto ds = fixture::load("titanic.csv");
        const auto& lines = ds.raw_lines();
        std::string prompt = ds.header_line() + "\n";
        for (std::size_t r = 0; r < 5; ++r) prompt += lines[r] + "\n";
        const auto out = llm::simulate_verbatim(ds, user_turn(prompt));
        CHECK(out.starts_with(lines[5] + "\n" + lines[6]));

        const auto cut = lines[7].substr(0, 20);
        const auto mid = llm::simulate_verbatim(ds, user_turn(prompt + lines[5] + "\n" + lines[6] + "\n" + cut));
        CHECK(mid.starts_with(lines[7].substr(20) + "\n" + lines[8]));

        CHECK(llm::simulate_verbatim(ds, user_turn("nothing from this table at all")).empty());
        CHECK(llm::simulate_verbatim(ds, user_turn("short")).empty());
    }

    TEST_CASE("verbatim completes a feature-value prefix") {
        const auto ds = fixture::load("adult.csv");
        const std::vector<std::size_t> given{0, 1, 2, 3, 4, 5};
        std::vector<std::size_t> rest(ds.feature_count() - 6);
        std::iota(rest.begin(), rest.end(), 6);
        const auto out = llm::simulate_verbatim(ds, user_turn(serialize_fv(ds, ds.row(10), given)));
        CHECK(out == serialize_fv(ds, ds.row(10), rest));
        const auto parsed = parse_fv_response(out, ds.features());
        CHECK(parsed.size() == rest.size());
    }

    TEST_CASE("verbatim output is always a substring of the file") {
        const auto ds = fixture::synthetic();
        const std::string file = ds.canonical_text();
        const llm::SimulationContext ctx(ds);
        Rng rng(derive_seed(3, "substring", 0));
        for (int i = 0; i < 200; ++i) {
            const std::size_t end = 8 + uniform_index(rng, file.size() - 8);
            const std::size_t begin = end - std::min<std::size_t>(end, 8 + uniform_index(rng, 200));
            const auto out = llm::simulate_verbatim(ctx, user_turn(file.substr(begin, end - begin)));
            CHECK(file.find(out) != std::string::npos);
        }
    }

    TEST_CASE("feature names continue the given list") {
        const auto ds = fixture::load("iris.csv");
        ChatRequest r;
        r.messages = {{llm::Role::System, "Please list the names of the features in the dataset."},
                      {llm::Role::User, "Dataset: IRIS. Feature Names: sepal_length"}};
        const auto expected = "sepal_width, petal_length, petal_width, species";
        CHECK(llm::simulate_verbatim(ds, r) == expected);
        Rng rng(1);
        CHECK(llm::simulate_marginal(ds, r, rng) == expected);
        CHECK(llm::simulate_noise(r) == llm::kRefusal);
    }

    TEST_CASE("marginal rows draw each cell from the observed support") {
        const auto ds = fixture::load("adult.csv");
        const llm::SimulationContext ctx(ds);
        Rng rng(derive_seed(5, "support", 0));
        for (int i = 0; i < 200; ++i) {
            const auto line = llm::simulate_marginal(ctx, user_turn(ds.header_line() + "\n"), rng);
            const auto rec = csv::split_records(line).records.at(0);
            REQUIRE(rec.fields.size() == ds.feature_count());
            for (std::size_t f = 0; f < ds.feature_count(); ++f) {
                const auto& seen = ds.feature(f).observed_values;
                CHECK(std::find(seen.begin(), seen.end(), rec.fields[f].value) != seen.end());
            }
        }
    }

    TEST_CASE("marginal rows break correlations") {
        const auto ds = strongly_correlated(2000);
        CHECK(oracle::pearson(column(table_of(ds), 0), column(table_of(ds), 1)) > 0.85);
        const llm::SimulationContext ctx(ds);
        std::vector<std::vector<double>> samples;
        Rng rng(derive_seed(8, "marginal", 0));
        for (int i = 0; i < 1000; ++i) samples.push_back(numeric_cells(llm::simulate_marginal(ctx, user_turn("a,b\n"), rng)));
        CHECK(std::abs(oracle::pearson(column(samples, 0), column(samples, 1))) <= 0.1);
    }

    TEST_CASE("learner rows keep correlation signs and are never copies") {
        const auto ds = fixture::correlated();
        const llm::SimulationContext ctx(ds);
        REQUIRE(ctx.unique_feature().has_value());
        CHECK(ds.feature(*ctx.unique_feature()).name == "weight");
        const auto data = table_of(ds);
        std::vector<std::vector<double>> samples;
        Rng rng(derive_seed(9, "learner", 0));
        for (int i = 0; i < 1000; ++i) {
            const auto line = llm::simulate_learner(ctx, user_turn(ds.header_line() + "\n"), rng);
            const auto rec = csv::split_records(line).records.at(0);
            std::vector<std::string> values;
            for (const auto& field : rec.fields) values.push_back(field.value);
            CHECK_FALSE(ctx.is_dataset_row(values));
            samples.push_back(numeric_cells(line));
        }
        std::size_t pairs = 0, agree = 0;
        for (std::size_t i = 0; i < 6; ++i) {
            for (std::size_t j = i + 1; j < 6; ++j) {
                const double truth = oracle::pearson(column(data, i), column(data, j));
                if (std::abs(truth) < 0.1) continue;
                ++pairs;
                agree += (truth > 0) == (oracle::pearson(column(samples, i), column(samples, j)) > 0);
            }
        }
        REQUIRE(pairs == 10);
        CHECK(static_cast<double>(agree) / static_cast<double>(pairs) >= 0.9);
    }

    TEST_CASE("learner redraws the unique feature from another row") {
        const auto ds = fixture::correlated();
        const llm::SimulationContext ctx(ds);
        const std::size_t w = *ctx.unique_feature();
        Rng rng(derive_seed(10, "redact", 0));
        std::size_t kept = 0;
        for (int i = 0; i < 300; ++i) {
            const auto line = llm::simulate_learner(ctx, user_turn(ds.header_line() + "\n"), rng);
            const auto rec = csv::split_records(line).records.at(0);
            std::vector<std::string> values;
            for (const auto& field : rec.fields) values.push_back(field.value);
            // a row agreeing with the dataset on every other feature must carry a foreign weight
            for (const auto& row : ds.rows()) {
                bool same_rest = true;
                for (std::size_t f = 0; f < values.size() && same_rest; ++f) same_rest = f == w || row.values[f] == values[f];
                if (same_rest) kept += row.values[w] == values[w];
            }
        }
        CHECK(kept == 0);
        const auto flat = make_dataset("flat", {"a", "b"}, {{"x", "y"}, {"x", "y"}, {"x", "y"}});
        Rng r2(1);
        CHECK_THROWS_AS(llm::simulate_learner(flat, user_turn("a,b\n"), r2), NoPerturbableFeature);
    }

    TEST_CASE("noise refuses everything") {
        const auto ds = fixture::load("iris.csv");
        llm::SimulatedModel noise(llm::SimulatorKind::Noise, nullptr, 1);
        for (const auto* text : {"sepal_length,sepal_width", "Feature Names: species", "IF a = 1, THEN"}) {
            const auto out = noise.complete(user_turn(text));
            CHECK(out == llm::kRefusal);
            CHECK(parse_fv_response(out, ds.features()).empty());
        }
    }

    TEST_CASE("simulated models are deterministic per seed and request") {
        auto ds = std::make_shared<const TabularDataset>(fixture::load("iris.csv"));
        llm::SimulatedModel a(llm::SimulatorKind::Marginal, ds, 4), b(llm::SimulatorKind::Marginal, ds, 4),
            c(llm::SimulatorKind::Marginal, ds, 5);
        CHECK(a.identity() == "sim-marginal:iris#4");
        std::size_t differ = 0;
        for (std::uint64_t n = 0; n < 20; ++n) {
            const auto req = user_turn(ds->header_line() + "\n", n);
            CHECK(a.complete(req) == b.complete(req));
            differ += a.complete(req) != c.complete(req);
        }
        CHECK(differ > 0);
        CHECK(llm::simulator_from_string("learner") == llm::SimulatorKind::Learner);
        CHECK_THROWS_AS(llm::simulator_from_string("oracle"), ConfigError);
    }
}
