#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tabaudit/csv.hpp"
#include "tabaudit/rng.hpp"

namespace tabaudit {

enum class FeatureKind { Numeric, Categorical, Text };

std::string_view to_string(FeatureKind kind);

struct FormatDescriptor {
    // Range of digits after the decimal point seen in numeric cells.
    int min_decimals = 0;
    int max_decimals = 0;
    // Whether any cell of the feature was quoted in the file.
    bool any_quoted = false;
    // Raw token standing for a missing value ("" for an empty cell).
    std::string missing_token;
};

struct FeatureSpec {
    std::string name;
    FeatureKind kind = FeatureKind::Categorical;
    std::set<std::string, std::less<>> observed_values;
    FormatDescriptor format;
    double uniqueness_ratio = 0.0;

    [[nodiscard]] bool observed(std::string_view value) const { return observed_values.contains(value); }
    [[nodiscard]] bool has_missing() const { return observed_values.contains(format.missing_token); }
};

enum class ValueType { Missing, Number, Category, Text };

/// Typed view of a cell. Category and text labels are the row's canonical
/// value string; only numbers carry a payload.
struct TypedValue {
    ValueType type = ValueType::Missing;
    double number = 0.0;
};

struct Row {
    std::vector<std::string> values;
    std::vector<TypedValue> parsed;
    std::vector<csv::CellLayout> layout;
};

/// A parsed CSV file that keeps the byte-exact text of every line.
/// Immutable once loaded.
class TabularDataset {
public:
    TabularDataset() = default;

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] const std::vector<FeatureSpec>& features() const noexcept { return features_; }
    [[nodiscard]] const FeatureSpec& feature(std::size_t i) const { return features_.at(i); }
    [[nodiscard]] const std::vector<Row>& rows() const noexcept { return rows_; }
    [[nodiscard]] const Row& row(std::size_t i) const { return rows_.at(i); }
    [[nodiscard]] const std::vector<std::string>& raw_lines() const noexcept { return raw_lines_; }
    [[nodiscard]] const std::string& header_line() const noexcept { return header_line_; }
    [[nodiscard]] char delimiter() const noexcept { return delimiter_; }
    [[nodiscard]] const std::string& line_terminator() const noexcept { return line_terminator_; }

    [[nodiscard]] std::size_t row_count() const noexcept { return rows_.size(); }
    [[nodiscard]] std::size_t feature_count() const noexcept { return features_.size(); }
    [[nodiscard]] std::vector<std::string> feature_names() const;
    [[nodiscard]] std::optional<std::size_t> feature_index(std::string_view name) const;
    [[nodiscard]] std::vector<std::size_t> numeric_features() const;

    /// Header and data lines joined by the file's line terminator, with a
    /// terminator after the last line.
    [[nodiscard]] std::string canonical_text() const;

    /// Re-serialize a row from its canonical values and cell layout.
    [[nodiscard]] std::string serialize_row(const Row& row) const;

    /// Same dataset under a different name.
    [[nodiscard]] TabularDataset renamed(std::string name) const;

    friend TabularDataset load_csv(std::string_view source, std::string name);

private:
    std::string name_;
    std::vector<FeatureSpec> features_;
    std::vector<Row> rows_;
    std::vector<std::string> raw_lines_;
    std::string header_line_;
    char delimiter_ = ',';
    std::string line_terminator_ = "\n";
};

/// Parse RFC 4180 text with a header line and at least two data rows.
/// Throws MalformedCsv (with line number) or EmptyDataset.
TabularDataset load_csv(std::string_view source, std::string name);

/// Read a file and parse it; the dataset name defaults to the file stem.
TabularDataset load_csv_file(const std::filesystem::path& path, std::string name = {});

/// Dataset from already-split values; cells are written with minimal quoting.
TabularDataset make_dataset(std::string name, const std::vector<std::string>& header,
                            const std::vector<std::vector<std::string>>& rows);

/// Parse a finite number the way feature typing does (no surrounding spaces,
/// optional leading '+').
std::optional<double> parse_number(std::string_view text);

/// Digits after the decimal point, ignoring any exponent.
int decimal_places(std::string_view text);

// --- Feature = Value form ------------------------------------------------

/// Rendering of a canonical value inside "Feature = Value" text. Missing
/// values render as "nan".
std::string fv_value(const FeatureSpec& feature, std::string_view value);

/// Inverse of fv_value for a model-produced value.
std::string canonical_value(const FeatureSpec& feature, std::string_view text);

/// "name = value" pairs joined by ", ".
std::string serialize_fv(const TabularDataset& dataset, const Row& row, std::span<const std::size_t> features);

/// Extract "name = value" pairs whose name matches a feature
/// (case-insensitive). Keys are the dataset's feature names; the first
/// occurrence of a feature wins. Prose around the pairs is ignored.
std::map<std::string, std::string> parse_fv_response(std::string_view text, std::span<const FeatureSpec> features);

// --- sampling and splitting ----------------------------------------------

/// Value of `feature` in a uniformly drawn row.
const std::string& marginal_sample(std::size_t feature, const TabularDataset& dataset, Rng& rng);

struct HeaderSplit {
    std::size_t row = 0;
    std::size_t cut = 0;  // bytes of raw_lines[row] kept in the prefix
    std::string prefix;
    std::string continuation;
};

/// Cut raw_lines[split_row] at a random position strictly inside the line.
HeaderSplit split_for_header(const TabularDataset& dataset, std::size_t split_row, Rng& rng);

/// Deterministic variant of split_for_header with an explicit cut.
HeaderSplit split_at(const TabularDataset& dataset, std::size_t split_row, std::size_t cut);

/// True for a column whose values are all distinct and strictly increasing in
/// file order, i.e. a running record identifier.
bool is_sequential_identifier(const TabularDataset& dataset, std::size_t feature);

inline constexpr double kUniqueFeatureThreshold = 0.5;

/// Feature with the highest uniqueness ratio (leftmost on ties), ignoring
/// running identifiers; none when that ratio is below the threshold.
std::optional<std::size_t> find_unique_feature(const TabularDataset& dataset,
                                                double threshold = kUniqueFeatureThreshold);

/// Like find_unique_feature but without the threshold.
std::optional<std::size_t> most_unique_feature(const TabularDataset& dataset);

}  // namespace tabaudit
