#include "tabaudit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "tabaudit/error.hpp"

namespace tabaudit {

namespace {

constexpr double kNumericParseRate = 0.95;
constexpr std::size_t kMaxCategories = 50;

std::string_view strip_bom(std::string_view s) {
    if (s.size() >= 3 && s.substr(0, 3) == "\xEF\xBB\xBF") s.remove_prefix(3);
    return s;
}

void infer_feature(FeatureSpec& spec, std::vector<Row>& rows, std::size_t col) {
    std::size_t nonempty = 0;
    std::size_t numeric = 0;
    std::unordered_set<std::string> non_numeric_tokens;
    for (const auto& row : rows) {
        const std::string& v = row.values[col];
        spec.observed_values.insert(v);
        if (row.layout[col].quoted) spec.format.any_quoted = true;
        if (v.empty()) continue;
        ++nonempty;
        if (parse_number(v)) {
            ++numeric;
        } else {
            non_numeric_tokens.insert(v);
        }
    }
    spec.uniqueness_ratio = static_cast<double>(spec.observed_values.size()) / static_cast<double>(rows.size());

    const bool numeric_kind = nonempty > 0 &&
                              static_cast<double>(numeric) >= kNumericParseRate * static_cast<double>(nonempty) &&
                              non_numeric_tokens.size() <= 1 &&
                              !(non_numeric_tokens.size() == 1 && spec.has_missing());
    if (numeric_kind) {
        spec.kind = FeatureKind::Numeric;
        if (!non_numeric_tokens.empty()) spec.format.missing_token = *non_numeric_tokens.begin();
        bool first = true;
        for (auto& row : rows) {
            const std::string& v = row.values[col];
            if (v == spec.format.missing_token) {
                row.parsed[col] = TypedValue{ValueType::Missing, 0.0};
                continue;
            }
            const int places = decimal_places(v);
            if (first) {
                spec.format.min_decimals = spec.format.max_decimals = places;
                first = false;
            } else {
                spec.format.min_decimals = std::min(spec.format.min_decimals, places);
                spec.format.max_decimals = std::max(spec.format.max_decimals, places);
            }
            row.parsed[col] = TypedValue{ValueType::Number, *parse_number(v)};
        }
        return;
    }

    spec.kind = spec.observed_values.size() <= kMaxCategories ? FeatureKind::Categorical : FeatureKind::Text;
    const ValueType label = spec.kind == FeatureKind::Categorical ? ValueType::Category : ValueType::Text;
    for (auto& row : rows) {
        row.parsed[col] = TypedValue{row.values[col].empty() ? ValueType::Missing : label, 0.0};
    }
}

}  // namespace

std::string_view to_string(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::Numeric: return "numeric";
        case FeatureKind::Categorical: return "categorical";
        case FeatureKind::Text: return "text";
    }
    return "unknown";
}

std::optional<double> parse_number(std::string_view text) {
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return std::nullopt;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

int decimal_places(std::string_view text) {
    const auto dot = text.find('.');
    if (dot == std::string_view::npos) return 0;
    int places = 0;
    for (std::size_t i = dot + 1; i < text.size(); ++i) {
        if (text[i] < '0' || text[i] > '9') break;
        ++places;
    }
    return places;
}

TabularDataset load_csv(std::string_view source, std::string name) {
    const char delimiter = ',';
    auto split = csv::split_records(source, delimiter);
    if (split.records.empty()) throw EmptyDataset("no header line");

    TabularDataset ds;
    ds.name_ = std::move(name);
    ds.delimiter_ = delimiter;
    ds.line_terminator_ = split.line_terminator;

    const auto& header = split.records.front();
    ds.header_line_ = std::string(header.raw);
    for (std::size_t i = 0; i < header.fields.size(); ++i) {
        FeatureSpec spec;
        spec.name = header.fields[i].value;
        if (i == 0) spec.name = std::string(strip_bom(spec.name));
        ds.features_.push_back(std::move(spec));
    }
    const std::size_t arity = ds.features_.size();

    ds.rows_.reserve(split.records.size() - 1);
    ds.raw_lines_.reserve(split.records.size() - 1);
    for (std::size_t r = 1; r < split.records.size(); ++r) {
        auto& rec = split.records[r];
        if (rec.fields.size() != arity) {
            throw MalformedCsv(rec.line, "expected " + std::to_string(arity) + " fields, found " +
                                             std::to_string(rec.fields.size()));
        }
        Row row;
        row.values.reserve(arity);
        row.layout.reserve(arity);
        for (auto& f : rec.fields) {
            row.values.push_back(std::move(f.value));
            row.layout.push_back(f.layout);
        }
        row.parsed.resize(arity);
        ds.raw_lines_.emplace_back(rec.raw);
        ds.rows_.push_back(std::move(row));
    }
    if (ds.rows_.size() < 2) throw EmptyDataset("need a header and at least two data rows");

    for (std::size_t c = 0; c < arity; ++c) infer_feature(ds.features_[c], ds.rows_, c);
    return ds;
}

TabularDataset load_csv_file(const std::filesystem::path& path, std::string name) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetError("cannot open dataset file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (name.empty()) name = path.stem().string();
    return load_csv(buf.str(), std::move(name));
}

TabularDataset make_dataset(std::string name, const std::vector<std::string>& header,
                            const std::vector<std::vector<std::string>>& rows) {
    return load_csv(csv::write_table(header, rows), std::move(name));
}

std::vector<std::string> TabularDataset::feature_names() const {
    std::vector<std::string> names;
    names.reserve(features_.size());
    for (const auto& f : features_) names.push_back(f.name);
    return names;
}

std::optional<std::size_t> TabularDataset::feature_index(std::string_view name) const {
    for (std::size_t i = 0; i < features_.size(); ++i) {
        if (features_[i].name == name) return i;
    }
    return std::nullopt;
}

std::vector<std::size_t> TabularDataset::numeric_features() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < features_.size(); ++i) {
        if (features_[i].kind == FeatureKind::Numeric) out.push_back(i);
    }
    return out;
}

std::string TabularDataset::canonical_text() const {
    std::string out = header_line_;
    out += line_terminator_;
    for (const auto& line : raw_lines_) {
        out += line;
        out += line_terminator_;
    }
    return out;
}

std::string TabularDataset::serialize_row(const Row& row) const {
    std::string out;
    for (std::size_t i = 0; i < row.values.size(); ++i) {
        if (i) out.push_back(delimiter_);
        const csv::CellLayout layout = i < row.layout.size() ? row.layout[i] : csv::CellLayout{};
        out += csv::format_field(row.values[i], layout, delimiter_);
    }
    return out;
}

TabularDataset TabularDataset::renamed(std::string name) const {
    TabularDataset copy = *this;
    copy.name_ = std::move(name);
    return copy;
}

const std::string& marginal_sample(std::size_t feature, const TabularDataset& dataset, Rng& rng) {
    if (dataset.row_count() == 0) throw EmptyDataset("marginal_sample on an empty dataset");
    return dataset.row(uniform_index(rng, dataset.row_count())).values.at(feature);
}

HeaderSplit split_at(const TabularDataset& dataset, std::size_t split_row, std::size_t cut) {
    if (split_row >= dataset.row_count()) {
        throw RowOutOfRange("split row " + std::to_string(split_row) + " outside " +
                            std::to_string(dataset.row_count()) + " rows");
    }
    const auto& lines = dataset.raw_lines();
    const std::string& eol = dataset.line_terminator();
    const std::string& target = lines[split_row];
    if (cut == 0 || cut >= target.size()) {
        throw RowOutOfRange("cut " + std::to_string(cut) + " is not strictly inside row " + std::to_string(split_row));
    }

    HeaderSplit split;
    split.row = split_row;
    split.cut = cut;
    split.prefix = dataset.header_line() + eol;
    for (std::size_t i = 0; i < split_row; ++i) split.prefix += lines[i] + eol;
    split.prefix.append(target, 0, cut);

    split.continuation.assign(target, cut);
    split.continuation += eol;
    for (std::size_t i = split_row + 1; i < lines.size(); ++i) split.continuation += lines[i] + eol;
    return split;
}

HeaderSplit split_for_header(const TabularDataset& dataset, std::size_t split_row, Rng& rng) {
    if (split_row >= dataset.row_count()) {
        throw RowOutOfRange("split row " + std::to_string(split_row) + " outside " +
                            std::to_string(dataset.row_count()) + " rows");
    }
    const std::size_t len = dataset.raw_lines()[split_row].size();
    if (len < 2) throw RowOutOfRange("row " + std::to_string(split_row) + " is too short to cut");
    return split_at(dataset, split_row, 1 + uniform_index(rng, len - 1));
}

bool is_sequential_identifier(const TabularDataset& dataset, std::size_t feature) {
    const auto& spec = dataset.feature(feature);
    if (dataset.row_count() < 3 || spec.observed_values.size() != dataset.row_count()) return false;
    const auto& rows = dataset.rows();
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& prev = rows[r - 1];
        const auto& cur = rows[r];
        if (spec.kind == FeatureKind::Numeric) {
            if (prev.parsed[feature].type != ValueType::Number || cur.parsed[feature].type != ValueType::Number ||
                !(prev.parsed[feature].number < cur.parsed[feature].number)) {
                return false;
            }
        } else if (!(prev.values[feature] < cur.values[feature])) {
            return false;
        }
    }
    return true;
}

std::optional<std::size_t> most_unique_feature(const TabularDataset& dataset) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < dataset.feature_count(); ++i) {
        if (is_sequential_identifier(dataset, i)) continue;
        if (!best || dataset.feature(i).uniqueness_ratio > dataset.feature(*best).uniqueness_ratio) best = i;
    }
    return best;
}

std::optional<std::size_t> find_unique_feature(const TabularDataset& dataset, double threshold) {
    auto best = most_unique_feature(dataset);
    if (best && dataset.feature(*best).uniqueness_ratio >= threshold) return best;
    return std::nullopt;
}

}  // namespace tabaudit
