#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tabaudit::csv {

/// How a cell was written in the file, so the exact bytes can be rebuilt from
/// the canonical value. Only spaces outside quotes count as padding.
struct CellLayout {
    bool quoted = false;
    std::uint16_t lead_spaces = 0;
    std::uint16_t trail_spaces = 0;

    friend bool operator==(const CellLayout&, const CellLayout&) = default;
};

struct Field {
    std::string value;  // unquoted, unescaped, padding removed
    CellLayout layout;
};

struct Record {
    std::string_view raw;  // exact bytes, without the line terminator
    std::size_t line = 0;  // 1-based physical line where the record starts
    std::vector<Field> fields;
};

struct SplitResult {
    std::vector<Record> records;
    std::string line_terminator = "\n";
    bool trailing_terminator = false;
};

/// Split RFC 4180 text into records. Quoted fields may span lines; the raw
/// view of such a record covers all of its physical lines.
/// Throws MalformedCsv on an unterminated quote or stray bytes after a
/// closing quote.
SplitResult split_records(std::string_view text, char delimiter = ',');

/// True when the value cannot be written bare.
bool needs_quoting(std::string_view value, char delimiter = ',');

/// Render one cell from its value and layout.
std::string format_field(std::string_view value, const CellLayout& layout, char delimiter = ',');

/// Render a record with minimal quoting.
std::string format_record(const std::vector<std::string>& values, char delimiter = ',');

/// Build a whole file (header plus rows, '\n' terminated) with minimal quoting.
std::string write_table(const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows,
                        char delimiter = ',');

}  // namespace tabaudit::csv
