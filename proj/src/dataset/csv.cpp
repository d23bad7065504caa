#include "tabaudit/csv.hpp"

#include "tabaudit/error.hpp"

namespace tabaudit::csv {

namespace {

bool is_line_end(std::string_view text, std::size_t pos) {
    return text[pos] == '\n' || (text[pos] == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n');
}

std::size_t terminator_width(std::string_view text, std::size_t pos) {
    return text[pos] == '\r' ? 2 : 1;
}

}  // namespace

SplitResult split_records(std::string_view text, char delimiter) {
    SplitResult out;
    bool terminator_seen = false;

    std::size_t pos = 0;
    std::size_t line = 1;
    while (pos < text.size()) {
        Record record;
        record.line = line;
        const std::size_t record_start = pos;

        bool end_of_record = false;
        while (!end_of_record) {
            Field field;
            std::uint16_t lead = 0;
            while (pos < text.size() && text[pos] == ' ') {
                ++pos;
                ++lead;
            }

            if (pos < text.size() && text[pos] == '"') {
                field.layout.quoted = true;
                field.layout.lead_spaces = lead;
                ++pos;
                bool closed = false;
                while (pos < text.size()) {
                    const char c = text[pos];
                    if (c == '"') {
                        if (pos + 1 < text.size() && text[pos + 1] == '"') {
                            field.value.push_back('"');
                            pos += 2;
                            continue;
                        }
                        ++pos;
                        closed = true;
                        break;
                    }
                    if (c == '\n') ++line;
                    field.value.push_back(c);
                    ++pos;
                }
                if (!closed) throw MalformedCsv(record.line, "unterminated quoted field");
                std::uint16_t trail = 0;
                while (pos < text.size() && text[pos] == ' ') {
                    ++pos;
                    ++trail;
                }
                field.layout.trail_spaces = trail;
                if (pos < text.size() && text[pos] != delimiter && !is_line_end(text, pos)) {
                    throw MalformedCsv(line, "unexpected character after closing quote");
                }
            } else {
                const std::size_t start = pos;
                while (pos < text.size() && text[pos] != delimiter && !is_line_end(text, pos)) {
                    if (text[pos] == '"') throw MalformedCsv(line, "quote inside unquoted field");
                    ++pos;
                }
                std::string_view body = text.substr(start, pos - start);
                std::uint16_t trail = 0;
                while (!body.empty() && body.back() == ' ') {
                    body.remove_suffix(1);
                    ++trail;
                }
                if (body.empty()) {
                    // an all-space cell is an empty value with its padding in front
                    field.layout.lead_spaces = static_cast<std::uint16_t>(lead + trail);
                } else {
                    field.layout.lead_spaces = lead;
                    field.layout.trail_spaces = trail;
                }
                field.value.assign(body);
            }

            record.fields.push_back(std::move(field));

            if (pos >= text.size()) {
                record.raw = text.substr(record_start, pos - record_start);
                end_of_record = true;
            } else if (text[pos] == delimiter) {
                ++pos;
            } else {
                record.raw = text.substr(record_start, pos - record_start);
                const std::size_t width = terminator_width(text, pos);
                if (!terminator_seen) {
                    out.line_terminator = std::string(text.substr(pos, width));
                    terminator_seen = true;
                }
                pos += width;
                ++line;
                end_of_record = true;
                if (pos >= text.size()) out.trailing_terminator = true;
            }
        }
        out.records.push_back(std::move(record));
    }
    return out;
}

bool needs_quoting(std::string_view value, char delimiter) {
    if (value.empty()) return false;
    if (value.front() == ' ' || value.back() == ' ') return true;
    for (char c : value) {
        if (c == delimiter || c == '"' || c == '\n' || c == '\r') return true;
    }
    return false;
}

std::string format_field(std::string_view value, const CellLayout& layout, char delimiter) {
    std::string out(layout.lead_spaces, ' ');
    if (layout.quoted || needs_quoting(value, delimiter)) {
        out.push_back('"');
        for (char c : value) {
            if (c == '"') out.push_back('"');
            out.push_back(c);
        }
        out.push_back('"');
    } else {
        out.append(value);
    }
    out.append(layout.trail_spaces, ' ');
    return out;
}

std::string format_record(const std::vector<std::string>& values, char delimiter) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out.push_back(delimiter);
        out += format_field(values[i], CellLayout{}, delimiter);
    }
    return out;
}

std::string write_table(const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows, char delimiter) {
    std::string out = format_record(header, delimiter);
    out.push_back('\n');
    for (const auto& row : rows) {
        out += format_record(row, delimiter);
        out.push_back('\n');
    }
    return out;
}

}  // namespace tabaudit::csv
