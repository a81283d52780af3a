#include "radialkit/table.hpp"

#include <fstream>
#include <sstream>

#include "radialkit/errors.hpp"
#include "radialkit/image_io.hpp"
#include "radialkit/text.hpp"

namespace radialkit {

namespace {

// Splits one record starting at `pos`; advances past its line terminator.
std::vector<std::string> parse_record(std::string_view text, std::size_t& pos, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool was_quoted = false;
    while (pos < text.size()) {
        const char c = text[pos];
        if (quoted) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field += '"';
                    pos += 2;
                    continue;
                }
                quoted = false;
                ++pos;
                continue;
            }
            field += c;
            ++pos;
            continue;
        }
        if (c == '"' && field.empty() && !was_quoted) {
            quoted = true;
            was_quoted = true;
            ++pos;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            was_quoted = false;
            ++pos;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
            ++pos;
            break;
        } else {
            field += c;
            ++pos;
        }
    }
    if (quoted) throw ParseError("CSV line " + std::to_string(line_no) + ": unterminated quoted field");
    fields.push_back(std::move(field));
    return fields;
}

bool blank_line(std::string_view text, std::size_t pos) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    return pos >= text.size() || text[pos] == '\n' || text[pos] == '\r';
}

void skip_line(std::string_view text, std::size_t& pos) {
    while (pos < text.size() && text[pos] != '\n') ++pos;
    if (pos < text.size()) ++pos;
}

}  // namespace

CsvTable CsvTable::parse(std::string_view text) {
    CsvTable table;
    std::size_t pos = 0;
    std::size_t line_no = 1;
    if (text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;
    while (pos < text.size() && (text[pos] == '#' || blank_line(text, pos))) {
        const std::size_t start = pos;
        skip_line(text, pos);
        if (text[start] == '#') table.preamble_.emplace_back(trim(text.substr(start, pos - start)));
        ++line_no;
    }
    if (pos >= text.size()) throw ParseError("CSV: missing header row");
    for (auto& name : parse_record(text, pos, line_no)) table.header_.emplace_back(trim(name));
    ++line_no;
    while (pos < text.size()) {
        if (blank_line(text, pos)) {
            skip_line(text, pos);
            ++line_no;
            continue;
        }
        auto row = parse_record(text, pos, line_no);
        if (row.size() != table.header_.size()) {
            throw ParseError("CSV line " + std::to_string(line_no) + ": expected " +
                             std::to_string(table.header_.size()) + " fields, got " + std::to_string(row.size()));
        }
        table.rows_.push_back(std::move(row));
        ++line_no;
    }
    return table;
}

CsvTable CsvTable::read(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    try {
        return parse(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (header_[i] == name) return i;
    }
    return std::nullopt;
}

std::size_t CsvTable::require_column(std::string_view name) const {
    if (const auto c = column(name)) return *c;
    throw ParseError("CSV: missing column '" + std::string(name) + "'");
}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw InvalidArgument("CSV row width does not match header");
    rows_.push_back(std::move(row));
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string CsvTable::to_string() const {
    std::ostringstream out;
    const auto write_row = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << csv_escape(row[i]);
        }
        out << '\n';
    };
    for (const auto& line : preamble_) out << line << '\n';
    write_row(header_);
    for (const auto& row : rows_) write_row(row);
    return out.str();
}

void CsvTable::write(const std::filesystem::path& path) const {
    const std::string text = to_string();
    write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

double csv_double(const CsvTable& table, std::size_t row, std::size_t column) {
    const std::string& field = table.rows()[row][column];
    const auto value = parse_double(trim(field));
    if (!value) {
        throw ParseError("CSV row " + std::to_string(row + 1) + ", column '" + table.header()[column] +
                         "': not a number: '" + field + "'");
    }
    return *value;
}

int csv_flag(const CsvTable& table, std::size_t row, std::size_t column) {
    const auto field = trim(table.rows()[row][column]);
    if (field == "0" || field == "false") return 0;
    if (field == "1" || field == "true") return 1;
    throw ParseError("CSV row " + std::to_string(row + 1) + ", column '" + table.header()[column] +
                     "': expected 0 or 1");
}

}  // namespace radialkit
