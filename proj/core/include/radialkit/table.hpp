#pragma once

// Minimal CSV with a mandatory header row. Fields containing a comma, quote
// or newline are double-quoted on output; quoted fields are accepted on input.
// Lines starting with '#' before the header are treated as preamble.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace radialkit {

class CsvTable {
public:
    CsvTable() = default;
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    static CsvTable parse(std::string_view text);
    static CsvTable read(const std::filesystem::path& path);

    const std::vector<std::string>& header() const noexcept { return header_; }
    const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }
    const std::vector<std::string>& preamble() const noexcept { return preamble_; }
    std::size_t size() const noexcept { return rows_.size(); }

    std::optional<std::size_t> column(std::string_view name) const;
    /// Throws ParseError naming the missing column.
    std::size_t require_column(std::string_view name) const;

    void add_row(std::vector<std::string> row);
    void add_preamble(std::string line) { preamble_.push_back(std::move(line)); }

    /// LF line endings, no trailing spaces.
    std::string to_string() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
    std::vector<std::string> preamble_;
};

std::string csv_escape(std::string_view field);

/// Field accessors that throw ParseError with row context.
double csv_double(const CsvTable& table, std::size_t row, std::size_t column);
int csv_flag(const CsvTable& table, std::size_t row, std::size_t column);

}  // namespace radialkit
