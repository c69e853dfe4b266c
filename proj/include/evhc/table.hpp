#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace evhc {

/// Comma-separated table with a header row. Blank lines and lines starting
/// with '#' are skipped; cells are whitespace-trimmed.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index of `name`; throws ConfigError when absent.
    std::size_t column(std::string_view name) const;
};

Table parse_csv(std::string_view text);

/// Strict numeric conversion; `where` is used in the error message.
double parse_double(std::string_view cell, std::string_view where);
long long parse_int(std::string_view cell, std::string_view where);

/// Locale-independent fixed-point rendering used for every result file.
std::string format_fixed(double value, int decimals = 6);
/// Shortest text that parses back to exactly `value`.
std::string format_shortest(double value);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    CsvWriter& cell(std::string_view text);
    CsvWriter& cell(double value, int decimals = 6);
    CsvWriter& cell(long long value);
    CsvWriter& cell(std::size_t value) { return cell(static_cast<long long>(value)); }
    CsvWriter& cell(int value) { return cell(static_cast<long long>(value)); }
    void end_row();

    const std::string& str() const { return out_; }

private:
    std::size_t columns_;
    std::size_t filled_ = 0;
    std::string out_;
};

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace evhc
