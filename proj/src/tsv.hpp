#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace tg::tsv {

std::vector<std::string> split(std::string_view line, char sep = '\t');

// Reads a tab-separated file with a header row. Rows keep their 1-based file line number.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;

    // Index of a column or -1.
    int column(std::string_view name) const;
};

Table read(const std::filesystem::path& path);

std::int64_t parse_int(std::string_view text);
double parse_double(std::string_view text);

// Shortest round-trippable decimal representation.
std::string format_double(double v);

class Writer {
public:
    explicit Writer(const std::filesystem::path& path);
    Writer& row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
    std::filesystem::path path_;
};

}  // namespace tg::tsv
