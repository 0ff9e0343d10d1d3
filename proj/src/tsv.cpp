#include "tsv.hpp"

#include <charconv>
#include <cmath>

#include "error.hpp"

namespace tg::tsv {

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

int Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

Table read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    Table t;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!have_header) {
            if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
                line.erase(0, 3);
            t.header = split(line);
            have_header = true;
            continue;
        }
        if (line.empty()) continue;
        t.rows.push_back(split(line));
        t.line_numbers.push_back(lineno);
    }
    if (!have_header) throw InputError(path.string() + ": missing header row");
    return t;
}

std::int64_t parse_int(std::string_view text) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size() || text.empty())
        throw InputError("not an integer: '" + std::string(text) + "'");
    return v;
}

double parse_double(std::string_view text) {
    double v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size() || text.empty() || !std::isfinite(v))
        throw InputError("not a finite number: '" + std::string(text) + "'");
    return v;
}

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

Writer::Writer(const std::filesystem::path& path) : out_(path), path_(path) {
    if (!out_) throw InputError("cannot write " + path.string());
}

Writer& Writer::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << '\t';
        out_ << cells[i];
    }
    out_ << '\n';
    return *this;
}

}  // namespace tg::tsv
