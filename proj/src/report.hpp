#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hurdle.hpp"

namespace tg {

// "15869" -> "15,869"
std::string format_count(std::int64_t n);
// One decimal, trailing zeros dropped: 19.44 -> "19.4", 12.0 -> "12".
std::string format_average(double x);

struct DisciplineCounts {
    std::uint32_t discipline = 0;
    std::string label;
    std::int64_t total = 0;     // focal-year publications in the discipline
    std::int64_t included = 0;  // after dropping publications in small topics
    std::int64_t topics = 0;    // eligible topics
};

Table counts_table(const std::vector<DisciplineCounts>& d);

struct DisciplineAverages {
    std::uint32_t discipline = 0;
    std::string label;
    std::size_t n = 0;
    double citations = 0.0;
    double authors = 0.0;
    double references = 0.0;
    double growth_ratio = 0.0;
    double jif = 0.0;
};

// Per-publication means over the assembled rows. No rows gives n = 0 and zero means.
DisciplineAverages emit_discipline_summary(std::uint32_t discipline, const std::string& label,
                                           const std::vector<RegressionRow>& rows);
Table averages_table(const std::vector<DisciplineAverages>& d);

struct Histogram {
    double cap = 0.0;
    std::vector<std::int64_t> counts;  // equal-width bins over [0, cap]; cap itself lands in the last bin
    std::int64_t excluded = 0;         // values above the cap or below zero
    double width() const { return counts.empty() ? 0.0 : cap / static_cast<double>(counts.size()); }
};

Histogram histogram(std::span<const double> values, double cap, int bins = 40);

struct FigureVariable {
    const char* name;
    double cap;
};
// x-axis caps of the variable histograms.
inline constexpr FigureVariable kHistogramVariables[] = {
    {"citations", 2000.0}, {"growth_ratio", 10.0}, {"num_authors", 30.0}, {"num_references", 300.0}, {"jif", 30.0}};

std::vector<double> column_values(const std::vector<RegressionRow>& rows, std::string_view variable);

struct DisciplineFits {
    std::uint32_t discipline = 0;
    std::string label;
    std::vector<QuantileFit> quantiles;
};

struct FigureReport {
    std::vector<std::filesystem::path> written;
    std::vector<std::string> notices;
};

// Histogram and scatter CSVs plus one SVG per figure under `dir`.
FigureReport emit_figures(const std::vector<RegressionRow>& rows, const std::vector<DisciplineFits>& fits,
                          const std::filesystem::path& dir);

}  // namespace tg
