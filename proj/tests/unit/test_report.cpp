#include <doctest.h>

#include "../support.hpp"
#include "error.hpp"
#include "report.hpp"

using namespace tg;

namespace {

RegressionRow row(std::int64_t c, double g, int a, int r, double j) {
    RegressionRow x;
    x.citations = c;
    x.growth_ratio = g;
    x.num_authors = a;
    x.num_references = r;
    x.jif = j;
    return x;
}

}  // namespace

TEST_CASE("number formatting") {
    CHECK(format_count(15869) == "15,869");
    CHECK(format_count(999) == "999");
    CHECK(format_count(1000000) == "1,000,000");
    CHECK(format_count(0) == "0");
    CHECK(format_average(19.44) == "19.4");
    CHECK(format_average(12.0) == "12");
    CHECK(format_average(1.06) == "1.1");
}

TEST_CASE("emit_discipline_summary") {
    SUBCASE("a single row gives that row") {
        auto a = emit_discipline_summary(2, "x", {row(7, 1.25, 3, 40, 2.5)});
        CHECK(a.n == 1);
        CHECK(a.citations == 7.0);
        CHECK(a.growth_ratio == 1.25);
        CHECK(a.authors == 3.0);
        CHECK(a.references == 40.0);
        CHECK(a.jif == 2.5);
    }
    SUBCASE("four rows match a hand computation") {
        auto a = emit_discipline_summary(0, "x", {row(4, 1.0, 1, 10, 1.0), row(10, 2.0, 2, 20, 2.0),
                                                  row(0, 0.5, 5, 30, 4.0), row(2, 1.5, 4, 0, 3.0)});
        CHECK(a.citations == 4.0);
        CHECK(a.growth_ratio == 1.25);
        CHECK(a.authors == 3.0);
        CHECK(a.references == 15.0);
        CHECK(a.jif == 2.5);
    }
    SUBCASE("psychology-like means format like the published averages row") {
        DisciplineAverages a{0, "psychology; cognition; cognitive neuroscience", 10, 19.42, 4.08, 54.71, 1.07, 3.2};
        auto t = averages_table({a});
        CHECK(t.header == std::vector<std::string>{"discipline_id", "Discipline (machine generated label)",
                                                   "Avg. no. of citations", "Avg. no. of authors",
                                                   "Avg. no. of references", "Avg. growth ratio", "Avg. JIF"});
        CHECK(t.rows[0] == std::vector<std::string>{"0", "psychology; cognition; cognitive neuroscience", "19.4",
                                                    "4.1", "54.7", "1.1", "3.2"});
    }
    CHECK(emit_discipline_summary(1, "x", {}).n == 0);
}

TEST_CASE("counts_table") {
    auto t = counts_table({{3, "a; b; c", 15869, 15020, 412}});
    CHECK(t.rows[0] == std::vector<std::string>{"3", "a; b; c", "15,869", "15,020", "412"});
}

TEST_CASE("histogram") {
    std::vector<double> v{0.0, 0.5, 1.0, 2.49, 2.5, 9.99, 10.0, 10.01, -1.0};
    auto h = histogram(v, 10.0, 4);
    CHECK(h.width() == 2.5);
    CHECK(h.counts == std::vector<std::int64_t>{4, 1, 0, 2});
    CHECK(h.excluded == 2);
    CHECK_THROWS_AS(histogram(v, 0.0, 4), ArgumentError);
}

TEST_CASE("histogram caps") {
    const std::pair<const char*, double> expect[] = {
        {"citations", 2000}, {"growth_ratio", 10}, {"num_authors", 30}, {"num_references", 300}, {"jif", 30}};
    REQUIRE(std::size(kHistogramVariables) == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(std::string(kHistogramVariables[i].name) == expect[i].first);
        CHECK(kHistogramVariables[i].cap == expect[i].second);
    }
}

TEST_CASE("emit_figures") {
    testing::TempDir d("figures");
    std::vector<RegressionRow> rows;
    for (int i = 0; i < 50; ++i) rows.push_back(row(i * 3, 0.5 + i * 0.05, 1 + i % 7, 10 + i, 0.5 + 0.1 * i));
    SUBCASE("no converged fits: figure 3 omitted with a notice") {
        auto r = emit_figures(rows, {{0, "x", {}}}, d.path());
        CHECK(!r.notices.empty());
        CHECK(std::filesystem::exists(d / "figure1.svg"));
        CHECK(std::filesystem::exists(d / "figure2.svg"));
        CHECK(!std::filesystem::exists(d / "figure3_0.svg"));
        auto csv = testing::read_file(d / "figure1_citations.csv");
        CHECK(csv.rfind("bin_lower,bin_upper,count\n", 0) == 0);
    }
    SUBCASE("a converged fit produces quantile series") {
        QuantileFit f;
        f.quantile = 0.5;
        f.coefficients.push_back({"growth_ratio", 1.0, 0.5, 1.5, 0.2, 0.01});
        auto r = emit_figures(rows, {{0, "x", {f}}}, d.path());
        CHECK(r.notices.empty());
        CHECK(std::filesystem::exists(d / "figure3_0.svg"));
        CHECK(testing::read_file(d / "figure3_0.csv").find("0.5,growth_ratio,1,0.5,1.5") != std::string::npos);
    }
}
