#include <doctest.h>

#include <json.hpp>

#include "../support.hpp"
#include "error.hpp"
#include "pipeline.hpp"

using namespace tg;
using nlohmann::json;

namespace {

RunConfig small_run(const std::filesystem::path& out) {
    json j = {{"seed", 5},
              {"out_dir", out.string()},
              {"resolutions", {0.001, 0.0001, 0.00003, 0.000006}},
              {"cluster", {{"min_class_size", 10}}},
              {"mcmc", {{"ndraw", 1000}, {"thin", 2}, {"burnin_kept", 100}, {"quantiles", {0.25, 0.5, 0.75}}}},
              {"top_disciplines", 2},
              {"synth", {{"n_topics", 12}}}};
    return run_config_from_json(j);
}

std::string first_line(const std::filesystem::path& p) {
    auto s = testing::read_file(p);
    return s.substr(0, s.find('\n'));
}

}  // namespace

TEST_CASE("config parsing") {
    SUBCASE("defaults") {
        auto c = run_config_from_json(json::object());
        CHECK(c.seed == 42);
        CHECK(c.hurdle == 3);
        CHECK(c.label.alpha == 0.67);
        CHECK(c.growth.t == 2015);
        CHECK(c.growth.dt == 3);
        CHECK(c.growth.min_mean == 5.0);
        CHECK(c.synth.seed == 42);
        CHECK(c.resolutions.size() == 4);
    }
    SUBCASE("unknown keys are rejected at every level") {
        CHECK_THROWS_WITH_AS(run_config_from_json(json{{"sede", 1}}), doctest::Contains("unknown config key 'sede'"),
                             ArgumentError);
        CHECK_THROWS_AS(run_config_from_json(json{{"mcmc", {{"ndraws", 10}}}}), ArgumentError);
        CHECK_THROWS_AS(run_config_from_json(json{{"synth", {{"topics", 3}}}}), ArgumentError);
        CHECK_THROWS_AS(run_config_from_json(json::array()), ArgumentError);
    }
    SUBCASE("filter and seed handling") {
        auto c = run_config_from_json(json{{"seed", 9}, {"filter", {{"cutoff_date", "2021-03-31"}, {"focal_year", 2016}}}});
        CHECK(c.filter.cutoff_date == 20210331);
        CHECK(c.growth.t == 2016);
        CHECK(c.synth.seed == 9);
        CHECK_THROWS_AS(run_config_from_json(json{{"filter", {{"cutoff_date", "20210331"}}}}), ArgumentError);
    }
    SUBCASE("validation") {
        auto c = run_config_from_json(json::object());
        c.resolutions = {1e-4, 1e-3};
        CHECK_THROWS_AS(c.validate(), ArgumentError);
        c = run_config_from_json(json::object());
        c.publications = "p.tsv";
        CHECK_THROWS_AS(c.validate(), ArgumentError);
    }
    SUBCASE("round trip") {
        auto c = small_run("/tmp/x");
        CHECK(to_json(run_config_from_json(to_json(c))) == to_json(c));
    }
}

TEST_CASE("derive_seed separates streams") {
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
    CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
}

TEST_CASE("empty corpus aborts before clustering") {
    testing::TempDir d("empty");
    testing::write_file(d / "p.tsv", "pub_id\tyear\tdoc_type\tjournal_id\tjif\tn_authors\tn_references\ttitle\n");
    testing::write_file(d / "c.tsv", "citing\tcited\tciting_year\n");
    auto c = run_config_from_json(json{{"publications", (d / "p.tsv").string()},
                                       {"citations", (d / "c.tsv").string()},
                                       {"out_dir", (d / "out").string()}});
    try {
        run_pipeline(c);
        FAIL("expected an error");
    } catch (const StageError& e) {
        CHECK(e.stage() == "ingest");
        CHECK(std::string(e.what()).find("empty corpus") != std::string::npos);
    }
    CHECK(!std::filesystem::exists(d / "out" / "classification.tsv"));
}

TEST_CASE("a stage without its inputs reports the stage name") {
    testing::TempDir d("missing");
    auto c = small_run(d / "out");
    RunReport r;
    try {
        run_stage(c, "growth", r);
        FAIL("expected an error");
    } catch (const StageError& e) {
        CHECK(e.stage() == "growth");
    }
    CHECK_THROWS_AS(run_stage(c, "bogus", r), StageError);
}

TEST_CASE("full pipeline on a small synthetic corpus") {
    testing::TempDir d("pipeline");
    auto c = small_run(d / "out");
    auto r = run_pipeline(c);
    CHECK(r.stages_run == std::vector<std::string>{"synth", "ingest", "cluster", "label", "growth", "fit", "report"});
    const auto out = d / "out";
    CHECK(first_line(out / "classification.tsv") == "pub_id\ttopic_id\tspecialty_id\tdiscipline_id\tarea_id");
    CHECK(first_line(out / "labels.tsv").rfind("class_id\tlevel\tlabel", 0) == 0);
    CHECK(first_line(out / "growth.tsv") == "topic_id\tmean_base\tmean_later\tratio\teligible");
    CHECK(first_line(out / "table1.tsv") ==
          "discipline_id\tDiscipline (machine generated label)\t# Publ. (total)\t# Publ. (included)\t# Topics");
    auto fits = json::parse(testing::read_file(out / "fits.json"));
    CHECK(fits.at("hurdle") == 3);
    CHECK(fits.at("disciplines").size() == 2);
    for (const auto& dj : fits.at("disciplines")) {
        const auto id = std::to_string(dj.at("discipline").get<int>());
        CHECK(std::filesystem::exists(out / ("quantile_" + id + ".tsv")));
        CHECK(dj.at("quantiles").size() == 3);
        if (!dj.at("logistic").is_null()) {
            CHECK(first_line(out / ("logistic_" + id + ".tsv")) ==
                  "term\tEstimate\tExp. Estimate\tSE\tz-value\tp-value\tSignif.");
        }
        CHECK(dj.at("label").get<std::string>().find("unlabeled") == std::string::npos);
    }
    auto meta = json::parse(testing::read_file(out / "run_metadata.json"));
    CHECK(meta.at("seed") == 5);
    CHECK(meta.at("quantile_fits").size() == 6);
    CHECK(meta.contains("version"));
    CHECK(std::filesystem::exists(out / "figures" / "figure1.svg"));
    CHECK(std::filesystem::exists(out / "timings.txt"));

    // every discipline-level class with titled publications receives a real label
    std::istringstream labels(testing::read_file(out / "labels.tsv"));
    std::string line;
    std::getline(labels, line);
    int discipline_labels = 0;
    while (std::getline(labels, line)) {
        if (line.find("\tdiscipline\t") == std::string::npos) continue;
        ++discipline_labels;
        CHECK(line.find("unlabeled") == std::string::npos);
        const auto label = line.substr(line.find("\tdiscipline\t") + 12);
        CHECK(!label.empty());
    }
    CHECK(discipline_labels >= 2);
}
