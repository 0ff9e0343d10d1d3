#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "citegraph.hpp"
#include "cluster.hpp"
#include "corpus.hpp"
#include "hurdle.hpp"
#include "label.hpp"
#include "synth.hpp"

namespace tg {

struct GrowthConfig {
    int t = 2015;
    int dt = 3;
    int window = 3;
    double min_mean = 5.0;
    std::set<DocType> doc_types;  // document types counted in the series; empty counts all
};

struct RunConfig {
    // Raw corpus. When both are empty the corpus comes from the synth stage (<out>/corpus).
    std::filesystem::path publications;
    std::filesystem::path citations;
    std::filesystem::path lexicon;  // optional token<TAB>pos file
    std::filesystem::path out_dir = "out";
    std::uint64_t seed = 42;

    CorpusFilter filter;
    Normalization normalization = Normalization::TotalLinks;
    ClusterConfig cluster;
    // topic, specialty, discipline, area; strictly decreasing
    std::vector<double> resolutions{0.000125, 0.00003, 0.000008, 0.000002};
    LabelConfig label;
    GrowthConfig growth;
    McmcConfig mcmc;
    int hurdle = 3;
    std::vector<std::uint32_t> disciplines;  // explicit selection; empty picks the largest
    int top_disciplines = 8;
    bool figures = true;
    SynthConfig synth;

    void validate() const;
};

// Unknown keys are rejected so typos do not pass silently.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& c);

inline constexpr const char* kStages[] = {"synth", "ingest", "cluster", "label", "growth", "fit", "report"};

struct RunReport {
    std::vector<std::string> stages_run;
    std::vector<std::string> warnings;
    std::vector<std::pair<std::string, double>> timings;  // seconds per stage
};

// Runs one stage, reading the previous stages' artifacts from cfg.out_dir.
// Failures are rethrown as StageError carrying the stage name.
void run_stage(const RunConfig& cfg, const std::string& stage, RunReport& report);

// ingest -> cluster -> label -> growth -> fit -> report (synth first when no corpus paths are set),
// then run_metadata.json and timings.txt.
RunReport run_pipeline(const RunConfig& cfg);

// Corpus paths the ingest stage will read.
std::filesystem::path publications_input(const RunConfig& cfg);
std::filesystem::path citations_input(const RunConfig& cfg);

// Seed for an independent stream, mixed from a base seed and stream coordinates.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

}  // namespace tg
