#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include <json.hpp>

#include "corpus.hpp"
#include "hurdle.hpp"

namespace tg {

struct SynthConfig {
    std::uint64_t seed = 1;
    int first_year = 2010;
    int last_year = 2021;
    int focal_year = 2015;

    int n_topics = 24;
    // Explicit yearly counts per topic. When empty, schedules are drawn from base/ratio ranges:
    // `base` publications per year up to the focal year and round(base * ratio) afterwards.
    std::vector<std::map<int, std::int64_t>> schedules;
    int base_min = 20;
    int base_max = 40;
    double ratio_min = 0.6;
    double ratio_max = 2.5;

    // Planted hierarchy: topics are grouped into specialties, disciplines and areas in order.
    int topics_per_specialty = 3;
    int specialties_per_discipline = 2;
    int disciplines_per_area = 2;

    // Where a citation comes from: the cited publication's own topic with within_topic_prob;
    // otherwise split over the hierarchy by the remaining shares (the rest goes anywhere).
    double within_topic_prob = 0.9;
    double same_specialty_share = 0.5;
    double same_discipline_share = 0.3;
    double same_area_share = 0.15;

    // log E[citations] = b0 + b_growth * growth + b_authors * authors + b_refs * refs + b_jif * jif
    std::array<double, 5> beta{0.2, 0.8, 0.03, 0.01, 0.25};
    double dispersion = 2.0;  // negative binomial size

    double review_fraction = 0.08;
    double other_fraction = 0.05;
    double authors_geometric_p = 0.3;  // authors = 1 + Geometric(p)
    double refs_mean = 40.0;
    double refs_size = 5.0;
    int n_journals = 60;
    double jif_log_mean = 0.8;
    double jif_log_sd = 0.6;
    int min_references = 2;

    double dominant_term_prob = 0.8;
    int secondary_terms_per_topic = 4;
    int shared_terms = 150;

    void validate() const;
};

SynthConfig synth_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SynthConfig& c);

struct PlantedTopic {
    std::uint32_t id = 0;
    std::uint32_t specialty = 0;
    std::uint32_t discipline = 0;
    std::uint32_t area = 0;
    std::map<int, std::int64_t> schedule;
    double growth_ratio = 0.0;  // exact three-year smoothed ratio at the focal year
    std::string dominant_term;
};

struct SynthTruth {
    std::vector<PlantedTopic> topics;
    std::vector<std::uint32_t> topic_of;         // per publication, aligned with pubs
    std::vector<std::int64_t> planted_citations;  // per publication, realized draw
    std::size_t truncated_citations = 0;          // draws that found no free citing publication
    std::array<double, 5> beta{};
    double dispersion = 0.0;
};

struct SynthCorpus {
    std::vector<Publication> pubs;
    std::vector<CitationEdge> edges;
    SynthTruth truth;
};

SynthCorpus generate_corpus(const SynthConfig& cfg);

// Writes publications.tsv, citations.tsv and truth.json.
void write_synth(const std::filesystem::path& dir, const SynthConfig& cfg, const SynthCorpus& corpus);

// Rows with covariates drawn like the corpus generator and a logistic outcome:
// P(citations > 3) = logistic(beta . x). Low rows get 0-3 citations, high rows 4 or more.
std::vector<RegressionRow> generate_logistic_rows(const SynthConfig& cfg, std::size_t n,
                                                  const std::array<double, 5>& beta, std::uint64_t seed);

// Deterministic pronounceable pseudo-word for an index; distinct indices give distinct words.
std::string pseudo_word(std::uint64_t index);

}  // namespace tg
