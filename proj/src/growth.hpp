#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"

namespace tg {

struct TopicSeries {
    std::uint32_t topic_id = 0;
    std::map<int, std::int64_t> counts;  // year -> publications
};

// Yearly publication counts per topic over `years`. Every year in range is present.
// An empty doc_types set counts all document types.
std::vector<TopicSeries> topic_series(const std::vector<Publication>& pubs,
                                      const std::unordered_map<PubId, std::uint32_t>& topic_of,
                                      std::uint32_t n_topics, const YearRange& years,
                                      const std::set<DocType>& doc_types = {});

// Single-year ratio p(t + dt) / p(t).
double growth_ratio(const TopicSeries& s, int t, int dt);

struct GrowthRecord {
    std::uint32_t topic_id = 0;
    // Window sums are kept exactly; means are sum / window.
    std::int64_t base_sum = 0;
    std::int64_t later_sum = 0;
    int window = 3;
    double mean_base = 0.0;
    double mean_later = 0.0;
    double ratio = 0.0;
    bool eligible = false;
    int missing_years = 0;  // years absent from the series, counted as zero
};

// Ratio of the mean count over {t+dt-2 .. t+dt} to the mean over {t-2 .. t}.
GrowthRecord smoothed_growth_ratio(const TopicSeries& s, int t, int dt, int window = 3);

// eligible <=> mean_base > min_mean and mean_later > min_mean.
std::vector<GrowthRecord> filter_topics(std::vector<GrowthRecord> records, double min_mean = 5.0);

void write_growth(const std::filesystem::path& path, const std::vector<GrowthRecord>& records);
std::vector<GrowthRecord> read_growth(const std::filesystem::path& path);

}  // namespace tg
