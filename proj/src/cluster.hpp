#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "citegraph.hpp"

namespace tg {

// Total assignment of graph nodes (by index) to dense class ids [0, n_classes).
struct Partition {
    std::vector<std::uint32_t> assignment;
    std::uint32_t n_classes = 0;

    static Partition singletons(std::size_t n);
    static Partition from_labels(std::vector<std::uint32_t> labels);

    // Relabels classes densely in order of first occurrence.
    void renumber();
    std::vector<std::int64_t> class_sizes(const WeightedCitationGraph& g) const;
    std::vector<std::vector<std::uint32_t>> members() const;

    bool operator==(const Partition&) const = default;
};

struct ClusterConfig {
    double resolution = 0.000125;
    int iterations = 100;
    std::uint64_t seed = 0;
    int min_class_size = 50;
    // Leiden refinement randomness (theta).
    double randomness = 0.01;
    // Independent random starts; the best quality wins.
    int starts = 1;

    void validate() const;
};

// Constant Potts model: sum over classes of W_c - resolution * n_c (n_c - 1) / 2.
double cpm_quality(const WeightedCitationGraph& g, const Partition& p, double resolution);

Partition leiden_cpm(const WeightedCitationGraph& g, const ClusterConfig& cfg);

struct ReclassifyResult {
    Partition partition;
    std::vector<bool> orphan;  // per class: small but without external links
};

// Dissolves classes smaller than min_size into their most strongly linked neighbour class.
ReclassifyResult reclassify_small(const WeightedCitationGraph& g, const Partition& p, int min_size);

// One node per class; node ids are class ids.
WeightedCitationGraph aggregate_network(const WeightedCitationGraph& g, const Partition& p);

inline constexpr const char* kLevelNames[] = {"topic", "specialty", "discipline", "area"};

struct ClassificationHierarchy {
    // Each level maps original node index -> class id at that level; finest first.
    std::vector<Partition> levels;
    // parent[L][class at L] = class at L+1.
    std::vector<std::vector<std::uint32_t>> parent;
    std::vector<bool> topic_orphan;
    std::vector<double> resolutions;
};

ClassificationHierarchy build_hierarchy(const WeightedCitationGraph& g,
                                        const std::vector<double>& resolutions,
                                        const ClusterConfig& cfg);

// Columns pub_id, topic_id, specialty_id, discipline_id, area_id. Missing levels repeat the coarsest.
void write_classification(const std::filesystem::path& path, const WeightedCitationGraph& g,
                          const ClassificationHierarchy& h);

struct ClassificationTable {
    std::vector<PubId> pub_ids;
    std::vector<std::array<std::uint32_t, 4>> ids;  // topic, specialty, discipline, area
};
ClassificationTable read_classification(const std::filesystem::path& path);

double adjusted_rand_index(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b);

}  // namespace tg
