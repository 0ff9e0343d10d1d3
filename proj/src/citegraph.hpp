#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "corpus.hpp"

namespace tg {

// How many links a publication's unit of weight is spread over.
enum class Normalization {
    TotalLinks,  // in-links plus out-links; each endpoint attributes 1/L to the link
    OutLinks,    // out-links only; only the citing side attributes 1/L_out
};

std::string_view to_string(Normalization n);
Normalization parse_normalization(std::string_view s);

struct Link {
    std::uint32_t a = 0;  // a < b
    std::uint32_t b = 0;
    bool a_cites_b = false;
    bool b_cites_a = false;
    double from_a = 0.0;  // weight attributed from a's side
    double from_b = 0.0;
    double weight = 1.0;  // undirected clustering weight

    bool operator==(const Link&) const = default;
};

// Undirected graph over publications (or over classes after aggregation).
// Node i carries node_size[i] publications and self_weight[i] of internal link mass.
struct WeightedCitationGraph {
    std::vector<PubId> nodes;  // ascending ids
    std::vector<Link> links;   // canonical (a, b) order
    std::vector<std::int64_t> node_size;
    std::vector<double> self_weight;
    std::optional<Normalization> normalization;

    std::size_t node_count() const { return nodes.size(); }
    std::optional<std::uint32_t> index_of(PubId id) const;
    std::int64_t total_size() const;
};

struct BuildReport {
    std::size_t dropped_out_of_corpus = 0;
    std::size_t duplicate_edges = 0;
};

// One unit-weight link per distinct citing/cited pair with both ends in the corpus.
WeightedCitationGraph build_network(const std::vector<Publication>& pubs,
                                    const std::vector<CitationEdge>& edges,
                                    BuildReport* report = nullptr);

// Recomputes weights from link counts; prior weights are ignored.
WeightedCitationGraph normalize_links(const WeightedCitationGraph& g,
                                      Normalization mode = Normalization::TotalLinks);

// Sum of weights each node attributes to its own links.
std::vector<double> attributed_weight_sums(const WeightedCitationGraph& g);

// Graph with explicit nodes/links/weights (unit sizes, no self weight). Used by tests and the C API.
WeightedCitationGraph make_graph(std::size_t n_nodes,
                                 const std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& links);

void write_graph_tsv(const std::filesystem::path& path, const WeightedCitationGraph& g);

// Compressed adjacency for algorithms; both directions of each link are present.
struct Adjacency {
    std::vector<std::size_t> offsets;
    std::vector<std::uint32_t> targets;
    std::vector<double> weights;

    std::size_t degree(std::uint32_t v) const { return offsets[v + 1] - offsets[v]; }
};

Adjacency build_adjacency(const WeightedCitationGraph& g);

}  // namespace tg
