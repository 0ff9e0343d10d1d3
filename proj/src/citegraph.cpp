#include "citegraph.hpp"

#include <algorithm>
#include <tuple>

#include "error.hpp"
#include "tsv.hpp"

namespace tg {

std::string_view to_string(Normalization n) {
    return n == Normalization::TotalLinks ? "total_links" : "out_links";
}

Normalization parse_normalization(std::string_view s) {
    if (s == "total_links") return Normalization::TotalLinks;
    if (s == "out_links") return Normalization::OutLinks;
    throw ArgumentError("unknown normalization '" + std::string(s) + "'");
}

std::optional<std::uint32_t> WeightedCitationGraph::index_of(PubId id) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
    if (it == nodes.end() || *it != id) return std::nullopt;
    return static_cast<std::uint32_t>(it - nodes.begin());
}

std::int64_t WeightedCitationGraph::total_size() const {
    std::int64_t s = 0;
    for (auto v : node_size) s += v;
    return s;
}

WeightedCitationGraph build_network(const std::vector<Publication>& pubs,
                                    const std::vector<CitationEdge>& edges, BuildReport* report) {
    WeightedCitationGraph g;
    g.nodes.reserve(pubs.size());
    for (const auto& p : pubs) g.nodes.push_back(p.pub_id);
    std::sort(g.nodes.begin(), g.nodes.end());
    g.nodes.erase(std::unique(g.nodes.begin(), g.nodes.end()), g.nodes.end());
    g.node_size.assign(g.nodes.size(), 1);
    g.self_weight.assign(g.nodes.size(), 0.0);

    BuildReport rep;
    // (a, b, a cites b)
    std::vector<std::tuple<std::uint32_t, std::uint32_t, bool>> directed;
    directed.reserve(edges.size());
    for (const auto& e : edges) {
        auto s = g.index_of(e.citing);
        auto t = g.index_of(e.cited);
        if (!s || !t || *s == *t) {
            ++rep.dropped_out_of_corpus;
            continue;
        }
        if (*s < *t) directed.emplace_back(*s, *t, true);
        else directed.emplace_back(*t, *s, false);
    }
    std::sort(directed.begin(), directed.end());
    for (std::size_t i = 0; i < directed.size();) {
        const auto a = std::get<0>(directed[i]);
        const auto b = std::get<1>(directed[i]);
        Link l;
        l.a = a;
        l.b = b;
        std::size_t j = i;
        for (; j < directed.size() && std::get<0>(directed[j]) == a && std::get<1>(directed[j]) == b; ++j) {
            if (std::get<2>(directed[j])) l.a_cites_b = true;
            else l.b_cites_a = true;
        }
        // Mutual citations are one undirected link; only repeats of the same direction are duplicates.
        rep.duplicate_edges += (j - i) - (static_cast<std::size_t>(l.a_cites_b) + l.b_cites_a);
        g.links.push_back(l);
        i = j;
    }
    if (report) *report = rep;
    return g;
}

WeightedCitationGraph normalize_links(const WeightedCitationGraph& g, Normalization mode) {
    WeightedCitationGraph out = g;
    std::vector<std::size_t> count(g.node_count(), 0);
    for (const auto& l : g.links) {
        if (mode == Normalization::TotalLinks) {
            ++count[l.a];
            ++count[l.b];
        } else {
            if (l.a_cites_b) ++count[l.a];
            if (l.b_cites_a) ++count[l.b];
        }
    }
    for (auto& l : out.links) {
        l.from_a = 0.0;
        l.from_b = 0.0;
        if (mode == Normalization::TotalLinks) {
            l.from_a = 1.0 / static_cast<double>(count[l.a]);
            l.from_b = 1.0 / static_cast<double>(count[l.b]);
        } else {
            if (l.a_cites_b) l.from_a = 1.0 / static_cast<double>(count[l.a]);
            if (l.b_cites_a) l.from_b = 1.0 / static_cast<double>(count[l.b]);
        }
        l.weight = l.from_a + l.from_b;
    }
    out.normalization = mode;
    return out;
}

std::vector<double> attributed_weight_sums(const WeightedCitationGraph& g) {
    std::vector<double> sums(g.node_count(), 0.0);
    for (const auto& l : g.links) {
        sums[l.a] += l.from_a;
        sums[l.b] += l.from_b;
    }
    return sums;
}

WeightedCitationGraph make_graph(std::size_t n_nodes,
                                 const std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& links) {
    WeightedCitationGraph g;
    g.nodes.resize(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) g.nodes[i] = static_cast<PubId>(i);
    g.node_size.assign(n_nodes, 1);
    g.self_weight.assign(n_nodes, 0.0);
    for (auto [a, b, w] : links) {
        if (a == b || a >= n_nodes || b >= n_nodes) throw ArgumentError("invalid link endpoint");
        if (!(w > 0)) throw ArgumentError("link weight must be positive");
        Link l;
        l.a = std::min(a, b);
        l.b = std::max(a, b);
        l.a_cites_b = true;
        l.weight = w;
        g.links.push_back(l);
    }
    std::sort(g.links.begin(), g.links.end(),
              [](const Link& x, const Link& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
    for (std::size_t i = 1; i < g.links.size(); ++i)
        if (g.links[i].a == g.links[i - 1].a && g.links[i].b == g.links[i - 1].b)
            throw ArgumentError("duplicate link");
    return g;
}

void write_graph_tsv(const std::filesystem::path& path, const WeightedCitationGraph& g) {
    tsv::Writer w(path);
    w.row({"node_a", "node_b", "weight"});
    for (const auto& l : g.links)
        w.row({std::to_string(g.nodes[l.a]), std::to_string(g.nodes[l.b]), tsv::format_double(l.weight)});
}

Adjacency build_adjacency(const WeightedCitationGraph& g) {
    const std::size_t n = g.node_count();
    Adjacency adj;
    adj.offsets.assign(n + 1, 0);
    for (const auto& l : g.links) {
        ++adj.offsets[l.a + 1];
        ++adj.offsets[l.b + 1];
    }
    for (std::size_t i = 0; i < n; ++i) adj.offsets[i + 1] += adj.offsets[i];
    adj.targets.resize(adj.offsets[n]);
    adj.weights.resize(adj.offsets[n]);
    std::vector<std::size_t> pos(adj.offsets.begin(), adj.offsets.end() - 1);
    for (const auto& l : g.links) {
        adj.targets[pos[l.a]] = l.b;
        adj.weights[pos[l.a]++] = l.weight;
        adj.targets[pos[l.b]] = l.a;
        adj.weights[pos[l.b]++] = l.weight;
    }
    return adj;
}

}  // namespace tg
