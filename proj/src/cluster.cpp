#include "cluster.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <unordered_map>

#include "error.hpp"
#include "tsv.hpp"

namespace tg {

Partition Partition::singletons(std::size_t n) {
    Partition p;
    p.assignment.resize(n);
    std::iota(p.assignment.begin(), p.assignment.end(), 0u);
    p.n_classes = static_cast<std::uint32_t>(n);
    return p;
}

Partition Partition::from_labels(std::vector<std::uint32_t> labels) {
    Partition p;
    p.assignment = std::move(labels);
    p.renumber();
    return p;
}

void Partition::renumber() {
    std::unordered_map<std::uint32_t, std::uint32_t> remap;
    for (auto& c : assignment) {
        auto [it, inserted] = remap.emplace(c, static_cast<std::uint32_t>(remap.size()));
        c = it->second;
    }
    n_classes = static_cast<std::uint32_t>(remap.size());
}

std::vector<std::int64_t> Partition::class_sizes(const WeightedCitationGraph& g) const {
    std::vector<std::int64_t> sizes(n_classes, 0);
    for (std::size_t v = 0; v < assignment.size(); ++v) sizes[assignment[v]] += g.node_size[v];
    return sizes;
}

std::vector<std::vector<std::uint32_t>> Partition::members() const {
    std::vector<std::vector<std::uint32_t>> m(n_classes);
    for (std::size_t v = 0; v < assignment.size(); ++v) m[assignment[v]].push_back(static_cast<std::uint32_t>(v));
    return m;
}

void ClusterConfig::validate() const {
    if (!(resolution > 0)) throw ArgumentError("resolution must be positive");
    if (iterations < 1) throw ArgumentError("iterations must be positive");
    if (min_class_size < 1) throw ArgumentError("min_class_size must be positive");
    if (!(randomness > 0)) throw ArgumentError("randomness must be positive");
    if (starts < 1) throw ArgumentError("starts must be positive");
}

namespace {

void check_total(const WeightedCitationGraph& g, const Partition& p) {
    if (p.assignment.size() != g.node_count()) throw ArgumentError("partition missing a node");
    for (auto c : p.assignment)
        if (c >= p.n_classes) throw ArgumentError("class id out of range");
}

}  // namespace

double cpm_quality(const WeightedCitationGraph& g, const Partition& p, double resolution) {
    check_total(g, p);
    std::vector<double> internal(p.n_classes, 0.0);
    for (std::size_t v = 0; v < g.node_count(); ++v) internal[p.assignment[v]] += g.self_weight[v];
    for (const auto& l : g.links)
        if (p.assignment[l.a] == p.assignment[l.b]) internal[p.assignment[l.a]] += l.weight;
    auto sizes = p.class_sizes(g);
    double q = 0.0;
    for (std::uint32_t c = 0; c < p.n_classes; ++c) {
        const double n = static_cast<double>(sizes[c]);
        q += internal[c] - resolution * n * (n - 1.0) / 2.0;
    }
    return q;
}

namespace {

// Graph at one Leiden level. No self loops in the adjacency.
struct LevelGraph {
    std::size_t n = 0;
    std::vector<std::size_t> off;
    std::vector<std::uint32_t> nbr;
    std::vector<double> w;
    std::vector<std::int64_t> size;
};

LevelGraph to_level(const WeightedCitationGraph& g) {
    auto adj = build_adjacency(g);
    LevelGraph lg;
    lg.n = g.node_count();
    lg.off = std::move(adj.offsets);
    lg.nbr = std::move(adj.targets);
    lg.w = std::move(adj.weights);
    lg.size = g.node_size;
    return lg;
}

// Collapses each group of `labels` into one node.
LevelGraph collapse(const LevelGraph& g, const std::vector<std::uint32_t>& labels, std::uint32_t k) {
    LevelGraph out;
    out.n = k;
    out.size.assign(k, 0);
    std::vector<std::vector<std::uint32_t>> groups(k);
    for (std::uint32_t v = 0; v < g.n; ++v) {
        groups[labels[v]].push_back(v);
        out.size[labels[v]] += g.size[v];
    }
    std::vector<double> acc(k, 0.0);
    std::vector<std::uint32_t> touched;
    out.off.push_back(0);
    for (std::uint32_t c = 0; c < k; ++c) {
        for (auto v : groups[c]) {
            for (std::size_t e = g.off[v]; e < g.off[v + 1]; ++e) {
                auto d = labels[g.nbr[e]];
                if (d == c) continue;
                if (acc[d] == 0.0) touched.push_back(d);
                acc[d] += g.w[e];
            }
        }
        std::sort(touched.begin(), touched.end());
        for (auto d : touched) {
            out.nbr.push_back(d);
            out.w.push_back(acc[d]);
            acc[d] = 0.0;
        }
        touched.clear();
        out.off.push_back(out.nbr.size());
    }
    return out;
}

class LeidenRun {
public:
    LeidenRun(double gamma, double theta, std::mt19937_64& rng) : gamma_(gamma), theta_(theta), rng_(rng) {}

    // Greedy queue-based local moving. comm ids must be < g.n. Returns true if any node moved.
    bool move_nodes_fast(const LevelGraph& g, std::vector<std::uint32_t>& comm) {
        const std::size_t n = g.n;
        std::vector<std::int64_t> csize(n, 0);
        std::vector<std::uint32_t> cmembers(n, 0);
        for (std::uint32_t v = 0; v < n; ++v) {
            csize[comm[v]] += g.size[v];
            ++cmembers[comm[v]];
        }
        std::vector<std::uint32_t> empty;
        for (std::uint32_t c = static_cast<std::uint32_t>(n); c-- > 0;)
            if (cmembers[c] == 0) empty.push_back(c);

        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        std::shuffle(order.begin(), order.end(), rng_);
        std::vector<std::uint32_t> queue(order.begin(), order.end());
        std::vector<char> queued(n, 1);
        std::size_t head = 0;

        std::vector<double> wto(n, 0.0);
        std::vector<std::uint32_t> seen;
        bool moved_any = false;
        while (head < queue.size()) {
            const auto v = queue[head++];
            queued[v] = 0;
            if (head > n && head * 2 > queue.size()) {
                queue.erase(queue.begin(), queue.begin() + static_cast<std::ptrdiff_t>(head));
                head = 0;
            }
            const auto a = comm[v];
            const double sv = static_cast<double>(g.size[v]);
            for (std::size_t e = g.off[v]; e < g.off[v + 1]; ++e) {
                auto c = comm[g.nbr[e]];
                if (wto[c] == 0.0) seen.push_back(c);
                wto[c] += g.w[e];
            }
            double best_gain = wto[a] - gamma_ * sv * static_cast<double>(csize[a] - g.size[v]);
            std::uint32_t best = a;
            for (auto c : seen) {
                if (c == a) continue;
                double gain = wto[c] - gamma_ * sv * static_cast<double>(csize[c]);
                if (gain > best_gain) {
                    best_gain = gain;
                    best = c;
                }
            }
            // An empty community has gain zero.
            if (0.0 > best_gain && cmembers[a] > 1) {
                best = empty.back();
                best_gain = 0.0;
            }
            for (auto c : seen) wto[c] = 0.0;
            seen.clear();
            if (best == a) continue;

            if (cmembers[best] == 0) empty.pop_back();  // best is empty.back()
            csize[a] -= g.size[v];
            --cmembers[a];
            if (cmembers[a] == 0) empty.push_back(a);
            csize[best] += g.size[v];
            ++cmembers[best];
            comm[v] = best;
            moved_any = true;
            for (std::size_t e = g.off[v]; e < g.off[v + 1]; ++e) {
                auto u = g.nbr[e];
                if (!queued[u] && comm[u] != best) {
                    queued[u] = 1;
                    queue.push_back(u);
                }
            }
        }
        return moved_any;
    }

    // Refines each community of `comm` by randomized merging of well-connected singletons.
    std::vector<std::uint32_t> refine(const LevelGraph& g, const std::vector<std::uint32_t>& comm) {
        const std::size_t n = g.n;
        std::vector<std::uint32_t> refined(n);
        std::iota(refined.begin(), refined.end(), 0u);
        std::vector<std::int64_t> rsize(g.size.begin(), g.size.end());
        std::vector<std::uint32_t> rcount(n, 1);
        std::vector<double> ext(n, 0.0);  // E(C, S - C) for refined community C

        std::uint32_t k = 0;
        for (auto c : comm) k = std::max(k, c + 1);
        std::vector<std::vector<std::uint32_t>> groups(k);
        std::vector<std::int64_t> gsize(k, 0);
        for (std::uint32_t v = 0; v < n; ++v) {
            groups[comm[v]].push_back(v);
            gsize[comm[v]] += g.size[v];
        }
        for (std::uint32_t v = 0; v < n; ++v)
            for (std::size_t e = g.off[v]; e < g.off[v + 1]; ++e)
                if (comm[g.nbr[e]] == comm[v]) ext[v] += g.w[e];

        std::vector<double> wto(n, 0.0);
        std::vector<std::uint32_t> seen;
        std::vector<std::uint32_t> cand;
        std::vector<double> cand_gain;
        for (std::uint32_t s = 0; s < k; ++s) {
            auto& members = groups[s];
            if (members.size() < 2) continue;
            const double total = static_cast<double>(gsize[s]);
            std::vector<std::uint32_t> order = members;
            std::shuffle(order.begin(), order.end(), rng_);
            for (auto v : order) {
                const double sv = static_cast<double>(g.size[v]);
                if (rcount[refined[v]] != 1) continue;
                if (ext[v] < gamma_ * sv * (total - sv)) continue;  // not well connected
                for (std::size_t e = g.off[v]; e < g.off[v + 1]; ++e) {
                    auto u = g.nbr[e];
                    if (comm[u] != s) continue;
                    auto c = refined[u];
                    if (wto[c] == 0.0) seen.push_back(c);
                    wto[c] += g.w[e];
                }
                cand.clear();
                cand_gain.clear();
                cand.push_back(refined[v]);
                cand_gain.push_back(0.0);
                double max_gain = 0.0;
                for (auto c : seen) {
                    if (c == refined[v]) continue;
                    const double cs = static_cast<double>(rsize[c]);
                    if (ext[c] < gamma_ * cs * (total - cs)) continue;
                    double gain = wto[c] - gamma_ * sv * cs;
                    if (gain < 0.0) continue;
                    cand.push_back(c);
                    cand_gain.push_back(gain);
                    max_gain = std::max(max_gain, gain);
                }
                std::uint32_t chosen = refined[v];
                if (cand.size() > 1) {
                    std::vector<double> cum(cand.size());
                    double acc = 0.0;
                    for (std::size_t i = 0; i < cand.size(); ++i) {
                        acc += std::exp((cand_gain[i] - max_gain) / theta_);
                        cum[i] = acc;
                    }
                    double r = std::uniform_real_distribution<double>(0.0, acc)(rng_);
                    std::size_t pick = std::upper_bound(cum.begin(), cum.end(), r) - cum.begin();
                    chosen = cand[std::min(pick, cand.size() - 1)];
                }
                if (chosen != refined[v]) {
                    const auto own = refined[v];
                    const double w_vc = wto[chosen];
                    ext[chosen] = ext[chosen] + ext[own] - 2.0 * w_vc;
                    rsize[chosen] += g.size[v];
                    rsize[own] = 0;
                    ext[own] = 0.0;
                    ++rcount[chosen];
                    rcount[own] = 0;
                    refined[v] = chosen;
                }
                for (auto c : seen) wto[c] = 0.0;
                seen.clear();
            }
        }
        return refined;
    }

private:
    double gamma_;
    double theta_;
    std::mt19937_64& rng_;
};

std::uint32_t renumber_labels(std::vector<std::uint32_t>& labels) {
    std::uint32_t next = 0;
    std::uint32_t maxl = 0;
    for (auto l : labels) maxl = std::max(maxl, l);
    std::vector<std::uint32_t> remap(static_cast<std::size_t>(maxl) + 1, UINT32_MAX);
    for (auto& l : labels) {
        if (remap[l] == UINT32_MAX) remap[l] = next++;
        l = remap[l];
    }
    return next;
}

// One full Leiden pass starting from `start` on the base graph.
std::vector<std::uint32_t> leiden_pass(const LevelGraph& base, std::vector<std::uint32_t> start,
                                       double gamma, double theta, std::mt19937_64& rng) {
    LeidenRun run(gamma, theta, rng);
    LevelGraph g = base;
    std::vector<std::uint32_t> comm = std::move(start);
    renumber_labels(comm);
    // Original node -> node at current level.
    std::vector<std::uint32_t> to_level(base.n);
    std::iota(to_level.begin(), to_level.end(), 0u);

    while (true) {
        run.move_nodes_fast(g, comm);
        const std::uint32_t k = renumber_labels(comm);
        if (k == g.n) break;
        auto refined = run.refine(g, comm);
        std::uint32_t kr = renumber_labels(refined);
        // Without any refinement merge the level would not shrink; aggregate by the partition itself.
        if (kr == g.n) {
            refined = comm;
            kr = k;
        }
        std::vector<std::uint32_t> next_comm(kr);
        for (std::uint32_t v = 0; v < g.n; ++v) next_comm[refined[v]] = comm[v];
        LevelGraph next = collapse(g, refined, kr);
        for (auto& x : to_level) x = refined[x];
        g = std::move(next);
        comm = std::move(next_comm);
    }
    std::vector<std::uint32_t> flat(base.n);
    for (std::uint32_t v = 0; v < base.n; ++v) flat[v] = comm[to_level[v]];
    renumber_labels(flat);
    return flat;
}

}  // namespace

Partition leiden_cpm(const WeightedCitationGraph& g, const ClusterConfig& cfg) {
    cfg.validate();
    const LevelGraph base = to_level(g);
    Partition best;
    double best_q = -INFINITY;
    for (int s = 0; s < cfg.starts; ++s) {
        std::seed_seq seq{cfg.seed, static_cast<std::uint64_t>(s)};
        std::mt19937_64 rng(seq);
        std::vector<std::uint32_t> current(base.n);
        std::iota(current.begin(), current.end(), 0u);
        Partition cur = Partition::from_labels(current);
        double cur_q = cpm_quality(g, cur, cfg.resolution);
        for (int it = 0; it < cfg.iterations; ++it) {
            auto next = Partition::from_labels(leiden_pass(base, cur.assignment, cfg.resolution, cfg.randomness, rng));
            double q = cpm_quality(g, next, cfg.resolution);
            if (q >= cur_q) {
                cur = std::move(next);
                cur_q = q;
            }
        }
        // Final local moving on the original nodes.
        LeidenRun run(cfg.resolution, cfg.randomness, rng);
        auto labels = cur.assignment;
        run.move_nodes_fast(base, labels);
        auto polished = Partition::from_labels(labels);
        double pq = cpm_quality(g, polished, cfg.resolution);
        if (pq >= cur_q) {
            cur = std::move(polished);
            cur_q = pq;
        }
        if (cur_q > best_q) {
            best = std::move(cur);
            best_q = cur_q;
        }
    }
    return best;
}

ReclassifyResult reclassify_small(const WeightedCitationGraph& g, const Partition& p, int min_size) {
    check_total(g, p);
    if (min_size < 1) throw ArgumentError("min_size must be positive");
    const auto adj = build_adjacency(g);
    std::vector<std::uint32_t> assign = p.assignment;
    auto sizes = p.class_sizes(g);
    auto members = p.members();
    std::vector<char> alive(p.n_classes, 1);
    std::vector<char> orphan(p.n_classes, 0);

    std::vector<std::uint32_t> small;
    for (std::uint32_t c = 0; c < p.n_classes; ++c)
        if (sizes[c] < min_size) small.push_back(c);
    std::stable_sort(small.begin(), small.end(),
                     [&](std::uint32_t x, std::uint32_t y) { return sizes[x] < sizes[y]; });

    std::map<std::uint32_t, double> weight;
    auto argmax = [](const std::map<std::uint32_t, double>& m) {
        std::uint32_t best = UINT32_MAX;
        double bw = 0.0;
        for (auto [c, w] : m)
            if (w > bw) {
                bw = w;
                best = c;
            }
        return best;
    };
    for (auto c : small) {
        if (!alive[c] || sizes[c] >= min_size) continue;
        weight.clear();
        for (auto v : members[c])
            for (std::size_t e = adj.offsets[v]; e < adj.offsets[v + 1]; ++e) {
                auto d = assign[adj.targets[e]];
                if (d != c && alive[d]) weight[d] += adj.weights[e];
            }
        const auto fallback = argmax(weight);
        if (fallback == UINT32_MAX) {
            orphan[c] = 1;
            continue;
        }
        for (auto v : members[c]) {
            weight.clear();
            for (std::size_t e = adj.offsets[v]; e < adj.offsets[v + 1]; ++e) {
                auto d = assign[adj.targets[e]];
                if (d != c && alive[d]) weight[d] += adj.weights[e];
            }
            auto target = argmax(weight);
            if (target == UINT32_MAX) target = fallback;
            assign[v] = target;
            sizes[target] += g.node_size[v];
            members[target].push_back(v);
        }
        members[c].clear();
        sizes[c] = 0;
        alive[c] = 0;
    }

    ReclassifyResult out;
    std::vector<std::uint32_t> remap(p.n_classes, UINT32_MAX);
    std::uint32_t next = 0;
    for (std::uint32_t c = 0; c < p.n_classes; ++c)
        if (alive[c]) remap[c] = next++;
    out.partition.assignment.resize(assign.size());
    for (std::size_t v = 0; v < assign.size(); ++v) out.partition.assignment[v] = remap[assign[v]];
    out.partition.n_classes = next;
    out.orphan.assign(next, false);
    for (std::uint32_t c = 0; c < p.n_classes; ++c)
        if (alive[c] && orphan[c]) out.orphan[remap[c]] = true;
    return out;
}

WeightedCitationGraph aggregate_network(const WeightedCitationGraph& g, const Partition& p) {
    check_total(g, p);
    WeightedCitationGraph out;
    out.nodes.resize(p.n_classes);
    std::iota(out.nodes.begin(), out.nodes.end(), PubId{0});
    out.node_size = p.class_sizes(g);
    out.self_weight.assign(p.n_classes, 0.0);
    out.normalization = g.normalization;
    for (std::size_t v = 0; v < g.node_count(); ++v) out.self_weight[p.assignment[v]] += g.self_weight[v];
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> cross;
    for (const auto& l : g.links) {
        auto ca = p.assignment[l.a];
        auto cb = p.assignment[l.b];
        if (ca == cb) out.self_weight[ca] += l.weight;
        else cross[{std::min(ca, cb), std::max(ca, cb)}] += l.weight;
    }
    out.links.reserve(cross.size());
    for (auto [key, w] : cross) {
        Link l;
        l.a = key.first;
        l.b = key.second;
        l.weight = w;
        out.links.push_back(l);
    }
    return out;
}

ClassificationHierarchy build_hierarchy(const WeightedCitationGraph& g, const std::vector<double>& resolutions,
                                        const ClusterConfig& cfg) {
    if (resolutions.empty()) throw ArgumentError("at least one resolution required");
    for (std::size_t i = 1; i < resolutions.size(); ++i)
        if (!(resolutions[i] < resolutions[i - 1]))
            throw ArgumentError("resolutions must be strictly decreasing");
    ClassificationHierarchy h;
    h.resolutions = resolutions;

    ClusterConfig level_cfg = cfg;
    level_cfg.resolution = resolutions[0];
    Partition topics = leiden_cpm(g, level_cfg);
    if (cfg.min_class_size > 1) {
        auto r = reclassify_small(g, topics, cfg.min_class_size);
        topics = std::move(r.partition);
        h.topic_orphan = std::move(r.orphan);
    } else {
        h.topic_orphan.assign(topics.n_classes, false);
    }
    h.levels.push_back(std::move(topics));

    for (std::size_t L = 1; L < resolutions.size(); ++L) {
        const Partition& prev = h.levels.back();
        auto agg = aggregate_network(g, prev);
        level_cfg.resolution = resolutions[L];
        level_cfg.seed = cfg.seed + L;
        Partition coarse = leiden_cpm(agg, level_cfg);
        Partition lifted;
        lifted.assignment.resize(g.node_count());
        for (std::size_t v = 0; v < g.node_count(); ++v) lifted.assignment[v] = coarse.assignment[prev.assignment[v]];
        lifted.n_classes = coarse.n_classes;
        h.parent.push_back(coarse.assignment);
        h.levels.push_back(std::move(lifted));
    }
    return h;
}

void write_classification(const std::filesystem::path& path, const WeightedCitationGraph& g,
                          const ClassificationHierarchy& h) {
    tsv::Writer w(path);
    w.row({"pub_id", "topic_id", "specialty_id", "discipline_id", "area_id"});
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        std::vector<std::string> cells{std::to_string(g.nodes[v])};
        for (std::size_t L = 0; L < 4; ++L) {
            const auto& level = h.levels[std::min(L, h.levels.size() - 1)];
            cells.push_back(std::to_string(level.assignment[v]));
        }
        w.row(cells);
    }
}

ClassificationTable read_classification(const std::filesystem::path& path) {
    auto t = tsv::read(path);
    const char* cols[] = {"pub_id", "topic_id", "specialty_id", "discipline_id", "area_id"};
    int idx[5];
    for (int i = 0; i < 5; ++i) {
        idx[i] = t.column(cols[i]);
        if (idx[i] < 0) throw InputError(path.string() + ": missing mandatory column '" + cols[i] + "'");
    }
    ClassificationTable out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        try {
            if (row.size() < 5) throw InputError("too few fields");
            out.pub_ids.push_back(tsv::parse_int(row[idx[0]]));
            std::array<std::uint32_t, 4> ids{};
            for (int i = 0; i < 4; ++i) ids[i] = static_cast<std::uint32_t>(tsv::parse_int(row[idx[i + 1]]));
            out.ids.push_back(ids);
        } catch (const InputError& e) {
            throw InputError(path.string() + ":" + std::to_string(t.line_numbers[r]) + ": " + e.what());
        }
    }
    return out;
}

double adjusted_rand_index(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    if (a.size() != b.size()) throw ArgumentError("label vectors differ in length");
    const double n = static_cast<double>(a.size());
    if (a.size() < 2) return 1.0;
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> joint;
    std::map<std::uint32_t, double> ra, rb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        joint[{a[i], b[i]}] += 1;
        ra[a[i]] += 1;
        rb[b[i]] += 1;
    }
    auto c2 = [](double x) { return x * (x - 1) / 2; };
    double sum_joint = 0, sum_a = 0, sum_b = 0;
    for (auto& [k, v] : joint) sum_joint += c2(v);
    for (auto& [k, v] : ra) sum_a += c2(v);
    for (auto& [k, v] : rb) sum_b += c2(v);
    const double expected = sum_a * sum_b / c2(n);
    const double max_index = (sum_a + sum_b) / 2;
    if (max_index == expected) return 1.0;
    return (sum_joint - expected) / (max_index - expected);
}

}  // namespace tg
