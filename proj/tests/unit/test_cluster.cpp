#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "../support.hpp"
#include "cluster.hpp"
#include "error.hpp"
#include "synth.hpp"

using namespace tg;
using testing::WeightedEdges;

namespace {

WeightedEdges two_triangles() { return {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {3, 4, 1}, {4, 5, 1}, {3, 5, 1}}; }

ClusterConfig config(double gamma, std::uint64_t seed = 1) {
    ClusterConfig c;
    c.resolution = gamma;
    c.seed = seed;
    c.min_class_size = 1;
    return c;
}

}  // namespace

TEST_CASE("cpm_quality hand evaluations") {
    CHECK(cpm_quality(make_graph(4, {}), Partition::singletons(4), 0.3) == 0.0);
    auto g = make_graph(6, two_triangles());
    auto split = Partition::from_labels({0, 0, 0, 1, 1, 1});
    auto merged = Partition::from_labels({0, 0, 0, 0, 0, 0});
    CHECK(cpm_quality(g, split, 0.1) == doctest::Approx(5.4));
    CHECK(cpm_quality(g, merged, 0.1) == doctest::Approx(4.5));
    CHECK(cpm_quality(g, split, 0.1) > cpm_quality(g, merged, 0.1));
    CHECK_THROWS_WITH(cpm_quality(g, Partition::singletons(5), 0.1), doctest::Contains("partition missing a node"));
}

TEST_CASE("leiden_cpm separates disconnected triangles") {
    auto g = make_graph(6, two_triangles());
    auto p = leiden_cpm(g, config(0.05));
    CHECK(p.n_classes == 2);
    CHECK(p.assignment[0] == p.assignment[1]);
    CHECK(p.assignment[1] == p.assignment[2]);
    CHECK(p.assignment[3] == p.assignment[4]);
    CHECK(p.assignment[0] != p.assignment[3]);
}

TEST_CASE("leiden_cpm on a six-node barbell reaches the exhaustive optimum") {
    const WeightedEdges e{{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {2, 3, 1}, {3, 4, 1}, {4, 5, 1}, {3, 5, 1}};
    auto g = make_graph(6, e);
    int n_partitions = 0;
    testing::for_each_partition(6, [&](const auto&) { ++n_partitions; });
    CHECK(n_partitions == 203);
    const double best = testing::brute_force_cpm_max(6, e, 0.3);
    auto p = leiden_cpm(g, config(0.3));
    CHECK(cpm_quality(g, p, 0.3) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("leiden_cpm properties on random graphs") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 10 + rng() % 20;
        auto e = testing::random_dyadic_graph(n, 0.25, rng);
        auto g = make_graph(n, e);
        const double gamma = 0.25 + 0.125 * static_cast<double>(rng() % 6);
        auto cfg = config(gamma, rep);
        auto p = leiden_cpm(g, cfg);
        const double q = cpm_quality(g, p, gamma);
        CHECK(q == doctest::Approx(testing::cpm_oracle(n, e, p.assignment, gamma)));
        CHECK(q >= cpm_quality(g, Partition::singletons(n), gamma));
        // class ids dense
        std::set<std::uint32_t> ids(p.assignment.begin(), p.assignment.end());
        CHECK(ids.size() == p.n_classes);
        CHECK(*ids.rbegin() == p.n_classes - 1);
        // determinism
        CHECK(leiden_cpm(g, cfg) == p);
        // local optimality: no single-node move improves quality
        for (std::uint32_t v = 0; v < n; ++v) {
            for (std::uint32_t c = 0; c < std::min<std::size_t>(p.n_classes + 1, n); ++c) {
                auto moved = p.assignment;
                moved[v] = c;
                CHECK(testing::cpm_oracle(n, e, moved, gamma) <= q + 1e-9);
            }
        }
    }
}

TEST_CASE("ClusterConfig validation") {
    ClusterConfig c;
    CHECK(c.resolution == 0.000125);
    CHECK(c.iterations == 100);
    CHECK(c.min_class_size == 50);
    CHECK(c.starts == 1);
    c.resolution = 0;
    CHECK_THROWS_AS(c.validate(), ArgumentError);
}

TEST_CASE("reclassify_small") {
    SUBCASE("no class below the threshold leaves the partition unchanged") {
        auto g = make_graph(6, two_triangles());
        auto p = Partition::from_labels({0, 0, 0, 1, 1, 1});
        auto r = reclassify_small(g, p, 3);
        CHECK(r.partition == p);
        CHECK(r.orphan == std::vector<bool>{false, false});
    }
    SUBCASE("a pair mostly linked to class B joins B") {
        // A = {0,1,2}, B = {3,4,5}, small = {6,7}; 6 and 7 link to B with weight 3, to A with weight 1
        auto g = make_graph(8, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {3, 4, 1}, {4, 5, 1}, {3, 5, 1},
                                {6, 7, 1}, {6, 3, 2}, {7, 4, 1}, {6, 0, 0.5}, {7, 1, 0.5}});
        auto p = Partition::from_labels({0, 0, 0, 1, 1, 1, 2, 2});
        auto r = reclassify_small(g, p, 3);
        CHECK(r.partition.n_classes == 2);
        CHECK(r.partition.assignment[6] == r.partition.assignment[3]);
        CHECK(r.partition.assignment[7] == r.partition.assignment[3]);
    }
    SUBCASE("an isolated small class is kept as an orphan") {
        auto g = make_graph(5, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}});
        auto p = Partition::from_labels({0, 0, 0, 1, 2});
        auto r = reclassify_small(g, p, 2);
        CHECK(r.partition.n_classes == 3);
        CHECK(r.orphan == std::vector<bool>{false, true, true});
    }
    SUBCASE("never increases the class count") {
        std::mt19937_64 rng(9);
        for (int rep = 0; rep < 30; ++rep) {
            const std::size_t n = 20 + rng() % 20;
            auto g = make_graph(n, testing::random_dyadic_graph(n, 0.1, rng));
            std::vector<std::uint32_t> labels(n);
            for (auto& l : labels) l = static_cast<std::uint32_t>(rng() % 8);
            auto p = Partition::from_labels(labels);
            auto r = reclassify_small(g, p, 4);
            CHECK(r.partition.n_classes <= p.n_classes);
            auto sizes = r.partition.class_sizes(g);
            for (std::uint32_t c = 0; c < r.partition.n_classes; ++c)
                CHECK((sizes[c] >= 4 || r.orphan[c]));
        }
    }
}

TEST_CASE("aggregate_network") {
    SUBCASE("singletons give an isomorphic graph") {
        auto g = make_graph(4, {{0, 1, 0.5}, {2, 3, 2.0}, {1, 2, 1.0}});
        auto a = aggregate_network(g, Partition::singletons(4));
        REQUIRE(a.links.size() == 3);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(a.links[i].a == g.links[i].a);
            CHECK(a.links[i].b == g.links[i].b);
            CHECK(a.links[i].weight == g.links[i].weight);
        }
    }
    SUBCASE("three unit cross links become one link of weight 3") {
        auto g = make_graph(4, {{0, 2, 1}, {0, 3, 1}, {1, 3, 1}, {0, 1, 1}});
        auto a = aggregate_network(g, Partition::from_labels({0, 0, 1, 1}));
        REQUIRE(a.links.size() == 1);
        CHECK(a.links[0].weight == 3.0);
        CHECK(a.self_weight[0] == 1.0);
        CHECK(a.node_size == std::vector<std::int64_t>{2, 2});
    }
    SUBCASE("one class gives a single node without links") {
        auto g = make_graph(6, two_triangles());
        auto a = aggregate_network(g, Partition::from_labels({0, 0, 0, 0, 0, 0}));
        CHECK(a.node_count() == 1);
        CHECK(a.links.empty());
        CHECK(a.self_weight[0] == 6.0);
    }
    SUBCASE("CPM quality is preserved by aggregation") {
        std::mt19937_64 rng(21);
        for (int rep = 0; rep < 20; ++rep) {
            const std::size_t n = 12;
            auto g = make_graph(n, testing::random_dyadic_graph(n, 0.4, rng));
            std::vector<std::uint32_t> fine(n), coarse_of(4);
            for (auto& l : fine) l = static_cast<std::uint32_t>(rng() % 4);
            auto p = Partition::from_labels(fine);
            auto a = aggregate_network(g, p);
            std::vector<std::uint32_t> c(p.n_classes);
            for (auto& x : c) x = static_cast<std::uint32_t>(rng() % 2);
            std::vector<std::uint32_t> lifted(n);
            for (std::size_t v = 0; v < n; ++v) lifted[v] = c[p.assignment[v]];
            CHECK(cpm_quality(a, Partition::from_labels(c), 0.3) ==
                  doctest::Approx(cpm_quality(g, Partition::from_labels(lifted), 0.3)));
        }
    }
}

TEST_CASE("build_hierarchy") {
    auto g = make_graph(6, two_triangles());
    SUBCASE("a single resolution equals leiden_cpm") {
        auto cfg = config(0.1);
        auto h = build_hierarchy(g, {0.1}, cfg);
        REQUIRE(h.levels.size() == 1);
        CHECK(h.levels[0] == leiden_cpm(g, cfg));
    }
    SUBCASE("resolutions must be given and strictly decreasing") {
        CHECK_THROWS_AS(build_hierarchy(g, {}, config(0.1)), ArgumentError);
        CHECK_THROWS_AS(build_hierarchy(g, {0.1, 0.1}, config(0.1)), ArgumentError);
    }
    SUBCASE("planted three-level hierarchy is recovered and nested") {
        SynthConfig sc;
        sc.seed = 17;
        sc.n_topics = 8;
        sc.topics_per_specialty = 2;
        sc.specialties_per_discipline = 2;
        sc.disciplines_per_area = 2;
        sc.base_min = sc.base_max = 12;
        sc.ratio_min = sc.ratio_max = 1.0;
        sc.within_topic_prob = 0.85;
        sc.same_specialty_share = 0.7;
        sc.same_discipline_share = 0.3;
        sc.same_area_share = 0.0;
        const auto corpus = generate_corpus(sc);
        auto net = normalize_links(build_network(corpus.pubs, corpus.edges));
        ClusterConfig cc = config(0.004, 5);
        cc.min_class_size = 10;
        auto h = build_hierarchy(net, {0.004, 0.0012, 0.0001}, cc);
        REQUIRE(h.levels.size() == 3);
        std::vector<std::uint32_t> truth[3];
        for (std::size_t i = 0; i < corpus.pubs.size(); ++i) {
            const auto& t = corpus.truth.topics[corpus.truth.topic_of[i]];
            truth[0].push_back(t.id);
            truth[1].push_back(t.specialty);
            truth[2].push_back(t.discipline);
        }
        for (int L = 0; L < 3; ++L) {
            // graph nodes are sorted pub ids, which is generation order
            CHECK(adjusted_rand_index(h.levels[L].assignment, truth[L]) >= 0.9);
        }
        for (std::size_t L = 0; L + 1 < h.levels.size(); ++L) {
            std::map<std::uint32_t, std::uint32_t> up;
            for (std::size_t v = 0; v < net.node_count(); ++v) {
                auto [it, fresh] = up.emplace(h.levels[L].assignment[v], h.levels[L + 1].assignment[v]);
                CHECK(it->second == h.levels[L + 1].assignment[v]);
            }
        }
    }
}

TEST_CASE("adjusted_rand_index agrees with pair counting") {
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<std::uint32_t> a(40), b(40);
        for (auto& x : a) x = static_cast<std::uint32_t>(rng() % 5);
        for (std::size_t i = 0; i < 40; ++i) b[i] = rng() % 3 == 0 ? static_cast<std::uint32_t>(rng() % 5) : a[i] + 7;
        CHECK(adjusted_rand_index(a, b) == doctest::Approx(testing::ari_pairs(a, b)).epsilon(1e-10));
    }
    std::vector<std::uint32_t> a{0, 0, 1, 1, 2};
    CHECK(adjusted_rand_index(a, {5, 5, 3, 3, 9}) == doctest::Approx(1.0));
}

TEST_CASE("classification round-trips through TSV") {
    testing::TempDir d("cluster");
    auto g = make_graph(6, two_triangles());
    auto h = build_hierarchy(g, {0.5, 0.05}, config(0.5));
    write_classification(d / "c.tsv", g, h);
    auto t = read_classification(d / "c.tsv");
    REQUIRE(t.pub_ids.size() == 6);
    for (std::size_t v = 0; v < 6; ++v) {
        CHECK(t.ids[v][0] == h.levels[0].assignment[v]);
        CHECK(t.ids[v][1] == h.levels[1].assignment[v]);
        CHECK(t.ids[v][3] == h.levels[1].assignment[v]);
    }
}
