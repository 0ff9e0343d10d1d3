#include <doctest.h>

#include <cmath>
#include <set>

#include "../support.hpp"
#include "cluster.hpp"
#include "error.hpp"
#include "growth.hpp"
#include "synth.hpp"

using namespace tg;

namespace {

SynthConfig small(std::uint64_t seed) {
    SynthConfig c;
    c.seed = seed;
    c.n_topics = 6;
    c.base_min = 15;
    c.base_max = 25;
    return c;
}

}  // namespace

TEST_CASE("zero topics give an empty corpus") {
    SynthConfig c;
    c.n_topics = 0;
    auto s = generate_corpus(c);
    CHECK(s.pubs.empty());
    CHECK(s.edges.empty());
}

TEST_CASE("schedules are reproduced exactly") {
    SynthConfig c = small(3);
    c.n_topics = 2;
    std::map<int, std::int64_t> a, b;
    for (int y = 2010; y <= 2021; ++y) {
        a[y] = y <= 2015 ? 12 : 20;
        b[y] = 5 + (y % 3);
    }
    c.schedules = {a, b};
    auto s = generate_corpus(c);
    CHECK(s.truth.topics[0].growth_ratio == 20.0 / 12.0);
    std::unordered_map<PubId, std::uint32_t> topic;
    for (std::size_t i = 0; i < s.pubs.size(); ++i) topic[s.pubs[i].pub_id] = s.truth.topic_of[i];
    auto series = topic_series(s.pubs, topic, 2, {2010, 2021});
    CHECK(series[0].counts == a);
    CHECK(series[1].counts == b);
    for (int t = 0; t < 2; ++t) {
        auto rec = smoothed_growth_ratio(series[t], 2015, 3);
        CHECK(rec.ratio == s.truth.topics[t].growth_ratio);
    }
    c.schedules[1][2012] = -1;
    CHECK_THROWS_AS(generate_corpus(c), ArgumentError);
}

TEST_CASE("generated corpora are well formed") {
    auto s = generate_corpus(small(9));
    std::set<PubId> ids;
    std::map<PubId, int> year;
    for (const auto& p : s.pubs) {
        CHECK(ids.insert(p.pub_id).second);
        year[p.pub_id] = p.year;
        CHECK(p.n_authors >= 1);
        CHECK(p.n_references >= 0);
        CHECK(p.jif >= 0.0);
        CHECK(!p.title_tokens.empty());
    }
    std::set<std::pair<PubId, PubId>> pairs;
    for (const auto& e : s.edges) {
        CHECK(e.citing != e.cited);
        CHECK(year.at(e.citing) >= year.at(e.cited));
        CHECK(e.citing_year == year.at(e.citing));
        CHECK(pairs.insert({e.citing, e.cited}).second);
    }
    std::int64_t planted = 0;
    for (auto c : s.truth.planted_citations) planted += c;
    CHECK(static_cast<std::size_t>(planted) >= s.truth.truncated_citations);
    SynthConfig bad = small(1);
    bad.within_topic_prob = 1.5;
    CHECK_THROWS_AS(generate_corpus(bad), ArgumentError);
}

TEST_CASE("identical config and seed give byte-identical files") {
    testing::TempDir a("synth_a"), b("synth_b");
    auto cfg = small(5);
    write_synth(a.path(), cfg, generate_corpus(cfg));
    write_synth(b.path(), cfg, generate_corpus(cfg));
    for (const char* f : {"publications.tsv", "citations.tsv", "truth.json"})
        CHECK(testing::read_file(a / f) == testing::read_file(b / f));
    auto other = small(6);
    testing::TempDir c("synth_c");
    write_synth(c.path(), other, generate_corpus(other));
    CHECK(testing::read_file(a / "citations.tsv") != testing::read_file(c / "citations.tsv"));
}

TEST_CASE("within-topic probability 1 makes topics the graph components") {
    SynthConfig c = small(11);
    c.within_topic_prob = 1.0;
    auto s = generate_corpus(c);
    auto g = normalize_links(build_network(s.pubs, s.edges));
    for (const auto& l : g.links) CHECK(s.truth.topic_of[l.a] == s.truth.topic_of[l.b]);
    ClusterConfig cc;
    cc.resolution = 0.0005;
    cc.seed = 2;
    auto p = reclassify_small(g, leiden_cpm(g, cc), 10).partition;
    CHECK(adjusted_rand_index(p.assignment, s.truth.topic_of) >= 0.95);
}

TEST_CASE("mean citations track the planted rate on a large stratum") {
    SynthConfig c;
    c.seed = 4;
    c.n_topics = 1;
    c.base_min = c.base_max = 2000;
    c.ratio_min = c.ratio_max = 1.0;
    c.beta = {1.0, 0.0, 0.0, 0.0, 0.0};
    c.first_year = 2013;
    c.last_year = 2018;
    auto s = generate_corpus(c);
    // publications of the first year have the most later citers available
    double sum = 0;
    int n = 0;
    for (std::size_t i = 0; i < s.pubs.size(); ++i)
        if (s.pubs[i].year == 2013) {
            sum += static_cast<double>(s.truth.planted_citations[i]);
            ++n;
        }
    const double mean = sum / n;
    // negative binomial variance mu + mu^2 / size
    const double mu = std::exp(1.0);
    const double se = std::sqrt((mu + mu * mu / c.dispersion) / n);
    CHECK(std::fabs(mean - mu) < 4.0 * se);
}

TEST_CASE("pseudo words are distinct and alphabetic") {
    std::set<std::string> seen;
    for (std::uint64_t i = 0; i < 5000; ++i) {
        auto w = pseudo_word(i);
        CHECK(seen.insert(w).second);
        for (char ch : w) CHECK((ch >= 'a' && ch <= 'z'));
    }
}

TEST_CASE("synth config JSON round-trip") {
    auto c = small(77);
    c.beta = {0.1, 0.2, 0.3, 0.4, 0.5};
    auto back = synth_config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));
    CHECK_THROWS_AS(synth_config_from_json(nlohmann::json{{"n_topic", 3}}), ArgumentError);
}
