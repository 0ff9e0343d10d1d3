#include <doctest.h>

#include <cmath>
#include <random>

#include "error.hpp"
#include "label.hpp"

using namespace tg;

namespace {

Lexicon fixture_lexicon() {
    Lexicon lex;
    lex.set("cognitive", PartOfSpeech::Adjective);
    lex.set("neuroscience", PartOfSpeech::Noun);
    lex.set("memory", PartOfSpeech::Noun);
    lex.set("of", PartOfSpeech::Other);
    lex.set("running", PartOfSpeech::Other);
    lex.set("quickly", PartOfSpeech::Other);
    return lex;
}

std::vector<std::string> keys(const std::vector<std::vector<std::string>>& terms) {
    std::vector<std::string> out;
    for (const auto& t : terms) out.push_back(term_key(t));
    std::sort(out.begin(), out.end());
    return out;
}

TermStats stats(std::string term, std::int64_t cf, std::int64_t nf, double alpha) {
    return {std::move(term), cf, nf, static_cast<double>(cf) / nf, tfs_score(cf, nf, alpha)};
}

}  // namespace

TEST_CASE("extract_terms") {
    auto lex = fixture_lexicon();
    CHECK(extract_terms({}, lex).empty());
    CHECK(keys(extract_terms({"cognitive", "neuroscience", "of", "memory"}, lex)) ==
          std::vector<std::string>{"cognitive neuroscience", "memory", "neuroscience"});
    CHECK(extract_terms({"running", "quickly"}, lex).empty());
    // a run ending in an adjective contributes only its noun-ending sub-runs
    CHECK(keys(extract_terms({"memory", "cognitive"}, lex)) == std::vector<std::string>{"memory"});
}

TEST_CASE("extract_terms yields only adjective/noun runs ending in a noun") {
    Lexicon lex;
    lex.set("a", PartOfSpeech::Adjective);
    lex.set("o", PartOfSpeech::Other);
    std::mt19937_64 rng(4);
    const char* vocab[] = {"a", "o", "n", "m"};
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<std::string> title(rng() % 8);
        for (auto& t : title) t = vocab[rng() % 4];
        for (const auto& term : extract_terms(title, lex)) {
            REQUIRE(!term.empty());
            CHECK(lex.tag(term.back()) == PartOfSpeech::Noun);
            for (const auto& tok : term) CHECK(lex.tag(tok) != PartOfSpeech::Other);
        }
    }
}

TEST_CASE("normalize_token folds plurals") {
    CHECK(normalize_token("networks") == "network");
    CHECK(normalize_token("studies") == "study");
    CHECK(normalize_token("analysis") == "analysis");
    CHECK(normalize_token("class") == "class");
}

TEST_CASE("tfs_score") {
    CHECK(tfs_score(8, 10, 0.67) == doctest::Approx(std::pow(8.0, 0.67) * std::pow(0.8, 0.33)));
    CHECK(tfs_score(5, 20, 1.0) == doctest::Approx(5.0));
    CHECK(tfs_score(5, 20, 0.0) == doctest::Approx(0.25));
    CHECK_THROWS_AS(tfs_score(0, 3, 0.5), ArgumentError);
    CHECK_THROWS_AS(tfs_score(4, 3, 0.5), ArgumentError);
}

TEST_CASE("tfs_score is monotone in both frequencies") {
    for (double alpha : {0.0, 0.33, 0.67, 1.0}) {
        for (std::int64_t nf = 1; nf < 40; ++nf) {
            for (std::int64_t cf = 1; cf < nf; ++cf) {
                CHECK(tfs_score(cf + 1, nf, alpha) >= tfs_score(cf, nf, alpha));
                CHECK(tfs_score(cf, nf + 1, alpha) <= tfs_score(cf, nf, alpha));
            }
        }
    }
}

TEST_CASE("tfs_rank") {
    // class 0 titles, class 1 titles; all tokens are nouns
    std::vector<std::vector<std::string>> titles{{"alpha"}, {"alpha"}, {"alpha"}, {"beta"}, {"beta"}, {"gamma"},
                                                 {"delta"}, {"alpha"}, {"gamma"}, {"gamma"}, {"delta"}};
    std::vector<std::uint32_t> cls{0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1};
    auto counts = count_terms(titles, cls, 2, Lexicon{});
    CHECK(counts.corpus.at("alpha") == 4);
    CHECK(counts.per_class[0].at("alpha") == 3);

    SUBCASE("alpha = 1 ranks by class frequency") {
        LabelConfig cfg;
        cfg.alpha = 1.0;
        auto r = tfs_rank(counts, cfg);
        std::vector<std::string> order;
        for (auto& s : r[0]) order.push_back(s.term);
        // delta and gamma tie on frequency 1: lexicographic
        CHECK(order == std::vector<std::string>{"alpha", "beta", "delta", "gamma"});
    }
    SUBCASE("alpha = 0 ranks by specificity") {
        LabelConfig cfg;
        cfg.alpha = 0.0;
        auto r = tfs_rank(counts, cfg);
        std::vector<std::string> order;
        for (auto& s : r[0]) order.push_back(s.term);
        // beta 2/2, alpha 3/4, delta 1/2, gamma 1/3
        CHECK(order == std::vector<std::string>{"beta", "alpha", "delta", "gamma"});
    }
    SUBCASE("alpha = 0.67 matches a direct recomputation") {
        LabelConfig cfg;
        auto r = tfs_rank(counts, cfg);
        for (std::size_t c = 0; c < 2; ++c) {
            for (std::size_t i = 0; i < r[c].size(); ++i) {
                const auto& s = r[c][i];
                CHECK(s.class_freq <= s.corpus_freq);
                CHECK(s.specificity > 0.0);
                CHECK(s.specificity <= 1.0);
                const double expect = std::pow(double(s.class_freq), 0.67) *
                                      std::pow(double(s.class_freq) / double(s.corpus_freq), 0.33);
                CHECK(s.score == doctest::Approx(expect).epsilon(1e-14));
                if (i > 0) CHECK(r[c][i - 1].score >= s.score);
            }
        }
        // class 0: alpha 3^.67*.75^.33 = 1.9448, beta 2^.67 = 1.5911, delta .5^.33 = .7955, gamma (1/3)^.33 = .6957
        std::vector<std::string> order;
        for (auto& s : r[0]) order.push_back(s.term);
        CHECK(order == std::vector<std::string>{"alpha", "beta", "delta", "gamma"});
        // class 1: gamma 2^.67*(2/3)^.33 = 1.3899, delta .7955, alpha .25^.33 = .6330
        order.clear();
        for (auto& s : r[1]) order.push_back(s.term);
        CHECK(order == std::vector<std::string>{"gamma", "delta", "alpha"});
    }
    SUBCASE("ranking is deterministic") {
        LabelConfig cfg;
        auto a = tfs_rank(counts, cfg);
        auto b = tfs_rank(count_terms(titles, cls, 2, Lexicon{}), cfg);
        for (std::size_t c = 0; c < 2; ++c) {
            REQUIRE(a[c].size() == b[c].size());
            for (std::size_t i = 0; i < a[c].size(); ++i) CHECK(a[c][i].term == b[c][i].term);
        }
    }
}

TEST_CASE("count_terms merges plural variants") {
    std::vector<std::vector<std::string>> titles{{"networks"}, {"network"}, {"network"}};
    auto counts = count_terms(titles, {0, 0, 0}, 1, Lexicon{});
    CHECK(counts.corpus.size() == 1);
    CHECK(counts.per_class[0].at("network") == 3);
    CHECK(counts.display.at("network") == "network");
    CHECK_THROWS_AS(count_terms(titles, {0, 0}, 1, Lexicon{}), ArgumentError);
    CHECK_THROWS_AS(count_terms(titles, {0, 0, 1}, 1, Lexicon{}), ArgumentError);
}

TEST_CASE("label_class") {
    LabelConfig cfg;
    CHECK(cfg.alpha == 0.67);
    CHECK(cfg.top_k == 3);
    std::vector<TermStats> ranked{stats("psychology", 9, 10, 0.67), stats("cognition", 8, 10, 0.67),
                                  stats("cognitive neuroscience", 7, 10, 0.67), stats("memory", 6, 10, 0.67)};
    CHECK(label_class(0, ranked, cfg) == "psychology; cognition; cognitive neuroscience");
    CHECK(label_class(0, {stats("memory", 1, 1, 0.67)}, cfg) == "memory");
    CHECK(label_class(17, {}, cfg) == "unlabeled-17");
    std::vector<TermStats> dup{stats("networks", 5, 5, 0.67), stats("network", 4, 5, 0.67), stats("graph", 3, 5, 0.67)};
    CHECK(label_class(0, dup, cfg) == "networks; graph");
    cfg.top_k = 0;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
    cfg.top_k = 3;
    cfg.alpha = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
}

TEST_CASE("Lexicon defaults unknown tokens to nouns and loads files") {
    Lexicon lex = Lexicon::english_default();
    CHECK(lex.tag("zorblat") == PartOfSpeech::Noun);
    CHECK(lex.tag("of") == PartOfSpeech::Other);
    CHECK(lex.tag("cognitive") == PartOfSpeech::Adjective);
    CHECK_THROWS_AS(Lexicon::load("/nonexistent/lexicon.tsv"), InputError);
}
