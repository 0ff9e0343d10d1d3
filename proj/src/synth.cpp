#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <unordered_set>

#include "error.hpp"

namespace tg {

void SynthConfig::validate() const {
    if (n_topics < 0) throw ArgumentError("n_topics must be >= 0");
    if (first_year > focal_year - 2 || last_year < focal_year + 3)
        throw ArgumentError("years must cover focal_year-2 .. focal_year+3");
    if (!schedules.empty() && static_cast<int>(schedules.size()) != n_topics)
        throw ArgumentError("schedules must list every topic");
    for (const auto& s : schedules)
        for (auto [y, c] : s)
            if (c < 0) throw ArgumentError("infeasible schedule: negative count in " + std::to_string(y));
    if (base_min < 0 || base_max < base_min) throw ArgumentError("bad base range");
    if (!(ratio_min > 0) || ratio_max < ratio_min) throw ArgumentError("bad ratio range");
    for (double p : {within_topic_prob, same_specialty_share, same_discipline_share, same_area_share,
                     review_fraction, other_fraction, dominant_term_prob})
        if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("probabilities must lie in [0, 1]");
    if (same_specialty_share + same_discipline_share + same_area_share > 1.0 + 1e-12)
        throw ArgumentError("hierarchy shares exceed 1");
    if (review_fraction + other_fraction > 1.0) throw ArgumentError("doc type fractions exceed 1");
    if (topics_per_specialty < 1 || specialties_per_discipline < 1 || disciplines_per_area < 1)
        throw ArgumentError("hierarchy fan-outs must be positive");
    if (!(dispersion > 0) || !(refs_size > 0) || !(refs_mean > 0)) throw ArgumentError("bad dispersion");
    if (!(authors_geometric_p > 0 && authors_geometric_p <= 1)) throw ArgumentError("bad authors_geometric_p");
    if (n_journals < 1) throw ArgumentError("n_journals must be positive");
}

SynthConfig synth_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ArgumentError("synth config must be a JSON object");
    static const std::set<std::string> known{
        "seed", "first_year", "last_year", "focal_year", "n_topics", "schedules", "base_min", "base_max",
        "ratio_min", "ratio_max", "topics_per_specialty", "specialties_per_discipline", "disciplines_per_area",
        "within_topic_prob", "same_specialty_share", "same_discipline_share", "same_area_share", "beta",
        "dispersion", "review_fraction", "other_fraction", "authors_geometric_p", "refs_mean", "refs_size",
        "n_journals", "jif_log_mean", "jif_log_sd", "min_references", "dominant_term_prob",
        "secondary_terms_per_topic", "shared_terms"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.contains(it.key())) throw ArgumentError("unknown config key 'synth." + it.key() + "'");
    SynthConfig c;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("seed", c.seed);
    get("first_year", c.first_year);
    get("last_year", c.last_year);
    get("focal_year", c.focal_year);
    get("n_topics", c.n_topics);
    get("base_min", c.base_min);
    get("base_max", c.base_max);
    get("ratio_min", c.ratio_min);
    get("ratio_max", c.ratio_max);
    get("topics_per_specialty", c.topics_per_specialty);
    get("specialties_per_discipline", c.specialties_per_discipline);
    get("disciplines_per_area", c.disciplines_per_area);
    get("within_topic_prob", c.within_topic_prob);
    get("same_specialty_share", c.same_specialty_share);
    get("same_discipline_share", c.same_discipline_share);
    get("same_area_share", c.same_area_share);
    get("beta", c.beta);
    get("dispersion", c.dispersion);
    get("review_fraction", c.review_fraction);
    get("other_fraction", c.other_fraction);
    get("authors_geometric_p", c.authors_geometric_p);
    get("refs_mean", c.refs_mean);
    get("refs_size", c.refs_size);
    get("n_journals", c.n_journals);
    get("jif_log_mean", c.jif_log_mean);
    get("jif_log_sd", c.jif_log_sd);
    get("min_references", c.min_references);
    get("dominant_term_prob", c.dominant_term_prob);
    get("secondary_terms_per_topic", c.secondary_terms_per_topic);
    get("shared_terms", c.shared_terms);
    if (j.contains("schedules")) {
        for (const auto& s : j.at("schedules")) {
            std::map<int, std::int64_t> m;
            for (auto it = s.begin(); it != s.end(); ++it) m[std::stoi(it.key())] = it.value().get<std::int64_t>();
            c.schedules.push_back(std::move(m));
        }
    }
    return c;
}

nlohmann::json to_json(const SynthConfig& c) {
    nlohmann::json j{{"seed", c.seed},
                     {"first_year", c.first_year},
                     {"last_year", c.last_year},
                     {"focal_year", c.focal_year},
                     {"n_topics", c.n_topics},
                     {"base_min", c.base_min},
                     {"base_max", c.base_max},
                     {"ratio_min", c.ratio_min},
                     {"ratio_max", c.ratio_max},
                     {"topics_per_specialty", c.topics_per_specialty},
                     {"specialties_per_discipline", c.specialties_per_discipline},
                     {"disciplines_per_area", c.disciplines_per_area},
                     {"within_topic_prob", c.within_topic_prob},
                     {"same_specialty_share", c.same_specialty_share},
                     {"same_discipline_share", c.same_discipline_share},
                     {"same_area_share", c.same_area_share},
                     {"beta", c.beta},
                     {"dispersion", c.dispersion},
                     {"review_fraction", c.review_fraction},
                     {"other_fraction", c.other_fraction},
                     {"authors_geometric_p", c.authors_geometric_p},
                     {"refs_mean", c.refs_mean},
                     {"refs_size", c.refs_size},
                     {"n_journals", c.n_journals},
                     {"jif_log_mean", c.jif_log_mean},
                     {"jif_log_sd", c.jif_log_sd},
                     {"min_references", c.min_references},
                     {"dominant_term_prob", c.dominant_term_prob},
                     {"secondary_terms_per_topic", c.secondary_terms_per_topic},
                     {"shared_terms", c.shared_terms}};
    if (!c.schedules.empty()) {
        auto arr = nlohmann::json::array();
        for (const auto& s : c.schedules) {
            nlohmann::json m = nlohmann::json::object();
            for (auto [y, n] : s) m[std::to_string(y)] = n;
            arr.push_back(m);
        }
        j["schedules"] = arr;
    }
    return j;
}

std::string pseudo_word(std::uint64_t index) {
    static const char* onset[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "t", "v", "z", "br", "tr", "pl"};
    static const char* vowel[] = {"a", "e", "i", "o", "u", "ai", "eo", "ou"};
    // Three syllables minimum; each syllable encodes 7 bits.
    std::string w;
    std::uint64_t x = index;
    int syllables = 0;
    do {
        const auto d = x % 128;
        x /= 128;
        w += onset[d % 16];
        w += vowel[d / 16];
        ++syllables;
    } while (x > 0 || syllables < 3);
    return w;
}

namespace {

std::int64_t draw_negative_binomial(double mean, double size, std::mt19937_64& rng) {
    if (mean <= 0) return 0;
    const double g = std::gamma_distribution<double>(size, mean / size)(rng);
    if (g <= 0) return 0;
    return std::poisson_distribution<std::int64_t>(g)(rng);
}

struct Covariates {
    int authors;
    int refs;
    std::int64_t journal;
    double jif;
};

class CovariateSampler {
public:
    CovariateSampler(const SynthConfig& cfg, std::mt19937_64& rng) : cfg_(cfg) {
        std::lognormal_distribution<double> ln(cfg.jif_log_mean, cfg.jif_log_sd);
        for (int i = 0; i < cfg.n_journals; ++i) {
            // Three decimals, as impact factors are published.
            journal_jif_.push_back(std::round(ln(rng) * 1000.0) / 1000.0);
        }
    }
    Covariates draw(std::mt19937_64& rng) const {
        Covariates c;
        c.authors = 1 + std::geometric_distribution<int>(cfg_.authors_geometric_p)(rng);
        c.refs = static_cast<int>(draw_negative_binomial(cfg_.refs_mean, cfg_.refs_size, rng));
        c.journal = std::uniform_int_distribution<std::int64_t>(0, cfg_.n_journals - 1)(rng);
        c.jif = journal_jif_[static_cast<std::size_t>(c.journal)];
        return c;
    }

private:
    const SynthConfig& cfg_;
    std::vector<double> journal_jif_;
};

double smoothed_ratio(const std::map<int, std::int64_t>& s, int t) {
    auto sum = [&](int last) {
        std::int64_t total = 0;
        for (int y = last - 2; y <= last; ++y) {
            auto it = s.find(y);
            if (it != s.end()) total += it->second;
        }
        return total;
    };
    const auto base = sum(t);
    return base > 0 ? static_cast<double>(sum(t + 3)) / static_cast<double>(base) : 0.0;
}

}  // namespace

SynthCorpus generate_corpus(const SynthConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    SynthCorpus out;
    auto& truth = out.truth;
    truth.beta = cfg.beta;
    truth.dispersion = cfg.dispersion;

    // Topics, hierarchy and schedules.
    const int per_disc = cfg.topics_per_specialty * cfg.specialties_per_discipline;
    const int per_area = per_disc * cfg.disciplines_per_area;
    std::uniform_int_distribution<int> base_dist(cfg.base_min, cfg.base_max);
    std::uniform_real_distribution<double> log_ratio(std::log(cfg.ratio_min), std::log(cfg.ratio_max));
    for (int i = 0; i < cfg.n_topics; ++i) {
        PlantedTopic t;
        t.id = static_cast<std::uint32_t>(i);
        t.specialty = static_cast<std::uint32_t>(i / cfg.topics_per_specialty);
        t.discipline = static_cast<std::uint32_t>(i / per_disc);
        t.area = static_cast<std::uint32_t>(i / per_area);
        if (!cfg.schedules.empty()) {
            t.schedule = cfg.schedules[static_cast<std::size_t>(i)];
        } else {
            const int base = base_dist(rng);
            const double ratio = std::exp(log_ratio(rng));
            const auto later = static_cast<std::int64_t>(std::llround(base * ratio));
            for (int y = cfg.first_year; y <= cfg.last_year; ++y) t.schedule[y] = y <= cfg.focal_year ? base : later;
        }
        t.growth_ratio = smoothed_ratio(t.schedule, cfg.focal_year);
        t.dominant_term = pseudo_word(4096 + static_cast<std::uint64_t>(i));
        truth.topics.push_back(std::move(t));
    }

    // Publications, ordered by year then topic.
    CovariateSampler covs(cfg, rng);
    std::uniform_real_distribution<double> unif;
    static const char* adjectives[] = {"novel", "dynamic", "empirical", "molecular", "global",
                                       "experimental", "computational", "social"};
    static const char* linkers[] = {"of", "in", "for", "and", "with"};
    std::vector<int> years;
    for (const auto& t : truth.topics)
        for (auto [y, c] : t.schedule) years.push_back(y);
    std::sort(years.begin(), years.end());
    years.erase(std::unique(years.begin(), years.end()), years.end());
    std::vector<std::vector<std::uint32_t>> topic_pubs(truth.topics.size());
    PubId next_id = 1;
    for (int y : years) {
        for (const auto& t : truth.topics) {
            auto it = t.schedule.find(y);
            if (it == t.schedule.end()) continue;
            for (std::int64_t k = 0; k < it->second; ++k) {
                Publication p;
                p.pub_id = next_id++;
                p.year = y;
                const double u = unif(rng);
                p.doc_type = u < cfg.review_fraction ? DocType::Review
                             : u < cfg.review_fraction + cfg.other_fraction ? DocType::Other
                                                                             : DocType::Article;
                auto c = covs.draw(rng);
                p.n_authors = c.authors;
                p.n_references = c.refs;
                p.journal_id = c.journal + 1;
                p.jif = c.jif;
                // Title: [adjective] head linker shared secondary
                std::string title;
                if (unif(rng) < 0.5) title += std::string(adjectives[rng() % 8]) + " ";
                const auto sec_base = 65536 + static_cast<std::uint64_t>(t.id) * 64;
                const auto n_sec = static_cast<std::uint64_t>(std::max(1, cfg.secondary_terms_per_topic));
                title += unif(rng) < cfg.dominant_term_prob ? t.dominant_term : pseudo_word(sec_base + rng() % n_sec);
                title += std::string(" ") + linkers[rng() % 5] + " ";
                title += pseudo_word(256 + rng() % static_cast<std::uint64_t>(std::max(1, cfg.shared_terms)));
                title += " " + pseudo_word(sec_base + rng() % n_sec);
                p.title = title;
                p.title_tokens = tokenize_title(title);
                topic_pubs[t.id].push_back(static_cast<std::uint32_t>(out.pubs.size()));
                truth.topic_of.push_back(t.id);
                out.pubs.push_back(std::move(p));
            }
        }
    }

    // Groups of topics by hierarchy level for cross-topic citation sources.
    auto topics_where = [&](auto pred) {
        std::vector<std::uint32_t> ids;
        for (const auto& t : truth.topics)
            if (pred(t)) ids.push_back(t.id);
        return ids;
    };
    const std::size_t n_pubs = out.pubs.size();
    std::vector<std::vector<std::uint32_t>> same_spec(truth.topics.size()), same_disc(truth.topics.size()),
        same_area(truth.topics.size()), elsewhere(truth.topics.size());
    for (const auto& t : truth.topics) {
        same_spec[t.id] = topics_where([&](const PlantedTopic& o) { return o.id != t.id && o.specialty == t.specialty; });
        same_disc[t.id] = topics_where([&](const PlantedTopic& o) { return o.specialty != t.specialty && o.discipline == t.discipline; });
        same_area[t.id] = topics_where([&](const PlantedTopic& o) { return o.discipline != t.discipline && o.area == t.area; });
        elsewhere[t.id] = topics_where([&](const PlantedTopic& o) { return o.area != t.area; });
    }
    auto pick_source_topic = [&](std::uint32_t topic) -> std::uint32_t {
        if (unif(rng) < cfg.within_topic_prob) return topic;
        const double u = unif(rng);
        const std::vector<std::uint32_t>* order[4] = {&same_spec[topic], &same_disc[topic], &same_area[topic], &elsewhere[topic]};
        int level = u < cfg.same_specialty_share ? 0
                    : u < cfg.same_specialty_share + cfg.same_discipline_share ? 1
                    : u < cfg.same_specialty_share + cfg.same_discipline_share + cfg.same_area_share ? 2
                                                                                                     : 3;
        // Fall back to broader, then narrower, groups when a level is empty.
        for (int l = level; l < 4; ++l)
            if (!order[l]->empty()) return (*order[l])[rng() % order[l]->size()];
        for (int l = level; l >= 0; --l)
            if (!order[l]->empty()) return (*order[l])[rng() % order[l]->size()];
        return topic;
    };

    // Citations: each publication draws a negative-binomial count and receives it from later publications.
    std::vector<std::unordered_set<std::uint32_t>> citers(n_pubs);
    std::vector<int> out_degree(n_pubs, 0);
    truth.planted_citations.assign(n_pubs, 0);
    for (std::uint32_t j = 0; j < n_pubs; ++j) {
        const auto& p = out.pubs[j];
        const auto& topic = truth.topics[truth.topic_of[j]];
        const double eta = cfg.beta[0] + cfg.beta[1] * topic.growth_ratio + cfg.beta[2] * p.n_authors +
                           cfg.beta[3] * p.n_references + cfg.beta[4] * p.jif;
        const auto count = draw_negative_binomial(std::exp(eta), cfg.dispersion, rng);
        truth.planted_citations[j] = count;
        for (std::int64_t k = 0; k < count; ++k) {
            bool placed = false;
            for (int attempt = 0; attempt < 20 && !placed; ++attempt) {
                const auto src_topic = pick_source_topic(truth.topic_of[j]);
                const auto& list = topic_pubs[src_topic];
                // Citing publications come later in (year, topic) order.
                auto first = std::upper_bound(list.begin(), list.end(), j);
                if (first == list.end()) continue;
                const auto span = static_cast<std::size_t>(list.end() - first);
                const auto c = *(first + static_cast<std::ptrdiff_t>(rng() % span));
                if (!citers[j].insert(c).second) continue;
                out.edges.push_back({out.pubs[c].pub_id, p.pub_id, out.pubs[c].year, 0});
                ++out_degree[c];
                placed = true;
            }
            if (!placed) ++truth.truncated_citations;
        }
    }

    // Every publication after the first year cites at least min_references earlier, non-focal publications.
    for (std::uint32_t c = 0; c < n_pubs; ++c) {
        const auto& p = out.pubs[c];
        if (p.year == years.front()) continue;
        for (int attempt = 0; attempt < 50 && out_degree[c] < cfg.min_references; ++attempt) {
            const auto src_topic = pick_source_topic(truth.topic_of[c]);
            const auto& list = topic_pubs[src_topic];
            auto end = std::lower_bound(list.begin(), list.end(), c);
            if (end == list.begin()) continue;
            const auto j = *(list.begin() + static_cast<std::ptrdiff_t>(rng() % static_cast<std::size_t>(end - list.begin())));
            if (out.pubs[j].year == cfg.focal_year || out.pubs[j].year >= p.year) continue;
            if (!citers[j].insert(c).second) continue;
            out.edges.push_back({p.pub_id, out.pubs[j].pub_id, p.year, 0});
            ++out_degree[c];
        }
    }
    std::sort(out.edges.begin(), out.edges.end(), [](const CitationEdge& a, const CitationEdge& b) {
        return std::tie(a.citing, a.cited) < std::tie(b.citing, b.cited);
    });
    return out;
}

void write_synth(const std::filesystem::path& dir, const SynthConfig& cfg, const SynthCorpus& corpus) {
    std::filesystem::create_directories(dir);
    write_publications(dir / "publications.tsv", corpus.pubs);
    write_citations(dir / "citations.tsv", corpus.edges);
    nlohmann::json topics = nlohmann::json::array();
    for (const auto& t : corpus.truth.topics) {
        nlohmann::json sched = nlohmann::json::object();
        for (auto [y, c] : t.schedule) sched[std::to_string(y)] = c;
        topics.push_back({{"id", t.id},
                          {"specialty", t.specialty},
                          {"discipline", t.discipline},
                          {"area", t.area},
                          {"growth_ratio", t.growth_ratio},
                          {"dominant_term", t.dominant_term},
                          {"schedule", sched}});
    }
    nlohmann::json pub_topic = nlohmann::json::array();
    for (std::size_t i = 0; i < corpus.pubs.size(); ++i)
        pub_topic.push_back({corpus.pubs[i].pub_id, corpus.truth.topic_of[i], corpus.truth.planted_citations[i]});
    nlohmann::json truth{{"config", to_json(cfg)},
                         {"beta", corpus.truth.beta},
                         {"dispersion", corpus.truth.dispersion},
                         {"truncated_citations", corpus.truth.truncated_citations},
                         {"topics", topics},
                         {"publications", pub_topic}};
    std::ofstream f(dir / "truth.json");
    if (!f) throw InputError("cannot write " + (dir / "truth.json").string());
    f << truth.dump(1) << '\n';
}

std::vector<RegressionRow> generate_logistic_rows(const SynthConfig& cfg, std::size_t n,
                                                  const std::array<double, 5>& beta, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    CovariateSampler covs(cfg, rng);
    std::uniform_real_distribution<double> log_ratio(std::log(cfg.ratio_min), std::log(cfg.ratio_max));
    std::uniform_real_distribution<double> unif;
    std::vector<RegressionRow> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        RegressionRow r;
        r.pub_id = static_cast<PubId>(i + 1);
        auto c = covs.draw(rng);
        r.growth_ratio = std::exp(log_ratio(rng));
        r.num_authors = c.authors;
        r.num_references = c.refs;
        r.jif = c.jif;
        const double eta = beta[0] + beta[1] * r.growth_ratio + beta[2] * r.num_authors + beta[3] * r.num_references +
                           beta[4] * r.jif;
        const bool high = unif(rng) < 1.0 / (1.0 + std::exp(-eta));
        r.citations = high ? 4 + static_cast<std::int64_t>(rng() % 20) : static_cast<std::int64_t>(rng() % 4);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace tg
