#include "pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <set>

#include "error.hpp"
#include "growth.hpp"
#include "report.hpp"
#include "tsv.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace tg {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    // splitmix64 finalizer over the combined coordinates
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(base) ^ a) ^ b);
}

void RunConfig::validate() const {
    filter.validate();
    cluster.validate();
    label.validate();
    mcmc.validate();
    if (resolutions.empty() || resolutions.size() > 4) throw ArgumentError("resolutions: 1 to 4 levels");
    for (std::size_t i = 1; i < resolutions.size(); ++i)
        if (!(resolutions[i] < resolutions[i - 1])) throw ArgumentError("resolutions must be strictly decreasing");
    if (growth.dt < 1 || growth.window < 1) throw ArgumentError("growth dt and window must be positive");
    if (growth.t != filter.focal_year) throw ArgumentError("growth t must equal the focal year");
    if (!(growth.min_mean >= 0)) throw ArgumentError("min_mean must be nonnegative");
    if (hurdle < 0) throw ArgumentError("hurdle must be nonnegative");
    if (top_disciplines < 1) throw ArgumentError("top_disciplines must be positive");
    if (publications.empty() != citations.empty())
        throw ArgumentError("publications and citations must be given together");
}

namespace {

template <typename T>
void take(const json& j, const char* key, T& field) {
    if (j.contains(key)) field = j.at(key).get<T>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : keys) known = known || it.key() == k;
        if (!known) throw ArgumentError("unknown config key '" + where + it.key() + "'");
    }
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
    if (!j.is_object()) throw ArgumentError("config must be a JSON object");
    reject_unknown(j,
                   {"publications", "citations", "lexicon", "out_dir", "seed", "filter", "normalization", "cluster",
                    "resolutions", "label", "growth", "mcmc", "hurdle", "disciplines", "top_disciplines", "figures",
                    "synth"},
                   "");
    RunConfig c;
    std::string s;
    if (j.contains("publications")) c.publications = j.at("publications").get<std::string>();
    if (j.contains("citations")) c.citations = j.at("citations").get<std::string>();
    if (j.contains("lexicon")) c.lexicon = j.at("lexicon").get<std::string>();
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
    take(j, "seed", c.seed);
    if (j.contains("filter")) {
        const auto& f = j.at("filter");
        reject_unknown(f, {"focal_year", "doc_types", "citation_window", "cutoff_date"}, "filter.");
        take(f, "focal_year", c.filter.focal_year);
        c.growth.t = c.filter.focal_year;
        if (f.contains("doc_types")) {
            c.filter.doc_types.clear();
            for (const auto& d : f.at("doc_types")) c.filter.doc_types.insert(parse_doc_type(d.get<std::string>()));
        }
        if (f.contains("citation_window")) {
            auto w = f.at("citation_window").get<std::array<int, 2>>();
            c.filter.citation_window = {w[0], w[1]};
        }
        if (f.contains("cutoff_date") && !f.at("cutoff_date").is_null()) {
            // yyyy-mm-dd
            const auto d = f.at("cutoff_date").get<std::string>();
            if (d.size() != 10 || d[4] != '-' || d[7] != '-') throw ArgumentError("cutoff_date must be yyyy-mm-dd");
            c.filter.cutoff_date = static_cast<int>(tsv::parse_int(d.substr(0, 4)) * 10000 +
                                                    tsv::parse_int(d.substr(5, 2)) * 100 + tsv::parse_int(d.substr(8, 2)));
        }
    }
    if (j.contains("normalization")) c.normalization = parse_normalization(j.at("normalization").get<std::string>());
    if (j.contains("cluster")) {
        const auto& k = j.at("cluster");
        reject_unknown(k, {"iterations", "min_class_size", "randomness", "starts"}, "cluster.");
        take(k, "iterations", c.cluster.iterations);
        take(k, "min_class_size", c.cluster.min_class_size);
        take(k, "randomness", c.cluster.randomness);
        take(k, "starts", c.cluster.starts);
    }
    take(j, "resolutions", c.resolutions);
    if (!c.resolutions.empty()) c.cluster.resolution = c.resolutions.front();
    if (j.contains("label")) {
        const auto& l = j.at("label");
        reject_unknown(l, {"alpha", "top_k"}, "label.");
        take(l, "alpha", c.label.alpha);
        take(l, "top_k", c.label.top_k);
    }
    if (j.contains("growth")) {
        const auto& g = j.at("growth");
        reject_unknown(g, {"t", "dt", "window", "min_mean", "doc_types"}, "growth.");
        if (g.contains("doc_types"))
            for (const auto& d : g.at("doc_types")) c.growth.doc_types.insert(parse_doc_type(d.get<std::string>()));
        take(g, "t", c.growth.t);
        take(g, "dt", c.growth.dt);
        take(g, "window", c.growth.window);
        take(g, "min_mean", c.growth.min_mean);
    }
    if (j.contains("mcmc")) {
        const auto& m = j.at("mcmc");
        reject_unknown(m, {"ndraw", "thin", "burnin_kept", "quantiles", "prior_variance", "sigma_shape", "sigma_scale"},
                       "mcmc.");
        take(m, "ndraw", c.mcmc.ndraw);
        take(m, "thin", c.mcmc.thin);
        take(m, "burnin_kept", c.mcmc.burnin_kept);
        take(m, "quantiles", c.mcmc.quantiles);
        take(m, "prior_variance", c.mcmc.prior_variance);
        take(m, "sigma_shape", c.mcmc.sigma_shape);
        take(m, "sigma_scale", c.mcmc.sigma_scale);
    }
    take(j, "hurdle", c.hurdle);
    take(j, "disciplines", c.disciplines);
    take(j, "top_disciplines", c.top_disciplines);
    take(j, "figures", c.figures);
    if (j.contains("synth")) c.synth = synth_config_from_json(j.at("synth"));
    if (!j.contains("synth") || !j.at("synth").contains("seed")) c.synth.seed = c.seed;
    return c;
}

RunConfig load_run_config(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open config " + path.string());
    json j;
    try {
        f >> j;
    } catch (const json::parse_error& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    return run_config_from_json(j);
}

json to_json(const RunConfig& c) {
    json doc_types = json::array(), growth_types = json::array();
    for (auto d : c.filter.doc_types) doc_types.push_back(std::string(to_string(d)));
    for (auto d : c.growth.doc_types) growth_types.push_back(std::string(to_string(d)));
    json cutoff = nullptr;
    if (c.filter.cutoff_date != 0) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", c.filter.cutoff_date / 10000, c.filter.cutoff_date / 100 % 100,
                      c.filter.cutoff_date % 100);
        cutoff = buf;
    }
    return json{
        {"publications", c.publications.string()},
        {"citations", c.citations.string()},
        {"lexicon", c.lexicon.string()},
        {"out_dir", c.out_dir.string()},
        {"seed", c.seed},
        {"filter",
         {{"focal_year", c.filter.focal_year},
          {"doc_types", doc_types},
          {"citation_window", {c.filter.citation_window.first, c.filter.citation_window.last}},
          {"cutoff_date", cutoff}}},
        {"normalization", std::string(to_string(c.normalization))},
        {"cluster",
         {{"iterations", c.cluster.iterations},
          {"min_class_size", c.cluster.min_class_size},
          {"randomness", c.cluster.randomness},
          {"starts", c.cluster.starts}}},
        {"resolutions", c.resolutions},
        {"label", {{"alpha", c.label.alpha}, {"top_k", c.label.top_k}}},
        {"growth", {{"t", c.growth.t}, {"dt", c.growth.dt}, {"window", c.growth.window}, {"min_mean", c.growth.min_mean},
                    {"doc_types", growth_types}}},
        {"mcmc",
         {{"ndraw", c.mcmc.ndraw},
          {"thin", c.mcmc.thin},
          {"burnin_kept", c.mcmc.burnin_kept},
          {"quantiles", c.mcmc.quantiles},
          {"prior_variance", c.mcmc.prior_variance},
          {"sigma_shape", c.mcmc.sigma_shape},
          {"sigma_scale", c.mcmc.sigma_scale}}},
        {"hurdle", c.hurdle},
        {"disciplines", c.disciplines},
        {"top_disciplines", c.top_disciplines},
        {"figures", c.figures},
        {"synth", to_json(c.synth)},
    };
}

fs::path publications_input(const RunConfig& cfg) {
    return cfg.publications.empty() ? cfg.out_dir / "corpus" / "publications.tsv" : cfg.publications;
}
fs::path citations_input(const RunConfig& cfg) {
    return cfg.citations.empty() ? cfg.out_dir / "corpus" / "citations.tsv" : cfg.citations;
}

namespace {

void write_json(const fs::path& p, const json& j) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw InputError("cannot write " + p.string());
    f << j.dump(1) << '\n';
}

json read_json(const fs::path& p) {
    std::ifstream f(p);
    if (!f) throw InputError("missing artifact " + p.string() + " (run the earlier stages first)");
    return json::parse(f);
}

struct Corpus {
    std::vector<Publication> pubs;
    std::vector<CitationEdge> edges;
};

// The cleaned corpus written by ingest, with citation counts recomputed.
Corpus load_clean(const RunConfig& cfg) {
    Corpus c;
    const auto pubs_path = cfg.out_dir / "publications.tsv";
    if (!fs::exists(pubs_path)) throw InputError("missing artifact " + pubs_path.string() + " (run ingest first)");
    auto pubs = load_publications(pubs_path);
    auto edges = load_citations(cfg.out_dir / "citations.tsv");
    if (!pubs.errors.empty() || !edges.errors.empty()) throw InputError("ingested corpus files are corrupt");
    c.pubs = std::move(pubs.items);
    c.edges = std::move(edges.items);
    count_citations(c.pubs, c.edges, cfg.filter.citation_window, cfg.filter.cutoff_date);
    return c;
}

ClassLookup load_lookup(const RunConfig& cfg, std::array<std::uint32_t, 4>* n_classes = nullptr) {
    const auto table = read_classification(cfg.out_dir / "classification.tsv");
    ClassLookup lookup;
    std::array<std::uint32_t, 4> n{};
    for (std::size_t i = 0; i < table.pub_ids.size(); ++i) {
        lookup[table.pub_ids[i]] = table.ids[i];
        for (int l = 0; l < 4; ++l) n[l] = std::max(n[l], table.ids[i][l] + 1);
    }
    if (n_classes) *n_classes = n;
    return lookup;
}

void warn_rows(const std::string& what, const std::vector<RowError>& errors, RunReport& report) {
    if (errors.empty()) return;
    std::string msg = what + ": " + std::to_string(errors.size()) + " malformed rows skipped";
    for (std::size_t i = 0; i < std::min<std::size_t>(errors.size(), 3); ++i)
        msg += "; line " + std::to_string(errors[i].line) + ": " + errors[i].message;
    report.warnings.push_back(msg);
}

void stage_synth(const RunConfig& cfg, RunReport&) {
    auto sc = cfg.synth;
    const auto corpus = generate_corpus(sc);
    write_synth(cfg.out_dir / "corpus", sc, corpus);
}

void stage_ingest(const RunConfig& cfg, RunReport& report) {
    auto pubs = load_publications(publications_input(cfg));
    auto edges = load_citations(citations_input(cfg));
    warn_rows("publications", pubs.errors, report);
    warn_rows("citations", edges.errors, report);
    if (pubs.items.empty()) throw InputError("empty corpus");
    const auto counts = count_citations(pubs.items, edges.items, cfg.filter.citation_window, cfg.filter.cutoff_date);
    const bool dates = std::any_of(edges.items.begin(), edges.items.end(), [](const auto& e) { return e.citing_date != 0; });
    write_publications(cfg.out_dir / "publications.tsv", pubs.items, true);
    write_citations(cfg.out_dir / "citations.tsv", edges.items, dates);
    const auto focal = filter_corpus(pubs.items, cfg.filter);
    if (focal.empty()) report.warnings.push_back("no publications in the focal year after filtering");
    write_json(cfg.out_dir / "ingest.json",
               {{"publications", pubs.items.size()},
                {"publication_row_errors", pubs.errors.size()},
                {"citations", edges.items.size()},
                {"citation_row_errors", edges.errors.size()},
                {"focal_publications", focal.size()},
                {"citations_counted", counts.counted},
                {"citations_outside_window", counts.outside_window},
                {"citations_dangling", counts.dangling}});
}

void stage_cluster(const RunConfig& cfg, RunReport& report) {
    const auto c = load_clean(cfg);
    BuildReport br;
    auto g = normalize_links(build_network(c.pubs, c.edges, &br), cfg.normalization);
    if (g.node_count() == 0) throw InputError("empty corpus");
    auto cc = cfg.cluster;
    cc.seed = cfg.seed;
    cc.resolution = cfg.resolutions.front();
    const auto h = build_hierarchy(g, cfg.resolutions, cc);
    write_graph_tsv(cfg.out_dir / "graph.tsv", g);
    write_classification(cfg.out_dir / "classification.tsv", g, h);
    json levels = json::array();
    for (std::size_t l = 0; l < h.levels.size(); ++l) {
        const auto& p = h.levels[l];
        levels.push_back({{"level", kLevelNames[l]},
                          {"resolution", h.resolutions[l]},
                          {"classes", p.n_classes},
                          {"quality", cpm_quality(g, p, h.resolutions[l])}});
    }
    json orphan_ids = json::array();
    for (std::size_t k = 0; k < h.topic_orphan.size(); ++k)
        if (h.topic_orphan[k]) orphan_ids.push_back(k);
    if (!orphan_ids.empty())
        report.warnings.push_back(std::to_string(orphan_ids.size()) +
                                  " small topics without external links kept as orphans and excluded");
    write_json(cfg.out_dir / "clusters.json",
               {{"nodes", g.node_count()},
                {"links", g.links.size()},
                {"dropped_out_of_corpus", br.dropped_out_of_corpus},
                {"duplicate_edges", br.duplicate_edges},
                {"seed", cc.seed},
                {"normalization", std::string(to_string(cfg.normalization))},
                {"orphan_topics", orphan_ids},
                {"area_level", "algorithmic, no manual adjustment"},
                {"levels", levels}});
}

void stage_label(const RunConfig& cfg, RunReport&) {
    const auto c = load_clean(cfg);
    std::array<std::uint32_t, 4> n_classes{};
    const auto lookup = load_lookup(cfg, &n_classes);
    const auto lexicon = cfg.lexicon.empty() ? Lexicon::english_default() : Lexicon::load(cfg.lexicon);
    std::vector<std::vector<std::string>> tokens;
    std::vector<std::array<std::uint32_t, 4>> classes;
    for (const auto& p : c.pubs) {
        auto it = lookup.find(p.pub_id);
        if (it == lookup.end()) continue;
        tokens.push_back(p.title_tokens);
        classes.push_back(it->second);
    }
    tsv::Writer w(cfg.out_dir / "labels.tsv");
    w.row({"class_id", "level", "label", "n_publications"});
    for (int l = 0; l < 4; ++l) {
        std::vector<std::uint32_t> class_of(classes.size());
        std::vector<std::int64_t> sizes(n_classes[l], 0);
        for (std::size_t i = 0; i < classes.size(); ++i) {
            class_of[i] = classes[i][l];
            ++sizes[class_of[i]];
        }
        const auto counts = count_terms(tokens, class_of, n_classes[l], lexicon);
        const auto ranked = tfs_rank(counts, cfg.label);
        for (std::uint32_t k = 0; k < n_classes[l]; ++k)
            w.row({std::to_string(k), kLevelNames[l], label_class(k, ranked[k], cfg.label), std::to_string(sizes[k])});
    }
}

std::map<std::pair<std::string, std::uint32_t>, std::string> read_labels(const RunConfig& cfg) {
    std::map<std::pair<std::string, std::uint32_t>, std::string> out;
    const auto path = cfg.out_dir / "labels.tsv";
    if (!fs::exists(path)) return out;
    const auto t = tsv::read(path);
    const int lv = t.column("level"), id = t.column("class_id"), lb = t.column("label");
    if (lv < 0 || id < 0 || lb < 0) throw InputError(path.string() + ": missing columns");
    for (const auto& r : t.rows)
        out[{r[lv], static_cast<std::uint32_t>(tsv::parse_int(r[id]))}] = r[lb];
    return out;
}

void stage_growth(const RunConfig& cfg, RunReport& report) {
    const auto c = load_clean(cfg);
    std::array<std::uint32_t, 4> n_classes{};
    const auto lookup = load_lookup(cfg, &n_classes);
    std::unordered_map<PubId, std::uint32_t> topic_of;
    for (const auto& [id, cls] : lookup) topic_of[id] = cls[0];
    const auto& g = cfg.growth;
    const YearRange years{g.t - g.window + 1, g.t + g.dt};
    const auto series = topic_series(c.pubs, topic_of, n_classes[0], years, g.doc_types);
    std::set<std::uint32_t> orphans;
    for (const auto& id : read_json(cfg.out_dir / "clusters.json").at("orphan_topics")) orphans.insert(id.get<std::uint32_t>());
    std::vector<GrowthRecord> records;
    std::size_t empty_base = 0, missing = 0;
    for (const auto& s : series) {
        try {
            records.push_back(smoothed_growth_ratio(s, g.t, g.dt, g.window));
            missing += records.back().missing_years > 0;
        } catch (const NumericError&) {
            ++empty_base;  // no publications in the base window; ineligible
        }
    }
    records = filter_topics(std::move(records), g.min_mean);
    for (auto& r : records)
        if (orphans.count(r.topic_id)) r.eligible = false;
    if (missing > 0)
        report.warnings.push_back(std::to_string(missing) + " topics with missing years in a window (counted as 0)");
    if (empty_base > 0)
        report.warnings.push_back(std::to_string(empty_base) + " topics without publications in the base window");
    write_growth(cfg.out_dir / "growth.tsv", records);
    tsv::Writer w(cfg.out_dir / "topic_series.tsv");
    w.row({"topic_id", "year", "publications"});
    for (const auto& s : series)
        for (auto [y, n] : s.counts) w.row({std::to_string(s.topic_id), std::to_string(y), std::to_string(n)});
}

void write_rows(const fs::path& p, const std::vector<RegressionRow>& rows) {
    tsv::Writer w(p);
    w.row({"pub_id", "citations", "growth_ratio", "num_authors", "num_references", "jif"});
    for (const auto& r : rows)
        w.row({std::to_string(r.pub_id), std::to_string(r.citations), tsv::format_double(r.growth_ratio),
               std::to_string(r.num_authors), std::to_string(r.num_references), tsv::format_double(r.jif)});
}

std::vector<RegressionRow> read_rows(const fs::path& p) {
    const auto t = tsv::read(p);
    std::vector<RegressionRow> rows;
    const int c[] = {t.column("pub_id"), t.column("citations"), t.column("growth_ratio"), t.column("num_authors"),
                     t.column("num_references"), t.column("jif")};
    for (int i : c)
        if (i < 0) throw InputError(p.string() + ": missing columns");
    for (const auto& r : t.rows) {
        RegressionRow x;
        x.pub_id = tsv::parse_int(r[c[0]]);
        x.citations = tsv::parse_int(r[c[1]]);
        x.growth_ratio = tsv::parse_double(r[c[2]]);
        x.num_authors = static_cast<int>(tsv::parse_int(r[c[3]]));
        x.num_references = static_cast<int>(tsv::parse_int(r[c[4]]));
        x.jif = tsv::parse_double(r[c[5]]);
        rows.push_back(x);
    }
    return rows;
}

json logistic_json(const LogisticFit& f) {
    json coefs = json::array();
    for (const auto& c : f.coefficients)
        coefs.push_back({{"name", c.name}, {"estimate", c.estimate}, {"se", c.se}, {"z", c.z}, {"p", c.p}});
    return {{"status", std::string(to_string(f.status))},
            {"n", f.n},
            {"iterations", f.iterations},
            {"deviance", f.deviance},
            {"coefficients", coefs}};
}

LogisticFit logistic_from_json(const json& j) {
    LogisticFit f;
    f.n = j.at("n");
    f.iterations = j.at("iterations");
    f.deviance = j.at("deviance");
    const auto s = j.at("status").get<std::string>();
    f.status = s == "ok" ? LogisticStatus::Ok : s == "separation" ? LogisticStatus::Separation : LogisticStatus::NotConverged;
    for (const auto& c : j.at("coefficients")) {
        LogisticCoefficient x;
        x.name = c.at("name");
        x.estimate = c.at("estimate");
        x.exp_estimate = std::exp(x.estimate);
        x.se = c.at("se");
        x.z = c.at("z");
        x.p = c.at("p");
        x.signif = signif_code(x.p);
        f.coefficients.push_back(x);
    }
    return f;
}

json quantile_json(const QuantileFit& f, std::uint64_t seed) {
    json coefs = json::array();
    for (const auto& c : f.coefficients)
        coefs.push_back({{"name", c.name},
                         {"mean", c.mean},
                         {"lower", c.lower},
                         {"upper", c.upper},
                         {"sd", c.sd},
                         {"mcse", c.mcse}});
    return {{"quantile", f.quantile},
            {"seed", seed},
            {"n", f.n},
            {"n_kept_draws", f.n_kept_draws},
            {"converged", f.converged},
            {"diagnostic", f.diagnostic},
            {"coefficients", coefs}};
}

QuantileFit quantile_from_json(const json& j) {
    QuantileFit f;
    f.quantile = j.at("quantile");
    f.n = j.at("n");
    f.n_kept_draws = j.at("n_kept_draws");
    f.converged = j.at("converged");
    f.diagnostic = j.at("diagnostic");
    for (const auto& c : j.at("coefficients"))
        f.coefficients.push_back({c.at("name"), c.at("mean"), c.at("lower"), c.at("upper"), c.at("sd"), c.at("mcse")});
    return f;
}

void stage_fit(const RunConfig& cfg, RunReport& report) {
    const auto c = load_clean(cfg);
    const auto lookup = load_lookup(cfg);
    const auto growth = read_growth(cfg.out_dir / "growth.tsv");
    const auto labels = read_labels(cfg);
    const auto focal = filter_corpus(c.pubs, cfg.filter);

    // Focal publications and eligible topics per discipline.
    std::map<std::uint32_t, std::int64_t> total;
    std::map<std::uint32_t, std::set<std::uint32_t>> topics;
    std::set<std::uint32_t> eligible;
    for (const auto& g : growth)
        if (g.eligible) eligible.insert(g.topic_id);
    for (const auto& p : focal) {
        auto it = lookup.find(p.pub_id);
        if (it == lookup.end()) continue;
        ++total[it->second[2]];
        if (eligible.count(it->second[0])) topics[it->second[2]].insert(it->second[0]);
    }

    std::vector<std::uint32_t> selected = cfg.disciplines;
    if (selected.empty()) {
        std::vector<std::pair<std::int64_t, std::uint32_t>> by_size;
        for (auto [d, n] : total) by_size.emplace_back(-n, d);
        std::sort(by_size.begin(), by_size.end());
        for (std::size_t i = 0; i < by_size.size() && static_cast<int>(i) < cfg.top_disciplines; ++i)
            selected.push_back(by_size[i].second);
    } else {
        for (auto d : selected)
            if (!total.count(d)) throw ArgumentError("discipline " + std::to_string(d) + " has no focal publications");
    }
    std::sort(selected.begin(), selected.end());
    selected.erase(std::unique(selected.begin(), selected.end()), selected.end());

    fs::create_directories(cfg.out_dir / "fits");
    json disciplines = json::array();
    struct Job {
        std::size_t d;
        std::size_t q;
        std::uint64_t seed;
        std::future<QuantileFit> fit;
    };
    std::vector<json> entries;
    std::vector<HurdleSplit> splits;
    std::vector<Job> jobs;
    for (std::size_t di = 0; di < selected.size(); ++di) {
        const auto d = selected[di];
        AssembleReport ar;
        const auto rows = assemble_rows(focal, growth, lookup, d, &ar);
        write_rows(cfg.out_dir / "fits" / ("rows_" + std::to_string(d) + ".tsv"), rows);
        auto lab = labels.find({"discipline", d});
        json e{{"discipline", d},
               {"label", lab == labels.end() ? "unlabeled-" + std::to_string(d) : lab->second},
               {"publications_total", total[d]},
               {"publications_included", rows.size()},
               {"topics", topics[d].size()},
               {"excluded_ineligible_topic", ar.ineligible_topic},
               {"excluded_missing_growth", ar.missing_growth}};
        auto split = split_hurdle(rows, cfg.hurdle);
        e["n_low"] = split.low.size();
        e["n_high"] = split.high.size();
        try {
            e["logistic"] = logistic_json(fit_logistic(rows, cfg.hurdle));
        } catch (const std::exception& ex) {
            report.warnings.push_back("discipline " + std::to_string(d) + ": logistic part not fitted: " + ex.what());
            e["logistic"] = nullptr;
        }
        if (split.high.empty())
            report.warnings.push_back("discipline " + std::to_string(d) + ": empty high-count part");
        entries.push_back(std::move(e));
        splits.push_back(std::move(split));
    }
    // Quantile fits fan out over disciplines x quantiles and are joined in that order.
    for (std::size_t di = 0; di < selected.size(); ++di) {
        if (splits[di].high.empty()) continue;
        for (std::size_t qi = 0; qi < cfg.mcmc.quantiles.size(); ++qi) {
            auto mc = cfg.mcmc;
            mc.seed = derive_seed(cfg.seed, selected[di] + 1, qi + 1);
            const double q = cfg.mcmc.quantiles[qi];
            const auto* high = &splits[di].high;
            jobs.push_back({di, qi, mc.seed, std::async(std::launch::async, [high, q, mc] {
                                return fit_quantile(*high, q, mc);
                            })});
        }
    }
    for (auto& e : entries) e["quantiles"] = json::array();
    for (auto& job : jobs) {
        try {
            entries[job.d]["quantiles"].push_back(quantile_json(job.fit.get(), job.seed));
        } catch (const std::exception& ex) {
            report.warnings.push_back("discipline " + std::to_string(selected[job.d]) + ", quantile " +
                                      format_sig(cfg.mcmc.quantiles[job.q], 4) + ": not fitted: " + ex.what());
        }
    }
    for (auto& e : entries) {
        for (const auto& q : e["quantiles"])
            if (!q["converged"].get<bool>())
                report.warnings.push_back("discipline " + std::to_string(e["discipline"].get<std::uint32_t>()) +
                                          ", quantile " + format_sig(q["quantile"].get<double>(), 4) +
                                          ": not converged (" + q["diagnostic"].get<std::string>() + ")");
        disciplines.push_back(std::move(e));
    }
    write_json(cfg.out_dir / "fits.json", {{"hurdle", cfg.hurdle}, {"disciplines", disciplines}});
}

void stage_report(const RunConfig& cfg, RunReport& report) {
    const auto fits = read_json(cfg.out_dir / "fits.json");
    std::vector<DisciplineCounts> counts;
    std::vector<DisciplineAverages> averages;
    std::vector<DisciplineFits> figure_fits;
    std::vector<RegressionRow> pooled;
    for (const auto& e : fits.at("disciplines")) {
        const auto d = e.at("discipline").get<std::uint32_t>();
        const auto label = e.at("label").get<std::string>();
        counts.push_back({d, label, e.at("publications_total"), e.at("publications_included"), e.at("topics")});
        const auto rows = read_rows(cfg.out_dir / "fits" / ("rows_" + std::to_string(d) + ".tsv"));
        averages.push_back(emit_discipline_summary(d, label, rows));
        pooled.insert(pooled.end(), rows.begin(), rows.end());

        DisciplineFits df{d, label, {}};
        for (const auto& q : e.at("quantiles")) df.quantiles.push_back(quantile_from_json(q));
        if (!e.at("logistic").is_null()) {
            const auto tables = summarize_fits(logistic_from_json(e.at("logistic")), df.quantiles);
            write_table(cfg.out_dir / ("logistic_" + std::to_string(d) + ".tsv"), tables.logistic);
            write_table(cfg.out_dir / ("quantile_" + std::to_string(d) + ".tsv"), tables.quantile);
        } else {
            const auto tables = summarize_fits(LogisticFit{}, df.quantiles);
            write_table(cfg.out_dir / ("quantile_" + std::to_string(d) + ".tsv"), tables.quantile);
        }
        figure_fits.push_back(std::move(df));
    }
    write_table(cfg.out_dir / "table1.tsv", counts_table(counts));
    write_table(cfg.out_dir / "table2.tsv", averages_table(averages));
    if (cfg.figures) {
        const auto fr = emit_figures(pooled, figure_fits, cfg.out_dir / "figures");
        report.warnings.insert(report.warnings.end(), fr.notices.begin(), fr.notices.end());
    }
}

}  // namespace

void run_stage(const RunConfig& cfg, const std::string& stage, RunReport& report) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    try {
        cfg.validate();
        fs::create_directories(cfg.out_dir);
        if (stage == "synth") stage_synth(cfg, report);
        else if (stage == "ingest") stage_ingest(cfg, report);
        else if (stage == "cluster") stage_cluster(cfg, report);
        else if (stage == "label") stage_label(cfg, report);
        else if (stage == "growth") stage_growth(cfg, report);
        else if (stage == "fit") stage_fit(cfg, report);
        else if (stage == "report") stage_report(cfg, report);
        else throw ArgumentError("unknown stage '" + stage + "'");
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what(), std::current_exception());
    }
    report.stages_run.push_back(stage);
    report.timings.emplace_back(stage, std::chrono::duration<double>(clock::now() - start).count());
}

RunReport run_pipeline(const RunConfig& cfg) {
    RunReport report;
    if (cfg.publications.empty()) run_stage(cfg, "synth", report);
    for (const char* s : {"ingest", "cluster", "label", "growth", "fit", "report"}) run_stage(cfg, s, report);

    json fits;
    try {
        fits = read_json(cfg.out_dir / "fits.json");
    } catch (const std::exception& e) {
        throw StageError("run", e.what());
    }
    json convergence = json::array();
    for (const auto& d : fits.at("disciplines"))
        for (const auto& q : d.at("quantiles"))
            convergence.push_back({{"discipline", d.at("discipline")},
                                   {"quantile", q.at("quantile")},
                                   {"seed", q.at("seed")},
                                   {"converged", q.at("converged")}});
    write_json(cfg.out_dir / "run_metadata.json",
               {{"version", TG_VERSION},
                {"seed", cfg.seed},
                {"config", to_json(cfg)},
                {"stages", report.stages_run},
                {"warnings", report.warnings},
                {"quantile_fits", convergence},
                {"fits", fits}});
    std::ofstream t(cfg.out_dir / "timings.txt");
    for (const auto& [stage, secs] : report.timings) t << stage << '\t' << secs << '\n';
    return report;
}

}  // namespace tg
