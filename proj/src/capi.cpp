#include "topicgrowth/topicgrowth.h"

#include <cstring>
#include <limits>
#include <memory>
#include <string>

#include "citegraph.hpp"
#include "cluster.hpp"
#include "error.hpp"
#include "growth.hpp"
#include "hurdle.hpp"
#include "pipeline.hpp"

struct tg_context {
    tg::RunConfig cfg;
    tg::RunReport report;
};

struct tg_graph {
    tg::WeightedCitationGraph g;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_stage;

tg_status fail(tg_status s, const char* what) {
    last_error = what;
    return s;
}

// Status code for an exception from the core; sets the thread's error message.
tg_status classify(const std::exception_ptr& ep) {
    try {
        std::rethrow_exception(ep);
    } catch (const tg::StageError& e) {
        const std::string stage = e.stage(), what = e.detail();
        const tg_status s = e.cause() ? classify(e.cause()) : TG_ERR_INTERNAL;
        last_stage = stage;
        last_error = what;
        return s;
    } catch (const tg::ArgumentError& e) {
        return fail(TG_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(TG_ERR_INVALID_ARGUMENT, e.what());
    } catch (const tg::InputError& e) {
        return fail(TG_ERR_INPUT, e.what());
    } catch (const tg::NumericError& e) {
        return fail(TG_ERR_NUMERIC, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(TG_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(TG_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(TG_ERR_INTERNAL, "unknown error");
    }
}

template <typename F>
tg_status guarded(F&& f) {
    last_error.clear();
    last_stage.clear();
    try {
        f();
        return TG_OK;
    } catch (...) {
        return classify(std::current_exception());
    }
}

}  // namespace

extern "C" {

const char* tg_version(void) { return TG_VERSION; }

const char* tg_status_string(tg_status status) {
    switch (status) {
        case TG_OK: return "ok";
        case TG_ERR_INVALID_ARGUMENT: return "invalid argument";
        case TG_ERR_INPUT: return "input error";
        case TG_ERR_NUMERIC: return "numeric error";
        case TG_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* tg_last_error(void) { return last_error.c_str(); }
const char* tg_last_error_stage(void) { return last_stage.c_str(); }

tg_status tg_context_create(const char* config_json, tg_context** out) {
    if (!out) return fail(TG_ERR_INVALID_ARGUMENT, "null output handle");
    *out = nullptr;
    return guarded([&] {
        auto ctx = std::make_unique<tg_context>();
        if (config_json && *config_json) ctx->cfg = tg::run_config_from_json(nlohmann::json::parse(config_json));
        ctx->cfg.validate();
        *out = ctx.release();
    });
}

tg_status tg_context_load(const char* config_path, tg_context** out) {
    if (!out || !config_path) return fail(TG_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        auto ctx = std::make_unique<tg_context>();
        ctx->cfg = tg::load_run_config(config_path);
        ctx->cfg.validate();
        *out = ctx.release();
    });
}

void tg_context_destroy(tg_context* ctx) { delete ctx; }

tg_status tg_context_set_seed(tg_context* ctx, uint64_t seed) {
    if (!ctx) return fail(TG_ERR_INVALID_ARGUMENT, "null context");
    ctx->cfg.seed = seed;
    ctx->cfg.synth.seed = seed;
    return TG_OK;
}

tg_status tg_context_set_output_dir(tg_context* ctx, const char* dir) {
    if (!ctx || !dir || !*dir) return fail(TG_ERR_INVALID_ARGUMENT, "null context or empty directory");
    ctx->cfg.out_dir = dir;
    return TG_OK;
}

tg_status tg_context_set_input(tg_context* ctx, const char* publications_tsv, const char* citations_tsv) {
    if (!ctx || !publications_tsv || !citations_tsv) return fail(TG_ERR_INVALID_ARGUMENT, "null argument");
    ctx->cfg.publications = publications_tsv;
    ctx->cfg.citations = citations_tsv;
    return TG_OK;
}

tg_status tg_run_stage(tg_context* ctx, const char* stage) {
    if (!ctx || !stage) return fail(TG_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        if (std::strcmp(stage, "run") == 0) {
            auto r = tg::run_pipeline(ctx->cfg);
            ctx->report.warnings.insert(ctx->report.warnings.end(), r.warnings.begin(), r.warnings.end());
        } else {
            tg::run_stage(ctx->cfg, stage, ctx->report);
        }
    });
}

size_t tg_context_warning_count(const tg_context* ctx) { return ctx ? ctx->report.warnings.size() : 0; }

const char* tg_context_warning(const tg_context* ctx, size_t index) {
    if (!ctx || index >= ctx->report.warnings.size()) return nullptr;
    return ctx->report.warnings[index].c_str();
}

tg_status tg_graph_create(size_t n_nodes, size_t n_links, const uint32_t* a, const uint32_t* b, const double* weight,
                          tg_graph** out) {
    if (!out || (n_links > 0 && (!a || !b || !weight))) return fail(TG_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> links;
        links.reserve(n_links);
        for (size_t i = 0; i < n_links; ++i) links.emplace_back(a[i], b[i], weight[i]);
        *out = new tg_graph{tg::make_graph(n_nodes, links)};
    });
}

tg_status tg_graph_from_citations(size_t n_pubs, const int64_t* pub_ids, size_t n_edges, const int64_t* citing,
                                  const int64_t* cited, tg_graph** out) {
    if (!out || (n_pubs > 0 && !pub_ids) || (n_edges > 0 && (!citing || !cited)))
        return fail(TG_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        std::vector<tg::Publication> pubs(n_pubs);
        for (size_t i = 0; i < n_pubs; ++i) pubs[i].pub_id = pub_ids[i];
        std::vector<tg::CitationEdge> edges(n_edges);
        for (size_t i = 0; i < n_edges; ++i) {
            edges[i].citing = citing[i];
            edges[i].cited = cited[i];
        }
        *out = new tg_graph{tg::build_network(pubs, edges)};
    });
}

void tg_graph_destroy(tg_graph* g) { delete g; }

size_t tg_graph_node_count(const tg_graph* g) { return g ? g->g.node_count() : 0; }
size_t tg_graph_link_count(const tg_graph* g) { return g ? g->g.links.size() : 0; }

tg_status tg_graph_normalize(tg_graph* g, tg_normalization mode) {
    if (!g) return fail(TG_ERR_INVALID_ARGUMENT, "null graph");
    if (mode != TG_NORM_TOTAL_LINKS && mode != TG_NORM_OUT_LINKS) return fail(TG_ERR_INVALID_ARGUMENT, "bad mode");
    return guarded([&] {
        g->g = tg::normalize_links(g->g, mode == TG_NORM_TOTAL_LINKS ? tg::Normalization::TotalLinks
                                                                     : tg::Normalization::OutLinks);
    });
}

tg_status tg_graph_attributed_sums(const tg_graph* g, double* out) {
    if (!g || !out) return fail(TG_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto s = tg::attributed_weight_sums(g->g);
        std::copy(s.begin(), s.end(), out);
    });
}

tg_status tg_leiden_cpm(const tg_graph* g, double resolution, int iterations, uint64_t seed, uint32_t* assignment,
                        uint32_t* n_classes) {
    if (!g || !assignment) return fail(TG_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        tg::ClusterConfig cfg;
        cfg.resolution = resolution;
        cfg.iterations = iterations;
        cfg.seed = seed;
        const auto p = tg::leiden_cpm(g->g, cfg);
        std::copy(p.assignment.begin(), p.assignment.end(), assignment);
        if (n_classes) *n_classes = p.n_classes;
    });
}

tg_status tg_cpm_quality(const tg_graph* g, const uint32_t* assignment, double resolution, double* quality) {
    if (!g || !assignment || !quality) return fail(TG_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        auto p = tg::Partition::from_labels(std::vector<std::uint32_t>(assignment, assignment + g->g.node_count()));
        *quality = tg::cpm_quality(g->g, p, resolution);
    });
}

tg_status tg_growth_ratio(size_t n_years, const int* years, const int64_t* counts, int t, int dt, double* ratio) {
    if ((n_years > 0 && (!years || !counts)) || !ratio) return fail(TG_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        tg::TopicSeries s;
        for (size_t i = 0; i < n_years; ++i) {
            if (counts[i] < 0) throw tg::ArgumentError("negative count");
            s.counts[years[i]] += counts[i];
        }
        *ratio = tg::smoothed_growth_ratio(s, t, dt).ratio;
    });
}

namespace {

std::vector<std::string> default_names(size_t k) {
    std::vector<std::string> names;
    for (size_t i = 0; i < k; ++i) names.push_back("x" + std::to_string(i));
    return names;
}

Eigen::MatrixXd row_major(const double* X, size_t n, size_t k) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < k; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = X[i * k + j];
    return m;
}

}  // namespace

tg_status tg_fit_logistic(const double* X, const double* y, size_t n, size_t k, double* estimate, double* se,
                          double* z, double* p, tg_logistic_status* status) {
    if (!X || !y || k == 0) return fail(TG_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        const auto fit = tg::fit_logistic(row_major(X, n, k),
                                          Eigen::Map<const Eigen::VectorXd>(y, static_cast<Eigen::Index>(n)),
                                          default_names(k));
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (size_t j = 0; j < k && fit.coefficients.empty(); ++j) {
            // separation: no estimates
            for (double* out : {estimate, se, z, p})
                if (out) out[j] = nan;
        }
        for (size_t j = 0; j < fit.coefficients.size(); ++j) {
            if (estimate) estimate[j] = fit.coefficients[j].estimate;
            if (se) se[j] = fit.coefficients[j].se;
            if (z) z[j] = fit.coefficients[j].z;
            if (p) p[j] = fit.coefficients[j].p;
        }
        if (status)
            *status = fit.status == tg::LogisticStatus::Ok           ? TG_LOGIT_OK
                      : fit.status == tg::LogisticStatus::Separation ? TG_LOGIT_SEPARATION
                                                                     : TG_LOGIT_NOT_CONVERGED;
    });
}

tg_status tg_fit_quantile(const double* X, const double* y, size_t n, size_t k, double quantile, int ndraw, int thin,
                          int burnin_kept, uint64_t seed, double* mean, double* lower, double* upper, int* converged) {
    if (!X || !y || k == 0) return fail(TG_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        tg::McmcConfig cfg;
        cfg.ndraw = ndraw;
        cfg.thin = thin;
        cfg.burnin_kept = burnin_kept;
        cfg.seed = seed;
        cfg.quantiles = {quantile};
        cfg.validate();
        const auto fit = tg::fit_quantile(row_major(X, n, k),
                                          Eigen::Map<const Eigen::VectorXd>(y, static_cast<Eigen::Index>(n)), quantile,
                                          cfg, default_names(k));
        for (size_t j = 0; j < k; ++j) {
            if (mean) mean[j] = fit.coefficients[j].mean;
            if (lower) lower[j] = fit.coefficients[j].lower;
            if (upper) upper[j] = fit.coefficients[j].upper;
        }
        if (converged) *converged = fit.converged ? 1 : 0;
    });
}

}  // extern "C"
