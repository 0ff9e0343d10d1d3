#ifndef TOPICGROWTH_H
#define TOPICGROWTH_H

#include <stddef.h>
#include <stdint.h>

#if defined(TG_BUILDING_LIBRARY)
#define TG_API __attribute__((visibility("default")))
#else
#define TG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tg_status {
    TG_OK = 0,
    TG_ERR_INVALID_ARGUMENT = 1, /* bad parameter, config or null handle */
    TG_ERR_INPUT = 2,            /* unreadable or malformed input files */
    TG_ERR_NUMERIC = 3,          /* singular design, empty base window, ... */
    TG_ERR_INTERNAL = 4
} tg_status;

typedef enum tg_normalization { TG_NORM_TOTAL_LINKS = 0, TG_NORM_OUT_LINKS = 1 } tg_normalization;

typedef enum tg_logistic_status { TG_LOGIT_OK = 0, TG_LOGIT_SEPARATION = 1, TG_LOGIT_NOT_CONVERGED = 2 } tg_logistic_status;

typedef struct tg_context tg_context;
typedef struct tg_graph tg_graph;

TG_API const char* tg_version(void);
TG_API const char* tg_status_string(tg_status status);

/* Message of the last failed call on this thread; "" if none. */
TG_API const char* tg_last_error(void);
/* Pipeline stage of the last failed tg_run_stage on this thread; "" if none. */
TG_API const char* tg_last_error_stage(void);

/* ---- pipeline ---- */

/* config_json may be NULL or "" for defaults. */
TG_API tg_status tg_context_create(const char* config_json, tg_context** out);
TG_API tg_status tg_context_load(const char* config_path, tg_context** out);
TG_API void tg_context_destroy(tg_context* ctx);

TG_API tg_status tg_context_set_seed(tg_context* ctx, uint64_t seed);
TG_API tg_status tg_context_set_output_dir(tg_context* ctx, const char* dir);
TG_API tg_status tg_context_set_input(tg_context* ctx, const char* publications_tsv, const char* citations_tsv);

/* stage: synth, ingest, cluster, label, growth, fit, report, or run for the whole pipeline. */
TG_API tg_status tg_run_stage(tg_context* ctx, const char* stage);

/* Warnings accumulated by the stages run on this context. */
TG_API size_t tg_context_warning_count(const tg_context* ctx);
TG_API const char* tg_context_warning(const tg_context* ctx, size_t index);

/* ---- graphs and clustering ---- */

/* Undirected weighted graph on nodes 0..n_nodes-1. Links need a != b and weight > 0. */
TG_API tg_status tg_graph_create(size_t n_nodes, size_t n_links, const uint32_t* a, const uint32_t* b,
                                 const double* weight, tg_graph** out);
/* Direct-citation network over the given publication ids; edges to unknown ids are dropped. */
TG_API tg_status tg_graph_from_citations(size_t n_pubs, const int64_t* pub_ids, size_t n_edges,
                                         const int64_t* citing, const int64_t* cited, tg_graph** out);
TG_API void tg_graph_destroy(tg_graph* g);

TG_API size_t tg_graph_node_count(const tg_graph* g);
TG_API size_t tg_graph_link_count(const tg_graph* g);
TG_API tg_status tg_graph_normalize(tg_graph* g, tg_normalization mode);
/* Per-node sum of attributed link weight; `out` holds node_count values. */
TG_API tg_status tg_graph_attributed_sums(const tg_graph* g, double* out);

/* `assignment` holds node_count class ids on return. */
TG_API tg_status tg_leiden_cpm(const tg_graph* g, double resolution, int iterations, uint64_t seed,
                               uint32_t* assignment, uint32_t* n_classes);
TG_API tg_status tg_cpm_quality(const tg_graph* g, const uint32_t* assignment, double resolution, double* quality);

/* ---- growth and regression ---- */

/* Smoothed growth ratio from a yearly series; years absent from the arrays count as zero. */
TG_API tg_status tg_growth_ratio(size_t n_years, const int* years, const int64_t* counts, int t, int dt,
                                 double* ratio);

/* X is row-major n x k (include an intercept column yourself); y holds 0/1.
   estimate, se, z and p receive k values each; any of them may be NULL. */
TG_API tg_status tg_fit_logistic(const double* X, const double* y, size_t n, size_t k, double* estimate,
                                 double* se, double* z, double* p, tg_logistic_status* status);

/* Bayesian quantile regression. mean, lower and upper receive k values (95% interval). */
TG_API tg_status tg_fit_quantile(const double* X, const double* y, size_t n, size_t k, double quantile,
                                 int ndraw, int thin, int burnin_kept, uint64_t seed, double* mean,
                                 double* lower, double* upper, int* converged);

#ifdef __cplusplus
}
#endif

#endif
