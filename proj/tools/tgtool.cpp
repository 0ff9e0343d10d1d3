#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "topicgrowth/topicgrowth.h"

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string publications;
    std::string citations;
    bool quiet = false;
};

int report_failure(tg_status s, const char* stage) {
    const char* where = *tg_last_error_stage() ? tg_last_error_stage() : stage;
    std::fprintf(stderr, "error [%s]: %s (%s)\n", where, tg_last_error(), tg_status_string(s));
    return static_cast<int>(s);
}

int run(const Options& o, const std::string& stage) {
    tg_context* ctx = nullptr;
    tg_status s = o.config.empty() ? tg_context_create(nullptr, &ctx) : tg_context_load(o.config.c_str(), &ctx);
    if (s != TG_OK) return report_failure(s, "config");
    if (o.seed) tg_context_set_seed(ctx, *o.seed);
    if (!o.out.empty()) tg_context_set_output_dir(ctx, o.out.c_str());
    if (!o.publications.empty() || !o.citations.empty()) {
        s = tg_context_set_input(ctx, o.publications.c_str(), o.citations.c_str());
        if (s != TG_OK) {
            tg_context_destroy(ctx);
            return report_failure(s, "config");
        }
    }
    s = tg_run_stage(ctx, stage.c_str());
    if (!o.quiet)
        for (size_t i = 0; i < tg_context_warning_count(ctx); ++i)
            std::fprintf(stderr, "warning: %s\n", tg_context_warning(ctx, i));
    tg_context_destroy(ctx);
    if (s != TG_OK) return report_failure(s, stage.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topic growth and citation impact pipeline"};
    app.set_version_flag("--version", std::string(tg_version()));
    app.require_subcommand(1);
    Options o;
    std::uint64_t seed = 0;
    app.add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed, "Base random seed");
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--publications", o.publications, "Publications TSV (otherwise the synthetic corpus)");
    app.add_option("--citations", o.citations, "Citations TSV");
    app.add_flag("-q,--quiet", o.quiet, "Suppress warnings");

    const std::pair<const char*, const char*> commands[] = {
        {"synth", "Generate a synthetic corpus with planted truth"},
        {"ingest", "Validate and clean the corpus, count citations"},
        {"cluster", "Build the citation network and the topic hierarchy"},
        {"label", "Label classes at every level"},
        {"growth", "Topic growth ratios and eligibility"},
        {"fit", "Hurdle model fits per discipline"},
        {"report", "Tables and figures"},
        {"run", "Full pipeline"},
    };
    std::string chosen;
    for (auto [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        sub->callback([&chosen, name = std::string(name)] { chosen = name; });
    }
    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) o.seed = seed;
    return run(o, chosen);
}
