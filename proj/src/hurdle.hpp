#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "corpus.hpp"
#include "growth.hpp"

namespace tg {

struct RegressionRow {
    PubId pub_id = 0;
    std::int64_t citations = 0;
    double growth_ratio = 0.0;
    int num_authors = 1;
    int num_references = 0;
    double jif = 0.0;
};

inline constexpr std::array<const char*, 5> kCoefficientNames{"(Intercept)", "growth_ratio", "num_authors",
                                                              "num_references", "jif"};

// Intercept plus the four explanatory variables, untransformed.
Eigen::MatrixXd design_matrix(const std::vector<RegressionRow>& rows);

// Publication -> {topic, specialty, discipline, area}.
using ClassLookup = std::unordered_map<PubId, std::array<std::uint32_t, 4>>;

struct AssembleReport {
    std::size_t missing_growth = 0;
    std::size_t ineligible_topic = 0;
    std::size_t unclassified = 0;
};

// One row per focal publication in `discipline` whose topic has an eligible growth record.
std::vector<RegressionRow> assemble_rows(const std::vector<Publication>& focal,
                                         const std::vector<GrowthRecord>& growth, const ClassLookup& classes,
                                         std::uint32_t discipline, AssembleReport* report = nullptr);

struct HurdleSplit {
    std::vector<RegressionRow> low;   // citations <= hurdle
    std::vector<RegressionRow> high;  // citations > hurdle
    int hurdle = 3;
};

HurdleSplit split_hurdle(const std::vector<RegressionRow>& rows, int hurdle = 3);

// Sum of r * (q - 1[r < 0]).
double check_loss(std::span<const double> residuals, double q);

struct McmcConfig {
    int ndraw = 10000;
    int thin = 10;
    int burnin_kept = 500;
    std::vector<double> quantiles{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::uint64_t seed = 0;
    // Normal prior N(0, prior_variance I) on coefficients; inverse-gamma prior on the scale.
    double prior_variance = 1e6;
    double sigma_shape = 0.01;
    double sigma_scale = 0.01;

    int kept() const { return ndraw / thin; }
    void validate() const;
};

struct CoefficientSummary {
    std::string name;
    double mean = 0.0;
    double lower = 0.0;  // 2.5%
    double upper = 0.0;  // 97.5%
    double sd = 0.0;
    double mcse = 0.0;   // batch-means Monte Carlo standard error of the mean
};

struct QuantileFit {
    double quantile = 0.5;
    std::vector<CoefficientSummary> coefficients;
    int n = 0;
    int n_kept_draws = 0;  // draws entering the summaries
    bool converged = true;
    std::string diagnostic;
    Eigen::MatrixXd draws;  // summary draws, one row per draw
};

QuantileFit fit_quantile(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double q, const McmcConfig& cfg,
                         const std::vector<std::string>& names);
QuantileFit fit_quantile(const std::vector<RegressionRow>& high, double q, const McmcConfig& cfg);

enum class LogisticStatus { Ok, Separation, NotConverged };
std::string_view to_string(LogisticStatus s);

struct LogisticCoefficient {
    std::string name;
    double estimate = 0.0;
    double exp_estimate = 0.0;
    double se = 0.0;
    double z = 0.0;
    double p = 1.0;
    std::string signif;
};

struct LogisticFit {
    std::vector<LogisticCoefficient> coefficients;
    int n = 0;
    int iterations = 0;
    double deviance = 0.0;
    LogisticStatus status = LogisticStatus::Ok;
};

// Binomial logit by iteratively reweighted least squares. y holds 0/1 outcomes.
LogisticFit fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<std::string>& names);
// Outcome is citations > hurdle.
LogisticFit fit_logistic(const std::vector<RegressionRow>& rows, int hurdle = 3);

// R-style codes: 0 '***' 0.001 '**' 0.01 '*' 0.05 '.' 0.1 ' ' 1. The blank code is "".
std::string signif_code(double p);
inline constexpr const char* kSignifLegend = "0 '***' 0.001 '**' 0.01 '*' 0.05 '.' 0.1 ' ' 1";

// Rounds to `digits` significant figures and prints without trailing zeros.
std::string format_sig(double x, int digits);
// Scientific with two significant figures, e.g. 9.8E-111.
std::string format_p(double p);

double two_sided_p_value(double z);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void write_table(const std::filesystem::path& path, const Table& t);

struct FitTables {
    Table logistic;
    Table quantile;
};

// Logistic table in the published layout; quantile table with one row per converged quantile and term.
FitTables summarize_fits(const LogisticFit& logistic, const std::vector<QuantileFit>& quantiles);

}  // namespace tg
