#include "hurdle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "error.hpp"
#include "tsv.hpp"

namespace tg {

Eigen::MatrixXd design_matrix(const std::vector<RegressionRow>& rows) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), 5);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const auto k = static_cast<Eigen::Index>(i);
        X(k, 0) = 1.0;
        X(k, 1) = r.growth_ratio;
        X(k, 2) = r.num_authors;
        X(k, 3) = r.num_references;
        X(k, 4) = r.jif;
    }
    return X;
}

std::vector<RegressionRow> assemble_rows(const std::vector<Publication>& focal,
                                         const std::vector<GrowthRecord>& growth, const ClassLookup& classes,
                                         std::uint32_t discipline, AssembleReport* report) {
    std::unordered_map<std::uint32_t, const GrowthRecord*> by_topic;
    for (const auto& g : growth) by_topic[g.topic_id] = &g;
    AssembleReport rep;
    std::vector<RegressionRow> rows;
    for (const auto& p : focal) {
        auto c = classes.find(p.pub_id);
        if (c == classes.end()) {
            ++rep.unclassified;
            continue;
        }
        if (c->second[2] != discipline) continue;
        auto g = by_topic.find(c->second[0]);
        if (g == by_topic.end()) {
            ++rep.missing_growth;
            continue;
        }
        if (!g->second->eligible) {
            ++rep.ineligible_topic;
            continue;
        }
        rows.push_back({p.pub_id, p.citation_count, g->second->ratio, p.n_authors, p.n_references, p.jif});
    }
    if (report) *report = rep;
    return rows;
}

HurdleSplit split_hurdle(const std::vector<RegressionRow>& rows, int hurdle) {
    HurdleSplit s;
    s.hurdle = hurdle;
    for (const auto& r : rows) (r.citations > hurdle ? s.high : s.low).push_back(r);
    return s;
}

double check_loss(std::span<const double> residuals, double q) {
    if (!(q > 0.0 && q < 1.0)) throw ArgumentError("quantile must lie in (0, 1)");
    double total = 0.0;
    for (double r : residuals) total += r * (q - (r < 0.0 ? 1.0 : 0.0));
    return total;
}

void McmcConfig::validate() const {
    if (ndraw < 1 || thin < 1) throw ArgumentError("ndraw and thin must be positive");
    if (ndraw % thin != 0) throw ArgumentError("ndraw must be a multiple of thin");
    if (burnin_kept < 0 || burnin_kept >= kept()) throw ArgumentError("burnin_kept must be below the kept draw count");
    for (double q : quantiles)
        if (!(q > 0.0 && q < 1.0)) throw ArgumentError("quantiles must lie in (0, 1)");
    if (!(prior_variance > 0) || !(sigma_shape > 0) || !(sigma_scale > 0))
        throw ArgumentError("prior parameters must be positive");
}

namespace {

// Michael-Schucany-Haas inverse Gaussian draw, written to stay stable for very large means.
double draw_inverse_gaussian(double mu, double lambda, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif;
    const double nu = normal(rng);
    const double y = nu * nu;
    const double a = mu * y / (2.0 * lambda);
    const double x = mu / (1.0 + a + std::sqrt(a * a + 2.0 * a));
    return unif(rng) <= mu / (mu + x) ? x : mu * mu / x;
}

double sample_quantile(std::vector<double> v, double prob) {
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double autocorrelation(const std::vector<double>& v, std::size_t lag) {
    const std::size_t n = v.size();
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) den += (v[i] - mean) * (v[i] - mean);
    for (std::size_t i = 0; i + lag < n; ++i) num += (v[i] - mean) * (v[i + lag] - mean);
    return den > 0 ? num / den : 1.0;
}

double batch_means_se(const std::vector<double>& v) {
    const std::size_t n = v.size();
    const auto b = std::max<std::size_t>(2, static_cast<std::size_t>(std::sqrt(static_cast<double>(n))));
    const std::size_t size = n / b;
    if (size == 0) return 0.0;
    std::vector<double> means;
    for (std::size_t i = 0; i < b; ++i) {
        double s = 0.0;
        for (std::size_t j = i * size; j < (i + 1) * size; ++j) s += v[j];
        means.push_back(s / static_cast<double>(size));
    }
    const double m = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(b);
    double var = 0.0;
    for (double x : means) var += (x - m) * (x - m);
    var /= static_cast<double>(b - 1);
    return std::sqrt(var / static_cast<double>(b));
}

void check_finite(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (!X.allFinite() || !y.allFinite()) throw ArgumentError("non-finite value in regression data");
}

}  // namespace

QuantileFit fit_quantile(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double q, const McmcConfig& cfg,
                         const std::vector<std::string>& names) {
    cfg.validate();
    if (!(q > 0.0 && q < 1.0)) throw ArgumentError("quantile must lie in (0, 1)");
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();
    if (y.size() != n) throw ArgumentError("design/response size mismatch");
    if (static_cast<Eigen::Index>(names.size()) != k) throw ArgumentError("coefficient name count mismatch");
    check_finite(X, y);
    if (n < k + 1) throw NumericError("underdetermined design: " + std::to_string(n) + " rows for " +
                                      std::to_string(k) + " coefficients");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < k) throw NumericError("rank-deficient design matrix");

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal;

    // Location-scale mixture: y = x'b + theta v + tau sqrt(sigma v) u, v ~ Exp(mean sigma).
    const double theta = (1.0 - 2.0 * q) / (q * (1.0 - q));
    const double tau2 = 2.0 / (q * (1.0 - q));
    const double prior_prec = 1.0 / cfg.prior_variance;

    Eigen::VectorXd beta = qr.solve(y);
    Eigen::VectorXd resid = y - X * beta;
    double sigma = std::max(resid.cwiseAbs().mean(), 1e-6);
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, sigma);

    const int kept = cfg.kept();
    const int used = kept - cfg.burnin_kept;
    QuantileFit fit;
    fit.quantile = q;
    fit.n = static_cast<int>(n);
    fit.n_kept_draws = used;
    fit.draws.resize(used, k);

    Eigen::VectorXd weights(n);
    Eigen::MatrixXd prec(k, k);
    Eigen::VectorXd rhs(k), z(k);
    int stored = 0;
    for (int it = 0; it < cfg.ndraw; ++it) {
        // beta | v, sigma
        weights = (tau2 * sigma * v.array()).inverse().matrix();
        prec.noalias() = X.transpose() * weights.asDiagonal() * X;
        prec.diagonal().array() += prior_prec;
        rhs.noalias() = X.transpose() * (weights.array() * (y.array() - theta * v.array())).matrix();
        Eigen::LLT<Eigen::MatrixXd> llt(prec);
        if (llt.info() != Eigen::Success) throw NumericError("posterior precision not positive definite");
        Eigen::VectorXd mean = llt.solve(rhs);
        for (Eigen::Index j = 0; j < k; ++j) z(j) = normal(rng);
        beta = mean + llt.matrixU().solve(z);

        // v | beta, sigma: 1/v is inverse Gaussian.
        resid.noalias() = y - X * beta;
        const double psi = theta * theta / (tau2 * sigma) + 2.0 / sigma;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double chi = std::max(resid(i) * resid(i) / (tau2 * sigma), 1e-300);
            const double inv = draw_inverse_gaussian(std::sqrt(psi / chi), psi, rng);
            v(i) = 1.0 / std::max(inv, 1e-300);
        }

        // sigma | beta, v
        const double ss = ((resid.array() - theta * v.array()).square() / (2.0 * tau2 * v.array())).sum();
        const double shape = cfg.sigma_shape + 1.5 * static_cast<double>(n);
        const double scale = cfg.sigma_scale + v.sum() + ss;
        sigma = scale / std::gamma_distribution<double>(shape, 1.0)(rng);

        if ((it + 1) % cfg.thin == 0) {
            const int idx = (it + 1) / cfg.thin - 1;
            if (idx >= cfg.burnin_kept) fit.draws.row(stored++) = beta.transpose();
        }
    }

    for (Eigen::Index j = 0; j < k; ++j) {
        std::vector<double> col(static_cast<std::size_t>(used));
        for (int i = 0; i < used; ++i) col[static_cast<std::size_t>(i)] = fit.draws(i, j);
        CoefficientSummary s;
        s.name = names[static_cast<std::size_t>(j)];
        s.mean = std::accumulate(col.begin(), col.end(), 0.0) / used;
        double var = 0.0;
        for (double x : col) var += (x - s.mean) * (x - s.mean);
        var = used > 1 ? var / (used - 1) : 0.0;
        s.sd = std::sqrt(var);
        s.lower = sample_quantile(col, 0.025);
        s.upper = sample_quantile(col, 0.975);
        s.mcse = batch_means_se(col);
        if (var < 1e-12) {
            fit.converged = false;
            fit.diagnostic = s.name + ": draw variance collapsed";
        } else if (col.size() > 51 && autocorrelation(col, 50) > 0.99) {
            fit.converged = false;
            fit.diagnostic = s.name + ": lag-50 autocorrelation above 0.99";
        }
        fit.coefficients.push_back(std::move(s));
    }
    return fit;
}

QuantileFit fit_quantile(const std::vector<RegressionRow>& high, double q, const McmcConfig& cfg) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(high.size()));
    for (std::size_t i = 0; i < high.size(); ++i) y(static_cast<Eigen::Index>(i)) = static_cast<double>(high[i].citations);
    return fit_quantile(design_matrix(high), y, q, cfg, {kCoefficientNames.begin(), kCoefficientNames.end()});
}

std::string_view to_string(LogisticStatus s) {
    switch (s) {
        case LogisticStatus::Ok: return "ok";
        case LogisticStatus::Separation: return "separation";
        case LogisticStatus::NotConverged: return "not_converged";
    }
    return "unknown";
}

double two_sided_p_value(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

LogisticFit fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<std::string>& names) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();
    if (y.size() != n) throw ArgumentError("design/response size mismatch");
    if (static_cast<Eigen::Index>(names.size()) != k) throw ArgumentError("coefficient name count mismatch");
    check_finite(X, y);
    Eigen::Index ones = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (y(i) != 0.0 && y(i) != 1.0) throw ArgumentError("logistic outcome must be 0 or 1");
        ones += y(i) == 1.0;
    }
    if (ones == 0 || ones == n) throw ArgumentError("logistic outcome has a single class");
    if (n < k) throw NumericError("underdetermined design");

    LogisticFit fit;
    fit.n = static_cast<int>(n);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd eta(n), mu(n), w(n), work(n);
    auto deviance = [&](const Eigen::VectorXd& m) {
        double d = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double p = y(i) == 1.0 ? m(i) : 1.0 - m(i);
            d -= 2.0 * std::log(std::max(p, 1e-300));
        }
        return d;
    };
    auto update_mu = [&] {
        eta.noalias() = X * beta;
        for (Eigen::Index i = 0; i < n; ++i) {
            mu(i) = 1.0 / (1.0 + std::exp(-eta(i)));
            mu(i) = std::clamp(mu(i), 1e-15, 1.0 - 1e-15);
        }
    };
    update_mu();
    double dev = deviance(mu);
    bool converged = false;
    constexpr int kMaxIter = 50;
    Eigen::MatrixXd info(k, k);
    for (int it = 1; it <= kMaxIter; ++it) {
        fit.iterations = it;
        w = mu.array() * (1.0 - mu.array());
        work = eta.array() + (y - mu).array() / w.array();
        info.noalias() = X.transpose() * w.asDiagonal() * X;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
            throw NumericError("information matrix is singular");
        beta = ldlt.solve(X.transpose() * (w.array() * work.array()).matrix());
        update_mu();
        const double next = deviance(mu);
        if (std::fabs(next - dev) / (std::fabs(next) + 0.1) < 1e-10) {
            dev = next;
            converged = true;
            break;
        }
        dev = next;
    }
    fit.deviance = dev;
    if (dev / static_cast<double>(n) < 1e-8 || (!converged && eta.cwiseAbs().maxCoeff() > 30.0)) {
        fit.status = LogisticStatus::Separation;
        return fit;
    }
    fit.status = converged ? LogisticStatus::Ok : LogisticStatus::NotConverged;

    w = mu.array() * (1.0 - mu.array());
    info.noalias() = X.transpose() * w.asDiagonal() * X;
    Eigen::MatrixXd cov = info.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    for (Eigen::Index j = 0; j < k; ++j) {
        LogisticCoefficient c;
        c.name = names[static_cast<std::size_t>(j)];
        c.estimate = beta(j);
        c.exp_estimate = std::exp(c.estimate);
        c.se = std::sqrt(cov(j, j));
        c.z = c.estimate / c.se;
        c.p = two_sided_p_value(c.z);
        c.signif = signif_code(c.p);
        fit.coefficients.push_back(std::move(c));
    }
    return fit;
}

LogisticFit fit_logistic(const std::vector<RegressionRow>& rows, int hurdle) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) y(static_cast<Eigen::Index>(i)) = rows[i].citations > hurdle ? 1.0 : 0.0;
    return fit_logistic(design_matrix(rows), y, {kCoefficientNames.begin(), kCoefficientNames.end()});
}

std::string signif_code(double p) {
    if (p <= 0.001) return "***";
    if (p <= 0.01) return "**";
    if (p <= 0.05) return "*";
    if (p <= 0.1) return ".";
    return "";
}

std::string format_sig(double x, int digits) {
    if (x == 0.0 || !std::isfinite(x)) return x == 0.0 ? "0" : tsv::format_double(x);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, x);
    const double rounded = std::strtod(buf, nullptr);
    const int exponent = static_cast<int>(std::floor(std::log10(std::fabs(rounded))));
    const int decimals = std::max(0, digits - 1 - exponent);
    std::snprintf(buf, sizeof buf, "%.*f", decimals, rounded);
    std::string s(buf);
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    return s;
}

std::string format_p(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2G", p);
    return buf;
}

void write_table(const std::filesystem::path& path, const Table& t) {
    tsv::Writer w(path);
    w.row(t.header);
    for (const auto& r : t.rows) w.row(r);
}

FitTables summarize_fits(const LogisticFit& logistic, const std::vector<QuantileFit>& quantiles) {
    FitTables out;
    out.logistic.header = {"term", "Estimate", "Exp. Estimate", "SE", "z-value", "p-value", "Signif."};
    for (const auto& c : logistic.coefficients)
        out.logistic.rows.push_back({c.name, format_sig(c.estimate, 2), format_sig(c.exp_estimate, 4),
                                     format_sig(c.se, 2), format_sig(c.z, 2), format_p(c.p), c.signif});
    out.quantile.header = {"quantile", "term", "mean", "lower_2.5", "upper_97.5", "sd", "n", "n_draws"};
    for (const auto& f : quantiles) {
        if (!f.converged) continue;
        for (const auto& c : f.coefficients)
            out.quantile.rows.push_back({tsv::format_double(f.quantile), c.name, tsv::format_double(c.mean),
                                         tsv::format_double(c.lower), tsv::format_double(c.upper),
                                         tsv::format_double(c.sd), std::to_string(f.n),
                                         std::to_string(f.n_kept_draws)});
    }
    return out;
}

}  // namespace tg
