#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace tg {

std::string format_count(std::int64_t n) {
    std::string digits = std::to_string(n < 0 ? -n : n);
    std::string out;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i > 0 && (digits.size() - i) % 3 == 0) out += ',';
        out += digits[i];
    }
    return n < 0 ? "-" + out : out;
}

std::string format_average(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", x);
    std::string s = buf;
    if (s.size() > 2 && s.compare(s.size() - 2, 2, ".0") == 0) s.resize(s.size() - 2);
    if (s == "-0") s = "0";
    return s;
}

Table counts_table(const std::vector<DisciplineCounts>& d) {
    Table t;
    t.header = {"discipline_id", "Discipline (machine generated label)", "# Publ. (total)", "# Publ. (included)",
                "# Topics"};
    for (const auto& r : d)
        t.rows.push_back({std::to_string(r.discipline), r.label, format_count(r.total), format_count(r.included),
                          format_count(r.topics)});
    return t;
}

DisciplineAverages emit_discipline_summary(std::uint32_t discipline, const std::string& label,
                                           const std::vector<RegressionRow>& rows) {
    DisciplineAverages a;
    a.discipline = discipline;
    a.label = label;
    a.n = rows.size();
    if (rows.empty()) return a;
    for (const auto& r : rows) {
        a.citations += static_cast<double>(r.citations);
        a.authors += r.num_authors;
        a.references += r.num_references;
        a.growth_ratio += r.growth_ratio;
        a.jif += r.jif;
    }
    const double n = static_cast<double>(rows.size());
    a.citations /= n;
    a.authors /= n;
    a.references /= n;
    a.growth_ratio /= n;
    a.jif /= n;
    return a;
}

Table averages_table(const std::vector<DisciplineAverages>& d) {
    Table t;
    t.header = {"discipline_id",         "Discipline (machine generated label)",
                "Avg. no. of citations", "Avg. no. of authors",
                "Avg. no. of references", "Avg. growth ratio",
                "Avg. JIF"};
    for (const auto& r : d)
        t.rows.push_back({std::to_string(r.discipline), r.label, format_average(r.citations),
                          format_average(r.authors), format_average(r.references), format_average(r.growth_ratio),
                          format_average(r.jif)});
    return t;
}

Histogram histogram(std::span<const double> values, double cap, int bins) {
    if (!(cap > 0) || bins < 1) throw ArgumentError("histogram needs a positive cap and bin count");
    Histogram h;
    h.cap = cap;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    const double w = cap / bins;
    for (double v : values) {
        if (!(v >= 0.0) || v > cap) {
            ++h.excluded;
            continue;
        }
        auto b = static_cast<std::size_t>(std::floor(v / w));
        if (b >= h.counts.size()) b = h.counts.size() - 1;
        ++h.counts[b];
    }
    return h;
}

std::vector<double> column_values(const std::vector<RegressionRow>& rows, std::string_view variable) {
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) {
        if (variable == "citations") v.push_back(static_cast<double>(r.citations));
        else if (variable == "growth_ratio") v.push_back(r.growth_ratio);
        else if (variable == "num_authors") v.push_back(r.num_authors);
        else if (variable == "num_references") v.push_back(r.num_references);
        else if (variable == "jif") v.push_back(r.jif);
        else throw ArgumentError("unknown variable: " + std::string(variable));
    }
    return v;
}

namespace {

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

class Svg {
public:
    Svg(double w, double h) {
        s_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           << "<!-- generator: topicgrowth " << TG_VERSION << " -->\n"
           << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
           << "\" font-family=\"sans-serif\" font-size=\"10\">\n"
           << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    }
    void rect(double x, double y, double w, double h, const char* fill) {
        s_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
           << "\" fill=\"" << fill << "\"/>\n";
    }
    void line(double x1, double y1, double x2, double y2, const char* stroke = "black") {
        s_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y2)
           << "\" stroke=\"" << stroke << "\"/>\n";
    }
    void circle(double x, double y, double r, const char* fill) {
        s_ << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << num(r) << "\" fill=\"" << fill
           << "\" fill-opacity=\"0.4\"/>\n";
    }
    void polyline(const std::vector<std::pair<double, double>>& pts, const char* stroke) {
        s_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" points=\"";
        for (auto [x, y] : pts) s_ << num(x) << ',' << num(y) << ' ';
        s_ << "\"/>\n";
    }
    void polygon(const std::vector<std::pair<double, double>>& pts, const char* fill) {
        s_ << "<polygon fill=\"" << fill << "\" fill-opacity=\"0.3\" points=\"";
        for (auto [x, y] : pts) s_ << num(x) << ',' << num(y) << ' ';
        s_ << "\"/>\n";
    }
    void text(double x, double y, const std::string& t, const char* anchor = "middle") {
        s_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" text-anchor=\"" << anchor << "\">" << escape(t)
           << "</text>\n";
    }
    void save(const std::filesystem::path& p) {
        std::ofstream f(p, std::ios::binary);
        if (!f) throw InputError("cannot write " + p.string());
        f << s_.str() << "</svg>\n";
    }

private:
    static std::string escape(const std::string& t) {
        std::string o;
        for (char c : t) {
            if (c == '<') o += "&lt;";
            else if (c == '>') o += "&gt;";
            else if (c == '&') o += "&amp;";
            else o += c;
        }
        return o;
    }
    std::ostringstream s_;
};

struct Panel {
    double x0, y0, w, h;
    double px(double u) const { return x0 + u * w; }  // u, v in [0, 1]
    double py(double v) const { return y0 + h - v * h; }
    void frame(Svg& svg, const std::string& title) const {
        svg.line(x0, y0 + h, x0 + w, y0 + h);
        svg.line(x0, y0, x0, y0 + h);
        svg.text(x0 + w / 2, y0 - 6, title);
    }
};

void write_csv(const std::filesystem::path& p, const std::string& header, const std::vector<std::string>& lines) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw InputError("cannot write " + p.string());
    f << header << '\n';
    for (const auto& l : lines) f << l << '\n';
}

std::string full(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

FigureReport emit_figures(const std::vector<RegressionRow>& rows, const std::vector<DisciplineFits>& fits,
                          const std::filesystem::path& dir) {
    FigureReport rep;
    std::filesystem::create_directories(dir);

    // Histograms, log10 count on the y-axis.
    const double pw = 220, ph = 160, margin = 40;
    constexpr int n_hist = static_cast<int>(std::size(kHistogramVariables));
    Svg fig1(margin + n_hist * (pw + margin), ph + 2 * margin);
    for (int k = 0; k < n_hist; ++k) {
        const auto& var = kHistogramVariables[k];
        const auto values = column_values(rows, var.name);
        const auto h = histogram(values, var.cap);
        std::vector<std::string> lines;
        for (std::size_t b = 0; b < h.counts.size(); ++b)
            lines.push_back(full(h.width() * static_cast<double>(b)) + "," +
                            full(h.width() * static_cast<double>(b + 1)) + "," + std::to_string(h.counts[b]));
        const auto csv = dir / ("figure1_" + std::string(var.name) + ".csv");
        write_csv(csv, "bin_lower,bin_upper,count", lines);
        rep.written.push_back(csv);
        if (h.excluded > 0)
            rep.notices.push_back(std::string(var.name) + ": " + std::to_string(h.excluded) + " values beyond the axis cap");

        Panel p{margin + k * (pw + margin), margin, pw, ph};
        p.frame(fig1, var.name);
        const auto max_count = *std::max_element(h.counts.begin(), h.counts.end());
        const double top = std::log10(static_cast<double>(std::max<std::int64_t>(max_count, 1))) + 0.1;
        const double bw = pw / static_cast<double>(h.counts.size());
        for (std::size_t b = 0; b < h.counts.size(); ++b) {
            if (h.counts[b] == 0) continue;
            // log10(1) = 0 would hide single counts; shift by a small floor
            const double v = (std::log10(static_cast<double>(h.counts[b])) + 0.1) / (top + 0.1);
            fig1.rect(p.x0 + b * bw, p.py(v), bw * 0.9, v * ph, "steelblue");
        }
        fig1.text(p.x0, p.y0 + ph + 14, "0", "start");
        fig1.text(p.x0 + pw, p.y0 + ph + 14, format_sig(var.cap, 4), "end");
    }
    fig1.save(dir / "figure1.svg");
    rep.written.push_back(dir / "figure1.svg");

    // Scatter of citations against each explanatory variable; the SVG is log-log and drops non-positive pairs.
    const char* covariates[] = {"growth_ratio", "num_authors", "num_references", "jif"};
    const auto cites = column_values(rows, "citations");
    Svg fig2(margin + 4 * (pw + margin), ph + 2 * margin);
    for (int k = 0; k < 4; ++k) {
        const auto xs = column_values(rows, covariates[k]);
        std::vector<std::string> lines;
        for (std::size_t i = 0; i < xs.size(); ++i) lines.push_back(full(xs[i]) + "," + full(cites[i]));
        const auto csv = dir / ("figure2_" + std::string(covariates[k]) + ".csv");
        write_csv(csv, std::string(covariates[k]) + ",citations", lines);
        rep.written.push_back(csv);

        Panel p{margin + k * (pw + margin), margin, pw, ph};
        p.frame(fig2, covariates[k]);
        double xlo = INFINITY, xhi = -INFINITY, yhi = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (xs[i] <= 0 || cites[i] <= 0) continue;
            xlo = std::min(xlo, std::log10(xs[i]));
            xhi = std::max(xhi, std::log10(xs[i]));
            yhi = std::max(yhi, std::log10(cites[i]));
        }
        if (!(xhi >= xlo)) continue;
        const double xr = std::max(xhi - xlo, 1e-9), yr = std::max(yhi, 1e-9);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (xs[i] <= 0 || cites[i] <= 0) continue;
            fig2.circle(p.px((std::log10(xs[i]) - xlo) / xr), p.py(std::log10(cites[i]) / yr), 1.5, "darkred");
        }
    }
    fig2.save(dir / "figure2.svg");
    rep.written.push_back(dir / "figure2.svg");

    // Quantile estimates with 95% credible bands, one SVG per discipline.
    for (const auto& d : fits) {
        std::vector<const QuantileFit*> ok;
        for (const auto& f : d.quantiles)
            if (f.converged) ok.push_back(&f);
        const std::string stem = "figure3_" + std::to_string(d.discipline);
        if (ok.empty()) {
            rep.notices.push_back(stem + ": no converged quantile fits, figure omitted");
            continue;
        }
        std::vector<std::string> lines;
        for (const auto* f : ok)
            for (const auto& c : f->coefficients)
                lines.push_back(full(f->quantile) + "," + c.name + "," + full(c.mean) + "," + full(c.lower) + "," +
                                full(c.upper));
        write_csv(dir / (stem + ".csv"), "quantile,term,mean,lower,upper", lines);
        rep.written.push_back(dir / (stem + ".csv"));

        const std::size_t n_terms = ok.front()->coefficients.size();
        Svg fig3(margin + n_terms * (pw + margin), ph + 3 * margin);
        fig3.text(margin, 14, d.label + " (n=" + std::to_string(ok.front()->n) + ")", "start");
        for (std::size_t t = 0; t < n_terms; ++t) {
            Panel p{margin + t * (pw + margin), 2 * margin, pw, ph};
            p.frame(fig3, ok.front()->coefficients[t].name);
            double lo = INFINITY, hi = -INFINITY;
            for (const auto* f : ok) {
                lo = std::min({lo, f->coefficients[t].lower, 0.0});
                hi = std::max({hi, f->coefficients[t].upper, 0.0});
            }
            const double span = hi > lo ? hi - lo : 1.0;
            auto u = [&](double q) { return ok.size() > 1 ? (q - ok.front()->quantile) / (ok.back()->quantile - ok.front()->quantile) : 0.5; };
            std::vector<std::pair<double, double>> mean, band;
            for (const auto* f : ok) {
                mean.emplace_back(p.px(u(f->quantile)), p.py((f->coefficients[t].mean - lo) / span));
                band.emplace_back(p.px(u(f->quantile)), p.py((f->coefficients[t].upper - lo) / span));
            }
            for (auto it = ok.rbegin(); it != ok.rend(); ++it)
                band.emplace_back(p.px(u((*it)->quantile)), p.py(((*it)->coefficients[t].lower - lo) / span));
            fig3.polygon(band, "gray");
            fig3.polyline(mean, "black");
            fig3.line(p.x0, p.py(-lo / span), p.x0 + pw, p.py(-lo / span), "red");
        }
        fig3.save(dir / (stem + ".svg"));
        rep.written.push_back(dir / (stem + ".svg"));
    }
    return rep;
}

}  // namespace tg
