#include "growth.hpp"

#include <cmath>

#include "error.hpp"
#include "tsv.hpp"

namespace tg {

std::vector<TopicSeries> topic_series(const std::vector<Publication>& pubs,
                                      const std::unordered_map<PubId, std::uint32_t>& topic_of,
                                      std::uint32_t n_topics, const YearRange& years,
                                      const std::set<DocType>& doc_types) {
    std::vector<TopicSeries> out(n_topics);
    for (std::uint32_t i = 0; i < n_topics; ++i) {
        out[i].topic_id = i;
        for (int y = years.first; y <= years.last; ++y) out[i].counts[y] = 0;
    }
    for (const auto& p : pubs) {
        if (!years.contains(p.year)) continue;
        if (!doc_types.empty() && !doc_types.contains(p.doc_type)) continue;
        auto it = topic_of.find(p.pub_id);
        if (it == topic_of.end()) continue;
        if (it->second >= n_topics) throw ArgumentError("topic id out of range");
        ++out[it->second].counts[p.year];
    }
    return out;
}

double growth_ratio(const TopicSeries& s, int t, int dt) {
    auto base = s.counts.find(t);
    auto later = s.counts.find(t + dt);
    if (base == s.counts.end() || later == s.counts.end())
        throw ArgumentError("series lacks year " + std::to_string(base == s.counts.end() ? t : t + dt));
    if (base->second == 0)
        throw NumericError("growth ratio undefined: no publications in " + std::to_string(t));
    return static_cast<double>(later->second) / static_cast<double>(base->second);
}

GrowthRecord smoothed_growth_ratio(const TopicSeries& s, int t, int dt, int window) {
    if (window < 1) throw ArgumentError("window must be positive");
    GrowthRecord r;
    r.topic_id = s.topic_id;
    r.window = window;
    auto sum = [&](int last) {
        std::int64_t total = 0;
        for (int y = last - window + 1; y <= last; ++y) {
            auto it = s.counts.find(y);
            if (it == s.counts.end()) ++r.missing_years;
            else total += it->second;
        }
        return total;
    };
    r.base_sum = sum(t);
    r.later_sum = sum(t + dt);
    if (r.base_sum == 0)
        throw NumericError("growth ratio undefined for topic " + std::to_string(s.topic_id) + ": empty base window");
    r.mean_base = static_cast<double>(r.base_sum) / window;
    r.mean_later = static_cast<double>(r.later_sum) / window;
    // Equal divisors cancel; the ratio of sums is the exact ratio of means.
    r.ratio = static_cast<double>(r.later_sum) / static_cast<double>(r.base_sum);
    return r;
}

std::vector<GrowthRecord> filter_topics(std::vector<GrowthRecord> records, double min_mean) {
    for (auto& r : records) {
        // Compare sums against min_mean * window so the test stays exact.
        const double threshold = min_mean * r.window;
        r.eligible = static_cast<double>(r.base_sum) > threshold && static_cast<double>(r.later_sum) > threshold;
    }
    return records;
}

void write_growth(const std::filesystem::path& path, const std::vector<GrowthRecord>& records) {
    tsv::Writer w(path);
    w.row({"topic_id", "mean_base", "mean_later", "ratio", "eligible"});
    for (const auto& r : records)
        w.row({std::to_string(r.topic_id), tsv::format_double(r.mean_base), tsv::format_double(r.mean_later),
               tsv::format_double(r.ratio), r.eligible ? "true" : "false"});
}

std::vector<GrowthRecord> read_growth(const std::filesystem::path& path) {
    auto t = tsv::read(path);
    const char* cols[] = {"topic_id", "mean_base", "mean_later", "ratio", "eligible"};
    int idx[5];
    for (int i = 0; i < 5; ++i) {
        idx[i] = t.column(cols[i]);
        if (idx[i] < 0) throw InputError(path.string() + ": missing mandatory column '" + cols[i] + "'");
    }
    std::vector<GrowthRecord> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        try {
            if (row.size() < 5) throw InputError("too few fields");
            GrowthRecord g;
            g.topic_id = static_cast<std::uint32_t>(tsv::parse_int(row[idx[0]]));
            g.mean_base = tsv::parse_double(row[idx[1]]);
            g.mean_later = tsv::parse_double(row[idx[2]]);
            g.ratio = tsv::parse_double(row[idx[3]]);
            g.eligible = row[idx[4]] == "true";
            g.base_sum = static_cast<std::int64_t>(std::llround(g.mean_base * g.window));
            g.later_sum = static_cast<std::int64_t>(std::llround(g.mean_later * g.window));
            out.push_back(g);
        } catch (const InputError& e) {
            throw InputError(path.string() + ":" + std::to_string(t.line_numbers[r]) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace tg
