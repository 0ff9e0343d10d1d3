#include "corpus.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "error.hpp"
#include "tsv.hpp"

namespace tg {

DocType parse_doc_type(std::string_view text) {
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "article") return DocType::Article;
    if (s == "review") return DocType::Review;
    return DocType::Other;
}

std::string_view to_string(DocType t) {
    switch (t) {
        case DocType::Article: return "article";
        case DocType::Review: return "review";
        case DocType::Other: return "other";
    }
    return "other";
}

void CorpusFilter::validate() const {
    if (citation_window.first > citation_window.last)
        throw ArgumentError("citation window start after end");
    if (!citation_window.contains(focal_year))
        throw ArgumentError("focal year outside citation window");
}

std::vector<std::string> tokenize_title(std::string_view title) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : title) {
        if (std::isalnum(c) || c == '-' || c >= 0x80) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    // Hyphens only survive inside words.
    for (auto& t : tokens) {
        while (!t.empty() && t.front() == '-') t.erase(t.begin());
        while (!t.empty() && t.back() == '-') t.pop_back();
    }
    std::erase_if(tokens, [](const std::string& t) { return t.empty(); });
    return tokens;
}

namespace {

int require_column(const tsv::Table& t, const std::string& name, const std::filesystem::path& path) {
    int c = t.column(name);
    if (c < 0) throw InputError(path.string() + ": missing mandatory column '" + name + "'");
    return c;
}

}  // namespace

Loaded<Publication> load_publications(const std::filesystem::path& path,
                                      const PublicationSchema& schema) {
    auto table = tsv::read(path);
    const int c_id = require_column(table, schema.pub_id, path);
    const int c_year = require_column(table, schema.year, path);
    const int c_type = require_column(table, schema.doc_type, path);
    const int c_journal = require_column(table, schema.journal_id, path);
    const int c_jif = require_column(table, schema.jif, path);
    const int c_auth = require_column(table, schema.n_authors, path);
    const int c_refs = require_column(table, schema.n_references, path);
    const int c_title = table.column(schema.title);

    Loaded<Publication> out;
    out.items.reserve(table.rows.size());
    std::unordered_set<PubId> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t line = table.line_numbers[r];
        try {
            auto cell = [&](int c) -> const std::string& {
                if (static_cast<std::size_t>(c) >= row.size())
                    throw InputError("missing field '" + table.header[c] + "'");
                return row[c];
            };
            Publication p;
            p.pub_id = tsv::parse_int(cell(c_id));
            p.year = static_cast<int>(tsv::parse_int(cell(c_year)));
            p.doc_type = parse_doc_type(cell(c_type));
            p.journal_id = tsv::parse_int(cell(c_journal));
            p.jif = tsv::parse_double(cell(c_jif));
            p.n_authors = static_cast<int>(tsv::parse_int(cell(c_auth)));
            p.n_references = static_cast<int>(tsv::parse_int(cell(c_refs)));
            if (c_title >= 0 && static_cast<std::size_t>(c_title) < row.size()) p.title = row[c_title];
            p.title_tokens = tokenize_title(p.title);
            if (p.n_authors < 1) throw InputError("n_authors must be >= 1");
            if (p.n_references < 0) throw InputError("n_references must be >= 0");
            if (p.jif < 0) throw InputError("jif must be >= 0");
            if (!seen.insert(p.pub_id).second)
                throw InputError("duplicate pub_id " + std::to_string(p.pub_id));
            out.items.push_back(std::move(p));
        } catch (const InputError& e) {
            out.errors.push_back({line, e.what()});
        }
    }
    return out;
}

namespace {

int parse_date(std::string_view s) {
    // yyyy-mm-dd
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') throw InputError("bad date '" + std::string(s) + "'");
    auto y = tsv::parse_int(s.substr(0, 4));
    auto m = tsv::parse_int(s.substr(5, 2));
    auto d = tsv::parse_int(s.substr(8, 2));
    if (m < 1 || m > 12 || d < 1 || d > 31) throw InputError("bad date '" + std::string(s) + "'");
    return static_cast<int>(y * 10000 + m * 100 + d);
}

std::string format_date(int ymd) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", ymd / 10000, (ymd / 100) % 100, ymd % 100);
    return buf;
}

}  // namespace

Loaded<CitationEdge> load_citations(const std::filesystem::path& path, const CitationSchema& schema) {
    auto table = tsv::read(path);
    const int c_citing = require_column(table, schema.citing, path);
    const int c_cited = require_column(table, schema.cited, path);
    const int c_year = require_column(table, schema.citing_year, path);
    const int c_date = table.column(schema.citing_date);

    Loaded<CitationEdge> out;
    out.items.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        try {
            if (row.size() < table.header.size())
                throw InputError("expected " + std::to_string(table.header.size()) + " fields, got " +
                                 std::to_string(row.size()));
            CitationEdge e;
            e.citing = tsv::parse_int(row[c_citing]);
            e.cited = tsv::parse_int(row[c_cited]);
            e.citing_year = static_cast<int>(tsv::parse_int(row[c_year]));
            if (c_date >= 0 && !row[c_date].empty()) e.citing_date = parse_date(row[c_date]);
            if (e.citing == e.cited) throw InputError("self-citation");
            out.items.push_back(e);
        } catch (const InputError& e) {
            out.errors.push_back({table.line_numbers[r], e.what()});
        }
    }
    return out;
}

void write_publications(const std::filesystem::path& path, const std::vector<Publication>& pubs,
                        bool with_citation_count) {
    tsv::Writer w(path);
    std::vector<std::string> header{"pub_id", "year", "doc_type", "journal_id", "jif",
                                    "n_authors", "n_references", "title"};
    if (with_citation_count) header.push_back("citation_count");
    w.row(header);
    for (const auto& p : pubs) {
        std::vector<std::string> cells{std::to_string(p.pub_id), std::to_string(p.year),
                                       std::string(to_string(p.doc_type)),
                                       std::to_string(p.journal_id), tsv::format_double(p.jif),
                                       std::to_string(p.n_authors), std::to_string(p.n_references),
                                       p.title};
        if (with_citation_count) cells.push_back(std::to_string(p.citation_count));
        w.row(cells);
    }
}

void write_citations(const std::filesystem::path& path, const std::vector<CitationEdge>& edges,
                     bool with_dates) {
    tsv::Writer w(path);
    std::vector<std::string> header{"citing", "cited", "citing_year"};
    if (with_dates) header.push_back("citing_date");
    w.row(header);
    for (const auto& e : edges) {
        std::vector<std::string> cells{std::to_string(e.citing), std::to_string(e.cited),
                                       std::to_string(e.citing_year)};
        if (with_dates) cells.push_back(e.citing_date ? format_date(e.citing_date) : "");
        w.row(cells);
    }
}

std::vector<Publication> filter_corpus(const std::vector<Publication>& pubs, const CorpusFilter& f) {
    std::vector<Publication> out;
    for (const auto& p : pubs)
        if (p.year == f.focal_year && f.doc_types.contains(p.doc_type)) out.push_back(p);
    return out;
}

CitationCountReport count_citations(std::vector<Publication>& pubs,
                                    const std::vector<CitationEdge>& edges, const YearRange& window,
                                    int cutoff_date) {
    std::unordered_map<PubId, std::size_t> index;
    index.reserve(pubs.size());
    for (std::size_t i = 0; i < pubs.size(); ++i) {
        index.emplace(pubs[i].pub_id, i);
        pubs[i].citation_count = 0;
    }
    CitationCountReport rep;
    for (const auto& e : edges) {
        auto it = index.find(e.cited);
        if (it == index.end()) {
            ++rep.dangling;
            continue;
        }
        bool inside = window.contains(e.citing_year);
        if (inside && cutoff_date && e.citing_date && e.citing_date > cutoff_date) inside = false;
        if (!inside) {
            ++rep.outside_window;
            continue;
        }
        ++pubs[it->second].citation_count;
        ++rep.counted;
    }
    return rep;
}

}  // namespace tg
