#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace tg {

using PubId = std::int64_t;

enum class DocType { Article, Review, Other };

DocType parse_doc_type(std::string_view text);
std::string_view to_string(DocType t);

struct Publication {
    PubId pub_id = 0;
    int year = 0;
    DocType doc_type = DocType::Article;
    std::int64_t journal_id = 0;
    double jif = 0.0;
    int n_authors = 1;
    int n_references = 0;
    std::string title;
    std::vector<std::string> title_tokens;
    // Computed by count_citations; never read from input.
    std::int64_t citation_count = 0;

    bool operator==(const Publication&) const = default;
};

struct CitationEdge {
    PubId citing = 0;
    PubId cited = 0;
    int citing_year = 0;
    // Optional registration date as yyyymmdd; 0 when the input has no date column.
    int citing_date = 0;

    bool operator==(const CitationEdge&) const = default;
};

struct YearRange {
    int first = 0;
    int last = 0;
    bool contains(int y) const { return y >= first && y <= last; }
};

struct CorpusFilter {
    int focal_year = 2015;
    std::set<DocType> doc_types{DocType::Article, DocType::Review};
    YearRange citation_window{2015, 2021};
    // yyyymmdd; citations registered after this date are dropped when the edge carries a date.
    int cutoff_date = 0;

    void validate() const;
};

// Column names for publications.tsv. The defaults are the file contract.
struct PublicationSchema {
    std::string pub_id = "pub_id";
    std::string year = "year";
    std::string doc_type = "doc_type";
    std::string journal_id = "journal_id";
    std::string jif = "jif";
    std::string n_authors = "n_authors";
    std::string n_references = "n_references";
    std::string title = "title";
};

struct CitationSchema {
    std::string citing = "citing";
    std::string cited = "cited";
    std::string citing_year = "citing_year";
    std::string citing_date = "citing_date";  // optional
};

struct RowError {
    std::size_t line = 0;
    std::string message;
};

template <typename T>
struct Loaded {
    std::vector<T> items;
    std::vector<RowError> errors;
};

// Lowercases, strips punctuation and splits on whitespace.
std::vector<std::string> tokenize_title(std::string_view title);

Loaded<Publication> load_publications(const std::filesystem::path& path,
                                      const PublicationSchema& schema = {});
Loaded<CitationEdge> load_citations(const std::filesystem::path& path,
                                    const CitationSchema& schema = {});

void write_publications(const std::filesystem::path& path, const std::vector<Publication>& pubs,
                        bool with_citation_count = false);
void write_citations(const std::filesystem::path& path, const std::vector<CitationEdge>& edges,
                     bool with_dates = false);

std::vector<Publication> filter_corpus(const std::vector<Publication>& pubs, const CorpusFilter& f);

struct CitationCountReport {
    std::size_t counted = 0;
    std::size_t outside_window = 0;
    std::size_t dangling = 0;
};

// Sets citation_count on every publication from edges whose citing year lies in the window.
CitationCountReport count_citations(std::vector<Publication>& pubs,
                                    const std::vector<CitationEdge>& edges, const YearRange& window,
                                    int cutoff_date = 0);

}  // namespace tg
